#include "riemkit/tensor.hpp"

#include "riemkit/errors.hpp"

#include <cmath>

namespace riemkit {

const char* frame_label_name(FrameLabel label) {
  switch (label) {
    case FrameLabel::vertical: return "vertical";
    case FrameLabel::horizontal: return "horizontal";
    case FrameLabel::range: return "range";
    case FrameLabel::range_perp: return "range_perp";
    case FrameLabel::generic: return "generic";
  }
  return "generic";
}

Mat Frame::matrix(int ambient_dim) const {
  Mat out(ambient_dim, size());
  for (int i = 0; i < size(); ++i) out.col(i) = vectors[static_cast<std::size_t>(i)];
  return out;
}

double inner(const Vec& a, const Vec& b, const Mat& metric) { return a.dot(metric * b); }

double norm(const Vec& a, const Mat& metric) { return std::sqrt(std::max(0.0, inner(a, a, metric))); }

Frame gram_schmidt(const std::vector<Vec>& vecs, const Mat& metric, FrameLabel label) {
  Frame frame;
  frame.label = label;
  for (std::size_t idx = 0; idx < vecs.size(); ++idx) {
    Vec w = vecs[idx];
    for (int pass = 0; pass < 2; ++pass) {
      Vec correction = Vec::Zero(w.size());
      for (const Vec& e : frame.vectors) correction += inner(w, e, metric) * e;
      w -= correction;
    }
    double len = norm(w, metric);
    if (len < 1e-10) {
      throw Error(ErrorCode::DegenerateInput,
                  "vector " + std::to_string(idx) + " is dependent on its predecessors");
    }
    frame.vectors.push_back(w / len);
  }
  return frame;
}

int numerical_rank(const Mat& map, double rel_threshold) {
  if (map.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(map);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) >= rel_threshold * s(0)) ++rank;
  return rank;
}

Mat kernel_basis(const Mat& map, double rel_threshold) {
  const int cols = static_cast<int>(map.cols());
  Eigen::JacobiSVD<Mat> svd(map, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  int rank = 0;
  if (s.size() > 0 && s(0) > 0.0)
    for (int i = 0; i < s.size(); ++i)
      if (s(i) >= rel_threshold * s(0)) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

Mat orthogonal_projector(const Mat& basis, const Mat& metric) {
  const int dim = static_cast<int>(metric.rows());
  if (basis.cols() == 0) return Mat::Zero(dim, dim);
  Mat gram = basis.transpose() * metric * basis;
  return basis * gram.ldlt().solve(basis.transpose() * metric);
}

Frame frame_from_indices(const Mat& projector, const Mat& metric, const std::vector<int>& indices,
                         FrameLabel label) {
  std::vector<Vec> vecs;
  for (int k : indices) vecs.push_back(projector.col(k));
  try {
    return gram_schmidt(vecs, metric, label);
  } catch (const Error&) {
    throw Error(ErrorCode::FrameExtensionFailure, "projected coordinate frame degenerated");
  }
}

Frame greedy_frame(const Mat& projector, const Mat& metric, int count, FrameLabel label,
                   std::vector<int>* chosen, double min_residual) {
  const int dim = static_cast<int>(metric.rows());
  Frame frame;
  frame.label = label;
  std::vector<int> picked;
  for (int k = 0; k < dim && frame.size() < count; ++k) {
    Vec w = projector.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      Vec correction = Vec::Zero(dim);
      for (const Vec& e : frame.vectors) correction += inner(w, e, metric) * e;
      w -= correction;
    }
    double scale = std::sqrt(metric(k, k));
    double len = norm(w, metric);
    if (len >= min_residual * scale && len >= 1e-10) {
      frame.vectors.push_back(w / len);
      picked.push_back(k);
    }
  }
  if (frame.size() < count)
    throw Error(ErrorCode::FrameExtensionFailure,
                "only " + std::to_string(frame.size()) + " of " + std::to_string(count) +
                    " projected coordinate fields are independent");
  if (chosen) *chosen = picked;
  return frame;
}

KernelSplit kernel_split(const Mat& map, const Mat& metric) {
  KernelSplit split;
  const int dim = static_cast<int>(metric.rows());
  Mat kb = kernel_basis(map);
  split.rank = dim - static_cast<int>(kb.cols());
  Mat pk = orthogonal_projector(kb, metric);
  Mat pc = Mat::Identity(dim, dim) - pk;
  split.kernel = greedy_frame(pk, metric, static_cast<int>(kb.cols()), FrameLabel::vertical, nullptr, 1e-8);
  split.complement = greedy_frame(pc, metric, split.rank, FrameLabel::horizontal, nullptr, 1e-8);
  return split;
}

Vec project(const Vec& v, const Frame& frame, const Mat& metric) {
  Vec out = Vec::Zero(v.size());
  for (const Vec& e : frame.vectors) out += inner(v, e, metric) * e;
  return out;
}

Mat rotation_with_first(const Vec& first) {
  const int n = static_cast<int>(first.size());
  std::vector<Vec> rows;
  double len = first.norm();
  if (len < 1e-12) throw Error(ErrorCode::DegenerateInput, "designated vector is zero");
  rows.push_back(first / len);
  for (int k = 0; k < n && static_cast<int>(rows.size()) < n; ++k) {
    Vec w = Vec::Unit(n, k);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& e : rows) w -= w.dot(e) * e;
    if (w.norm() > 1e-6) rows.push_back(w / w.norm());
  }
  Mat out(n, n);
  for (int i = 0; i < n; ++i) out.row(i) = rows[static_cast<std::size_t>(i)].transpose();
  return out;
}

}  // namespace riemkit
