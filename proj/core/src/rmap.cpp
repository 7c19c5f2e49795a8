#include "riemkit/rmap.hpp"

#include "riemkit/errors.hpp"

#include <cmath>

namespace riemkit {

namespace {

std::size_t idx4(int k, int a, int b, int c, int d) {
  return static_cast<std::size_t>(((a * k + b) * k + c) * k + d);
}

std::vector<double> rotate4(const std::vector<double>& src, const Mat& O) {
  const int k = static_cast<int>(O.rows());
  std::vector<double> out(src.size(), 0.0);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c)
        for (int d = 0; d < k; ++d) {
          double s = 0.0;
          for (int w = 0; w < k; ++w)
            for (int x = 0; x < k; ++x)
              for (int y = 0; y < k; ++y)
                for (int z = 0; z < k; ++z) s += O(a, w) * O(b, x) * O(c, y) * O(d, z) * src[idx4(k, w, x, y, z)];
          out[idx4(k, a, b, c, d)] = s;
        }
  return out;
}

}  // namespace

IdentitySides identity_eq5(const std::vector<double>& B_comp, int r, int q) {
  return identity_sum_of_squares(B_comp, r, q);
}

double gauss_correction(const MapAnalysis& a) {
  double s = 0.0;
  for (int i = 1; i < a.r; ++i)
    for (int al = 0; al < a.q; ++al) s += a.B(0, 0, al) * a.B(i, i, al) - a.B(0, i, al) * a.B(0, i, al);
  return s;
}

void fill_map_scalars(MapAnalysis& a) {
  const int r = a.r;
  a.ric_H = a.ric_R = a.tau_H = a.tau_R = 0.0;
  for (int i = 0; i < r; ++i) {
    a.ric_H += a.R_hor_M1[idx4(r, i, 0, 0, i)];
    a.ric_R += a.R_range_M2[idx4(r, i, 0, 0, i)];
    for (int j = i + 1; j < r; ++j) {
      a.tau_H += a.R_hor_M1[idx4(r, i, j, j, i)];
      a.tau_R += a.R_range_M2[idx4(r, i, j, j, i)];
    }
  }
  a.trace_B = Vec::Zero(a.m2);
  for (int i = 0; i < r; ++i) a.trace_B += a.B_vec[static_cast<std::size_t>(i * r + i)];
  a.norm_traceB_sq = inner(a.trace_B, a.trace_B, a.target_metric);
  a.norm_B_sq = 0.0;
  for (const Vec& b : a.B_vec) a.norm_B_sq += inner(b, b, a.target_metric);
}

MapAnalysis analyze_map(const RiemannianMapProblem& prob, const Vec& p) {
  const SmoothMap& f = prob.map;
  MapAnalysis a;
  a.point = p;
  a.m1 = f.source_dim();
  a.m2 = f.target_dim();
  a.r = prob.declared_rank;
  const int r = a.r;
  if (r < 1 || r >= std::min(a.m1, a.m2))
    throw Error(ErrorCode::BadParams, "declared rank must satisfy 1 <= r < min(m1, m2)");
  a.q = a.m2 - r;

  MapJetAt jet = map_jet(f, p);
  a.image = jet.value;
  int rank = numerical_rank(jet.jacobian);
  if (rank != r)
    throw Error(ErrorCode::RankDeficiency,
                "differential has rank " + std::to_string(rank) + ", declared " + std::to_string(r));

  CurvatureData src = curvature_at(f.source, p);
  CurvatureData tgt = curvature_at(f.target, jet.value);
  a.source_metric = src.metric;
  a.target_metric = tgt.metric;
  a.target_structure = structure_at(f.target, jet.value);

  Mat kb = kernel_basis(jet.jacobian);
  Mat pk = orthogonal_projector(kb, src.metric);
  Mat ph = Mat::Identity(a.m1, a.m1) - pk;
  a.kernel = greedy_frame(pk, src.metric, a.m1 - r, FrameLabel::vertical, nullptr);
  a.horizontal = greedy_frame(ph, src.metric, r, FrameLabel::horizontal, nullptr);

  a.range.label = FrameLabel::range;
  for (int i = 0; i < r; ++i) a.range.vectors.push_back(jet.jacobian * a.horizontal[i]);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      a.isometry_residual = std::max(a.isometry_residual,
                                     std::fabs(inner(a.range[i], a.range[j], tgt.metric) - (i == j ? 1.0 : 0.0)));
  if (a.isometry_residual > 1e-6)
    throw Error(ErrorCode::BadParams,
                "map is not isometric on the horizontal space (residual " + std::to_string(a.isometry_residual) + ")");

  Mat range_basis = a.range.matrix(a.m2);
  Mat prange = orthogonal_projector(range_basis, tgt.metric);
  Mat qperp = Mat::Identity(a.m2, a.m2) - prange;
  a.range_perp = greedy_frame(qperp, tgt.metric, a.q, FrameLabel::range_perp, nullptr);

  a.B_vec.assign(static_cast<std::size_t>(r * r), Vec());
  a.B_comp.assign(static_cast<std::size_t>(r * r * a.q), 0.0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Vec b = map_second_fundamental_form(jet, src, tgt.gamma, a.horizontal[i], a.horizontal[j]);
      a.B_vec[static_cast<std::size_t>(i * r + j)] = b;
      a.range_perp_residual = std::max(a.range_perp_residual, norm(Vec(prange * b), tgt.metric));
      for (int al = 0; al < a.q; ++al)
        a.B_comp[static_cast<std::size_t>((i * r + j) * a.q + al)] = inner(b, a.range_perp[al], tgt.metric);
    }
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      a.symmetry_residual = std::max(
          a.symmetry_residual,
          (a.B_vec[static_cast<std::size_t>(i * r + j)] - a.B_vec[static_cast<std::size_t>(j * r + i)]).cwiseAbs().maxCoeff());

  a.R_hor_M1.assign(static_cast<std::size_t>(r * r * r * r), 0.0);
  a.R_range_M2.assign(static_cast<std::size_t>(r * r * r * r), 0.0);
  std::vector<double> L, I, C;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l) {
          double r1 = src.form(a.horizontal[i], a.horizontal[j], a.horizontal[k], a.horizontal[l]);
          double r2 = tgt.form(a.range[i], a.range[j], a.range[k], a.range[l]);
          a.R_hor_M1[idx4(r, i, j, k, l)] = r1;
          a.R_range_M2[idx4(r, i, j, k, l)] = r2;
          const Vec& b13 = a.B_vec[static_cast<std::size_t>(i * r + k)];
          const Vec& b24 = a.B_vec[static_cast<std::size_t>(j * r + l)];
          const Vec& b14 = a.B_vec[static_cast<std::size_t>(i * r + l)];
          const Vec& b23 = a.B_vec[static_cast<std::size_t>(j * r + k)];
          L.push_back(r2);
          I.push_back(r1);
          C.push_back(inner(b13, b24, tgt.metric) - inner(b14, b23, tgt.metric));
        }
  // same sign decision as the submersion relations
  {
    RelationAudit out;
    out.tuples = static_cast<int>(L.size());
    double big = 0.0;
    for (std::size_t k = 0; k < L.size(); ++k) {
      out.residual_plus = std::max(out.residual_plus, std::fabs(L[k] - I[k] - C[k]));
      out.residual_minus = std::max(out.residual_minus, std::fabs(L[k] - I[k] + C[k]));
      big = std::max({big, std::fabs(L[k]), std::fabs(I[k]), std::fabs(C[k])});
    }
    out.scale = 1.0 + big;
    double tol = 1e-6 * out.scale;
    bool plus = out.residual_plus <= tol, minus = out.residual_minus <= tol;
    if (!plus && !minus)
      throw Error(ErrorCode::AuditFailure, "Gauss equation fails for both signs (residuals " +
                                               std::to_string(out.residual_plus) + ", " +
                                               std::to_string(out.residual_minus) + ")");
    out.determined = plus != minus;
    out.sign = plus ? 1 : -1;
    a.gauss = out;
  }
  fill_map_scalars(a);
  return a;
}

MapAnalysis designate_map(const MapAnalysis& a, const Vec& x) {
  MapAnalysis out = a;
  const int r = a.r;
  Vec c(r);
  for (int i = 0; i < r; ++i) c(i) = inner(x, a.horizontal[i], a.source_metric);
  Mat O = rotation_with_first(c);
  for (int i = 0; i < r; ++i) {
    Vec h = Vec::Zero(a.m1), im = Vec::Zero(a.m2);
    for (int k = 0; k < r; ++k) {
      h += O(i, k) * a.horizontal[k];
      im += O(i, k) * a.range[k];
    }
    out.horizontal.vectors[static_cast<std::size_t>(i)] = h;
    out.range.vectors[static_cast<std::size_t>(i)] = im;
  }
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Vec b = Vec::Zero(a.m2);
      for (int x1 = 0; x1 < r; ++x1)
        for (int y1 = 0; y1 < r; ++y1) b += O(i, x1) * O(j, y1) * a.B_vec[static_cast<std::size_t>(x1 * r + y1)];
      out.B_vec[static_cast<std::size_t>(i * r + j)] = b;
      for (int al = 0; al < a.q; ++al)
        out.B_comp[static_cast<std::size_t>((i * r + j) * a.q + al)] = inner(b, a.range_perp[al], a.target_metric);
    }
  out.R_hor_M1 = rotate4(a.R_hor_M1, O);
  out.R_range_M2 = rotate4(a.R_range_M2, O);
  fill_map_scalars(out);
  return out;
}

}  // namespace riemkit
