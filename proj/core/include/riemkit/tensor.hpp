#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace riemkit {

// Dimensions stay at or below this everywhere in the library.
inline constexpr int max_dim = 8;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class FrameLabel { vertical, horizontal, range, range_perp, generic };

const char* frame_label_name(FrameLabel label);

// Orthonormal list of vectors in chart coordinates, tagged with the
// distribution they span.
struct Frame {
  std::vector<Vec> vectors;
  FrameLabel label = FrameLabel::generic;

  int size() const { return static_cast<int>(vectors.size()); }
  const Vec& operator[](int i) const { return vectors[static_cast<std::size_t>(i)]; }
  // vectors as columns
  Mat matrix(int ambient_dim) const;
};

double inner(const Vec& a, const Vec& b, const Mat& metric);
double norm(const Vec& a, const Mat& metric);

// Classical Gram-Schmidt with one re-orthogonalization pass, input order kept.
// Throws DegenerateInput when a residual norm drops below 1e-10.
Frame gram_schmidt(const std::vector<Vec>& vecs, const Mat& metric,
                   FrameLabel label = FrameLabel::generic);

struct KernelSplit {
  Frame kernel;
  Frame complement;
  int rank = 0;
};

// Kernel and its metric-orthogonal complement for a linear map (rows = target).
// Singular values below 1e-9 * sigma_max count as zero.
KernelSplit kernel_split(const Mat& map, const Mat& metric);

// Numerical rank with the same relative threshold.
int numerical_rank(const Mat& map, double rel_threshold = 1e-9);

// sum_i g(v, e_i) e_i
Vec project(const Vec& v, const Frame& frame, const Mat& metric);

// Metric-orthogonal projector onto the column span of basis.
Mat orthogonal_projector(const Mat& basis, const Mat& metric);

// Orthonormal basis of the kernel of map (Euclidean), as columns.
Mat kernel_basis(const Mat& map, double rel_threshold = 1e-9);

// Runs Gram-Schmidt on projector * e_k in coordinate order and keeps the
// first `count` directions whose residual is at least min_residual * |e_k|.
// Chosen coordinate indices are written to `chosen`.
Frame greedy_frame(const Mat& projector, const Mat& metric, int count, FrameLabel label,
                   std::vector<int>* chosen, double min_residual = 1e-3);

// Same as greedy_frame but with a fixed index choice; used to extend a frame
// smoothly to nearby points.
Frame frame_from_indices(const Mat& projector, const Mat& metric, const std::vector<int>& indices,
                         FrameLabel label);

// Orthonormal (Euclidean) rows whose first row is `first` normalized, completed
// in coordinate order.
Mat rotation_with_first(const Vec& first);

}  // namespace riemkit
