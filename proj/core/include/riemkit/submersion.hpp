#pragma once

#include "riemkit/fields.hpp"
#include "riemkit/smooth_map.hpp"

#include <vector>

namespace riemkit {

using SubmersionProblem = SmoothMap;

struct OneillProperties {
  double A_antisymmetry = 0.0;  // |A_X Y + A_Y X|, X, Y horizontal
  double T_symmetry = 0.0;      // |T_U V - T_V U|, U, V vertical
  double T_skew = 0.0;          // |g(T_U E, F) + g(T_U F, E)|
  double A_skew = 0.0;          // |g(A_X E, F) + g(A_X F, E)|

  double worst() const;
};

// One relation of the sign audit: L = I + s * C over sampled index tuples.
struct RelationAudit {
  int sign = 1;
  bool determined = false;
  double residual_plus = 0.0;
  double residual_minus = 0.0;
  double scale = 1.0;
  int tuples = 0;

  double residual() const { return sign > 0 ? residual_plus : residual_minus; }
};

struct SignProfile {
  RelationAudit vertical;    // fiber relation
  RelationAudit horizontal;  // horizontal relation
  RelationAudit mixed;       // mixed relation

  int s23() const { return vertical.sign; }
  int s24() const { return horizontal.sign; }
  int s25() const { return mixed.sign; }
};

struct SubmersionAnalysis {
  Vec point;
  int n = 0;  // fiber dimension
  int r = 0;  // horizontal dimension
  Frame vertical;
  Frame horizontal;

  std::vector<double> T_comp;  // T_ij^t at (i*n + j)*r + t
  std::vector<double> A_comp;  // A_ij^a at (i*r + j)*n + a
  Vec H;                       // mean curvature vector, coordinates
  double H_norm_sq = 0.0;
  double delta_N = 0.0;
  double norm_TV_sq = 0.0;
  double norm_AH_sq = 0.0;

  // curvature arrays in the frames, index (a,b,c,d) at ((a*k + b)*k + c)*k + d
  std::vector<double> R_vert_M1;
  std::vector<double> R_vert_ker;  // intrinsic fiber curvature
  std::vector<double> R_hor_M1;
  std::vector<double> R_hor_perp;  // target curvature of the F* images
  double mixed_sum = 0.0;

  double tau_V_ker = 0.0, tau_V_M1 = 0.0, tau_H_perp = 0.0, tau_H_M1 = 0.0;
  double ric_V_ker = 0.0, ric_V_M1 = 0.0, ric_H_perp = 0.0, ric_H_M1 = 0.0;

  OneillProperties properties;
  double isometry_residual = 0.0;
  bool fiber_curvature_computed = false;
  SignProfile sign_profile;

  StructureAt structure;  // source structure at the point, if any
  Mat metric;             // g1 at the point

  double T(int i, int j, int t) const { return T_comp[static_cast<std::size_t>((i * n + j) * r + t)]; }
  double A(int i, int j, int a) const { return A_comp[static_cast<std::size_t>((i * r + j) * n + a)]; }
};

struct SubmersionOptions {
  bool fiber_curvature = true;  // nested differences on the vertical frame
  bool mixed_audit = true;
  int max_mixed_tuples = 16;
  double outer_step = 1e-3;     // base step for nested derivatives
};

// Pointwise machinery with frame indices frozen at the base point so the
// projected coordinate frames extend smoothly.
class SubmersionGeometry {
 public:
  SubmersionGeometry(const SubmersionProblem& prob, const Vec& base_point, double outer_step = 1e-3);

  const SubmersionProblem& problem() const { return *prob_; }
  int n() const { return n_; }
  int r() const { return r_; }

  Mat vertical_projector(const Vec& q) const;
  Field vertical_frame(int a) const;
  Field horizontal_frame(int t) const;

  // Levi-Civita derivative of the field w along x at q
  Vec nabla(const Field& w, const Vec& x, const Vec& q, double step = 1e-4) const;

  Vec T(const Field& e, const Field& f, const Vec& q) const;
  Vec A(const Field& e, const Field& f, const Vec& q) const;
  // (nabla_X T)(U, V) and (nabla_X A)(U, V)
  Vec nabla_T(const Field& x, const Field& u, const Field& v, const Vec& q) const;
  Vec nabla_A(const Field& x, const Field& u, const Field& v, const Vec& q) const;

  // intrinsic curvature of the fibers in the vertical frame at q
  std::vector<double> fiber_curvature(const Vec& q) const;
  double delta_N(const Vec& q) const;

 private:
  const SubmersionProblem* prob_;
  int n_ = 0, r_ = 0;
  std::vector<int> vertical_idx_, horizontal_idx_;
  double outer_step_;
};

// Throws RankDeficiency, FrameExtensionFailure, BadParams (not isometric on
// the horizontal space) or AuditFailure.
SubmersionAnalysis analyze_submersion(const SubmersionProblem& prob, const Vec& p,
                                      const SubmersionOptions& opts = {});

// Re-expresses the analysis in frames whose first vectors are the given
// coordinate vectors (projected and normalized); scalar block recomputed.
SubmersionAnalysis designate(const SubmersionAnalysis& a, const Vec* v1, const Vec* h1);

void fill_scalar_block(SubmersionAnalysis& a);

// sum_t sum_{j>=2} (T_11 T_jj - T_1j^2)
double fiber_correction(const SubmersionAnalysis& a);
// sum_a sum_{j>=2} (A_1j^a)^2
double horizontal_correction(const SubmersionAnalysis& a);

// Both sides of the algebraic identity
// sum T^2 = n^2|H|^2/2 + 1/2 sum_t (T11 - T22 - ... - Tnn)^2 + 2 sum_t sum_{j>=2} T1j^2
//           - 2 sum_t sum_{2<=i<j} (Tii Tjj - Tij^2)
struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const;
};
IdentitySides identity_sum_of_squares(const std::vector<double>& comp, int n, int r);

RelationAudit audit_vertical_relation(const SubmersionAnalysis& a);
RelationAudit audit_horizontal_relation(const SubmersionAnalysis& a);
RelationAudit audit_mixed_relation(const SubmersionGeometry& geo, const SubmersionAnalysis& a, int max_tuples);

// Merges per-point audits; a sign flip between determined points throws AuditFailure.
SignProfile merge_profiles(const std::vector<SignProfile>& profiles);

}  // namespace riemkit
