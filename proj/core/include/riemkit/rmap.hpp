#pragma once

#include "riemkit/smooth_map.hpp"
#include "riemkit/submersion.hpp"

#include <vector>

namespace riemkit {

struct RiemannianMapProblem {
  SmoothMap map;
  int declared_rank = 0;
};

struct MapAnalysis {
  Vec point;
  Vec image;
  int m1 = 0, m2 = 0, r = 0;
  int q = 0;  // m2 - r, codimension of the range
  Frame kernel;
  Frame horizontal;
  Frame range;       // F* h_i
  Frame range_perp;  // V_alpha

  std::vector<Vec> B_vec;      // (nabla F*)(h_i, h_j) at i*r + j, target coordinates
  std::vector<double> B_comp;  // B_ij^alpha at (i*r + j)*q + alpha
  Vec trace_B;
  double norm_traceB_sq = 0.0;
  double norm_B_sq = 0.0;

  std::vector<double> R_hor_M1;   // R1 on the horizontal frame
  std::vector<double> R_range_M2; // R2 on the range frame
  double ric_H = 0.0;  // at h_1
  double ric_R = 0.0;  // at F* h_1
  double tau_H = 0.0;
  double tau_R = 0.0;

  double isometry_residual = 0.0;
  double range_perp_residual = 0.0;
  double symmetry_residual = 0.0;
  RelationAudit gauss;

  Mat source_metric;
  Mat target_metric;
  StructureAt target_structure;

  double B(int i, int j, int a) const { return B_comp[static_cast<std::size_t>((i * r + j) * q + a)]; }
};

// Throws BadParams (rank bound, isometry), RankDeficiency (rank differs from
// the declared one), FrameExtensionFailure, AuditFailure.
MapAnalysis analyze_map(const RiemannianMapProblem& prob, const Vec& p);

// Analysis re-expressed with the horizontal frame starting at x (coordinates).
MapAnalysis designate_map(const MapAnalysis& a, const Vec& x);

void fill_map_scalars(MapAnalysis& a);

// sum_{i>=2} (<B_11, B_ii> - |B_1i|^2)
double gauss_correction(const MapAnalysis& a);

// Both sides of the sum-of-squares identity for B
IdentitySides identity_eq5(const std::vector<double>& B_comp, int r, int q);

}  // namespace riemkit
