#pragma once

#include "riemkit/geometry.hpp"
#include "riemkit/rmap.hpp"
#include "riemkit/submersion.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace riemkit {

enum class Relation { le, ge };

const char* relation_symbol(Relation rel);

struct Verdict {
  std::string theorem_id;
  std::string variant;  // "V", "H", "VH", a table row, or empty
  int point_index = 0;
  Vec point;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs
  Relation relation = Relation::le;
  double tolerance = 0.0;
  bool holds = false;
  bool equality = false;
  std::optional<bool> conditions_met;
  std::vector<std::pair<std::string, double>> details;
  std::vector<std::string> notes;
};

// 1e-6 * (1 + |lhs| + |rhs|)
double equality_tolerance(double lhs, double rhs);

// Fills slack, tolerance, holds and equality. The testing hook offset is
// applied here, pushing rhs against the relation.
Verdict make_verdict(std::string theorem_id, std::string variant, double lhs, double rhs, Relation rel,
                     std::optional<bool> conditions_met);

enum class ClassKind { invariant, anti_invariant, semi_invariant, slant, semi_slant, hemi_slant, generic };

const char* class_kind_name(ClassKind kind);
ClassKind class_kind_from_name(const std::string& name);

enum class XiPosition { not_applicable, vertical, horizontal, range, range_perp, mixed };

const char* xi_position_name(XiPosition pos);

struct StructureNorms {
  double P_sq = 0.0;    // sum g(J v_j, h_i)^2
  double Ph1_sq = 0.0;  // sum_{j>=2} g(J h_1, h_j)^2
  double Qv1_sq = 0.0;  // sum_{j>=2} g(J v_1, v_j)^2
  double PFX_sq = 0.0;  // sum_{j>=2} g2(F* h_1, J F* h_j)^2, map case
  double eta_v1_sq = 0.0;
  double eta_h1_sq = 0.0;
  double eta_FX_sq = 0.0;
};

struct StructureClass {
  ClassKind kind = ClassKind::generic;
  std::optional<double> theta;
  double max_deviation = 0.0;  // spread of cos(theta) over the samples
  StructureNorms norms;
  XiPosition xi_position = XiPosition::not_applicable;
  // for the split classes: whether v_1 (or F* X) lies in D1
  std::optional<bool> first_in_d1;
  ClassKind d1_kind = ClassKind::generic;
  ClassKind d2_kind = ClassKind::generic;
  std::vector<std::string> notes;
};

// D1/D2 are given as index lists into the vertical (submersion) or range
// (map) frame of the analysis.
struct DistributionSplit {
  std::vector<int> d1;
  std::vector<int> d2;
  bool empty() const { return d1.empty() || d2.empty(); }
};

inline constexpr double class_tolerance = 1e-6;

StructureNorms submersion_norms(const SubmersionAnalysis& a);
StructureNorms map_norms(const MapAnalysis& a);

// Throws StructureMissing when the relevant manifold carries no J or phi.
StructureClass classify_submersion_structure(const SubmersionAnalysis& a, const DistributionSplit& split = {},
                                             int first_index = 0, std::uint64_t seed = 7);
StructureClass classify_map_structure(const MapAnalysis& a, const DistributionSplit& split = {},
                                      int first_index = 0, std::uint64_t seed = 7);

// Ambient model values entering the three submersion inequalities:
// Ric_V(v_1), Ric_H(h_1) and sum_ij R(v_j, h_i, h_i, v_j).
struct ModelBlock {
  double ric_v = 0.0;
  double ric_h = 0.0;
  double mixed = 0.0;
};

ModelBlock computed_model(const SubmersionAnalysis& a);
// Throws StructureMissing / UnsupportedClass.
ModelBlock complex_model(const StructureClass& cls, const SpaceFormSpec& spec, int n, int r);
ModelBlock sasakian_model(const StructureClass& cls, const SpaceFormSpec& spec, int n, int r);

// Class constants of the structured submersion theorems; mixed is the
// displayed VH constant minus the V and H constants.
// Throws UnsupportedClass for generic or for a split class without v_1 placement.
ModelBlock structured_submersion_rhs(const StructureClass& cls, const SpaceFormSpec& spec, int n, int r);

// The V, H, VH verdicts for a model block under the given sign profile.
std::array<Verdict, 3> submersion_verdicts(const SubmersionAnalysis& a, const SignProfile& profile,
                                           const ModelBlock& model, const std::array<std::string, 3>& ids,
                                           const std::array<std::string, 3>& variants);

Verdict verify_GFCRV(const SubmersionAnalysis& a, const SignProfile& profile);
Verdict verify_GFCRH(const SubmersionAnalysis& a, const SignProfile& profile);
Verdict verify_GFCRVH(const SubmersionAnalysis& a, const SignProfile& profile);
std::array<Verdict, 3> verify_CRI_GCSF(const SubmersionAnalysis& a, const SignProfile& profile,
                                       const StructureClass& cls, const SpaceFormSpec& spec);
std::array<Verdict, 3> verify_CRI_GSSF(const SubmersionAnalysis& a, const SignProfile& profile,
                                       const StructureClass& cls, const SpaceFormSpec& spec);
std::array<Verdict, 3> verify_STRUCT_SUB(const SubmersionAnalysis& a, const SignProfile& profile,
                                         const StructureClass& cls, const SpaceFormSpec& spec);

// Equality template B11 = 3 mu V1, B22 = mu V1, B12 = mu V2 up to rotations of
// the horizontal and normal frames.
struct EqualityPattern {
  std::optional<double> mu;
  bool matched = false;
  double residual = 0.0;
  double horizontal_angle = 0.0;
  double normal_angle = 0.0;
  bool reflected = false;
  std::string detail;
};

// B_comp laid out as (i*r + j)*q + alpha.
EqualityPattern classify_equality_pattern(const std::vector<double>& B_comp, int r, int q);

// gauss_sign is the audited sign of the Gauss relation.
Verdict verify_RM_CRI(const MapAnalysis& a, int gauss_sign = 1);
std::pair<Verdict, EqualityPattern> verify_RM_ICRI(const MapAnalysis& a, int gauss_sign = 1);

struct CorollaryInput {
  SpaceFormKind kind = SpaceFormKind::real;
  double c = 0.0;
  double alpha = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;  // generalized rows only
  int r = 1;
  double PFX_sq = 0.0;
  double eta_FX_sq = 0.0;
  bool xi_in_range = false;
  bool improved = false;
  double traceB_sq = 0.0;
  int gauss_sign = 1;
};

// (r-1)/(4r) when improved, else 1/4.
double extrinsic_coefficient(int r, bool improved);

// Row-by-row printed corollary formulas (T_S, T_K, ... and IT_*).
double corollary_rhs(const CorollaryInput& in);
// T_GC with the row's (c1, c2[, c3]) substituted.
double generalized_corollary_rhs(const CorollaryInput& in, const SpaceFormSpec& constants);

// Structured map bound (T_I, T_AI and the slant variants).
// Throws UnsupportedClass.
double structured_map_rhs(const StructureClass& cls, const SpaceFormSpec& spec, int r, double traceB_sq,
                          bool improved, int gauss_sign = 1);

std::vector<Verdict> verify_COR(const MapAnalysis& a, int gauss_sign, const SpaceFormSpec& spec,
                                const StructureClass* cls, bool improved);

// ICRI rhs does not exceed CRI rhs (reversed under a flipped Gauss sign).
bool monotone_consistent(const Verdict& cri, const Verdict& icri, int gauss_sign = 1);

namespace testing {
// Shifts every rhs assembled by make_verdict against its relation.
void set_rhs_corruption(double offset);
double rhs_corruption();
}  // namespace testing

}  // namespace riemkit
