#include "riemkit/inequality.hpp"

#include "riemkit/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <random>

namespace riemkit {

namespace {

std::atomic<double> g_rhs_corruption{0.0};

constexpr double pi = 3.14159265358979323846;

// condition checks compare squared-order quantities against the equality
// tolerance, so component residuals get a looser bound
double condition_tolerance(double scale) { return 1e-5 * (1.0 + scale); }

}  // namespace

namespace testing {
void set_rhs_corruption(double offset) { g_rhs_corruption.store(offset); }
double rhs_corruption() { return g_rhs_corruption.load(); }
}  // namespace testing

const char* relation_symbol(Relation rel) { return rel == Relation::le ? "<=" : ">="; }

double equality_tolerance(double lhs, double rhs) { return 1e-6 * (1.0 + std::abs(lhs) + std::abs(rhs)); }

Verdict make_verdict(std::string theorem_id, std::string variant, double lhs, double rhs, Relation rel,
                     std::optional<bool> conditions_met) {
  Verdict v;
  v.theorem_id = std::move(theorem_id);
  v.variant = std::move(variant);
  double shift = testing::rhs_corruption();
  if (shift != 0.0) {
    rhs += rel == Relation::ge ? shift : -shift;
    v.notes.push_back("rhs corrupted by testing hook");
  }
  v.lhs = lhs;
  v.rhs = rhs;
  v.relation = rel;
  v.slack = lhs - rhs;
  v.tolerance = equality_tolerance(lhs, rhs);
  v.holds = rel == Relation::ge ? v.slack >= -v.tolerance : v.slack <= v.tolerance;
  v.equality = std::abs(v.slack) <= v.tolerance;
  v.conditions_met = conditions_met;
  return v;
}

const char* class_kind_name(ClassKind kind) {
  switch (kind) {
    case ClassKind::invariant: return "invariant";
    case ClassKind::anti_invariant: return "anti_invariant";
    case ClassKind::semi_invariant: return "semi_invariant";
    case ClassKind::slant: return "slant";
    case ClassKind::semi_slant: return "semi_slant";
    case ClassKind::hemi_slant: return "hemi_slant";
    case ClassKind::generic: return "generic";
  }
  return "generic";
}

ClassKind class_kind_from_name(const std::string& name) {
  for (ClassKind k : {ClassKind::invariant, ClassKind::anti_invariant, ClassKind::semi_invariant, ClassKind::slant,
                      ClassKind::semi_slant, ClassKind::hemi_slant, ClassKind::generic})
    if (name == class_kind_name(k)) return k;
  throw Error(ErrorCode::UnsupportedClass, "unknown structure class '" + name + "'");
}

const char* xi_position_name(XiPosition pos) {
  switch (pos) {
    case XiPosition::not_applicable: return "n/a";
    case XiPosition::vertical: return "vertical";
    case XiPosition::horizontal: return "horizontal";
    case XiPosition::range: return "range";
    case XiPosition::range_perp: return "range_perp";
    case XiPosition::mixed: return "mixed";
  }
  return "n/a";
}

// ---------------------------------------------------------------------------
// structure norms and classification

StructureNorms submersion_norms(const SubmersionAnalysis& a) {
  StructureNorms out;
  if (a.structure.kind == StructureKind::none) return out;
  const Mat& J = a.structure.tensor;
  const Mat& g = a.metric;
  const int n = a.n, r = a.r;
  if (n > 0) {
    Vec Jv1 = J * a.vertical[0];
    for (int j = 1; j < n; ++j) out.Qv1_sq += std::pow(inner(Jv1, a.vertical[j], g), 2);
  }
  if (r > 0) {
    Vec Jh1 = J * a.horizontal[0];
    for (int j = 1; j < r; ++j) out.Ph1_sq += std::pow(inner(Jh1, a.horizontal[j], g), 2);
  }
  for (int j = 0; j < n; ++j) {
    Vec Jv = J * a.vertical[j];
    for (int i = 0; i < r; ++i) out.P_sq += std::pow(inner(Jv, a.horizontal[i], g), 2);
  }
  if (a.structure.kind == StructureKind::contact) {
    if (n > 0) out.eta_v1_sq = std::pow(a.structure.eta.dot(a.vertical[0]), 2);
    if (r > 0) out.eta_h1_sq = std::pow(a.structure.eta.dot(a.horizontal[0]), 2);
  }
  return out;
}

StructureNorms map_norms(const MapAnalysis& a) {
  StructureNorms out;
  if (a.target_structure.kind == StructureKind::none || a.r == 0) return out;
  const Mat& J = a.target_structure.tensor;
  const Mat& g2 = a.target_metric;
  for (int j = 1; j < a.r; ++j) out.PFX_sq += std::pow(inner(a.range[0], J * a.range[j], g2), 2);
  if (a.target_structure.kind == StructureKind::contact) out.eta_FX_sq = std::pow(a.target_structure.eta.dot(a.range[0]), 2);
  return out;
}

namespace {

struct DistClass {
  ClassKind kind = ClassKind::generic;
  std::optional<double> theta;
  double deviation = 0.0;
  int samples = 0;
};

// Samples unit vectors in span(sub) (minus xi when given) and compares J v
// against the full distribution `whole`.
DistClass classify_distribution(const std::vector<Vec>& sub, const Frame& whole, const Mat& J, const Mat& g,
                                const Vec* xi, std::uint64_t seed) {
  DistClass out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double max_out = 0.0, max_in = 0.0, min_cos = 2.0, max_cos = -1.0, sum_cos = 0.0;
  for (int s = 0; s < 64; ++s) {
    Vec v = Vec::Zero(g.rows());
    for (const Vec& e : sub) v += gauss(rng) * e;
    if (xi) v -= inner(v, *xi, g) * *xi;
    double nv = norm(v, g);
    if (nv < 1e-8) continue;
    v /= nv;
    Vec Jv = J * v;
    double nj = norm(Jv, g);
    if (nj < 1e-12) continue;
    Vec inside = project(Jv, whole, g);
    double in = norm(inside, g) / nj;
    double outp = norm(Jv - inside, g) / nj;
    max_in = std::max(max_in, in);
    max_out = std::max(max_out, outp);
    min_cos = std::min(min_cos, in);
    max_cos = std::max(max_cos, in);
    sum_cos += in;
    ++out.samples;
  }
  if (out.samples == 0) return out;
  out.deviation = max_cos - min_cos;
  if (max_out <= class_tolerance) {
    out.kind = ClassKind::invariant;
    out.theta = 0.0;
  } else if (max_in <= class_tolerance) {
    out.kind = ClassKind::anti_invariant;
    out.theta = pi / 2;
  } else if (out.deviation <= class_tolerance) {
    out.kind = ClassKind::slant;
    out.theta = std::acos(std::clamp(sum_cos / out.samples, 0.0, 1.0));
  }
  return out;
}

std::vector<Vec> pick(const Frame& f, const std::vector<int>& idx) {
  std::vector<Vec> out;
  for (int i : idx) {
    if (i < 0 || i >= f.size()) throw Error(ErrorCode::BadParams, "distribution index out of range");
    out.push_back(f[i]);
  }
  return out;
}

void combine_split(StructureClass& cls, const DistClass& c1, const DistClass& c2) {
  cls.d1_kind = c1.kind;
  cls.d2_kind = c2.kind;
  if (c1.kind == ClassKind::invariant && c2.kind == ClassKind::anti_invariant) {
    cls.kind = ClassKind::semi_invariant;
  } else if (c1.kind == ClassKind::invariant && c2.kind == ClassKind::slant) {
    cls.kind = ClassKind::semi_slant;
    cls.theta = c2.theta;
  } else if (c1.kind == ClassKind::anti_invariant && c2.kind == ClassKind::slant) {
    cls.kind = ClassKind::hemi_slant;
    cls.theta = c2.theta;
  } else {
    cls.notes.push_back(std::string("declared split does not match a mixed class (D1 ") + class_kind_name(c1.kind) +
                        ", D2 " + class_kind_name(c2.kind) + ")");
  }
  cls.max_deviation = std::max(c1.deviation, c2.deviation);
}

XiPosition locate_xi(const Vec& xi, const Frame& inside, const Mat& g, XiPosition in, XiPosition out) {
  double part = norm(project(xi, inside, g), g) / norm(xi, g);
  if (part >= 1.0 - class_tolerance) return in;
  if (part <= class_tolerance) return out;
  return XiPosition::mixed;
}

StructureClass classify_common(const Frame& dist, const Frame& complement, const StructureAt& s, const Mat& g,
                               const DistributionSplit& split, int first_index, std::uint64_t seed,
                               XiPosition in_label, XiPosition out_label) {
  (void)complement;
  StructureClass cls;
  if (s.kind == StructureKind::none)
    throw Error(ErrorCode::StructureMissing, "no complex or contact structure to classify against");
  const Vec* xi = nullptr;
  if (s.kind == StructureKind::contact) {
    cls.xi_position = locate_xi(s.xi, dist, g, in_label, out_label);
    if (cls.xi_position == in_label) xi = &s.xi;
    if (cls.xi_position == XiPosition::mixed)
      cls.notes.push_back("xi is neither inside nor orthogonal to the distribution; class not applicable");
  }
  if (!split.empty()) {
    DistClass c1 = classify_distribution(pick(dist, split.d1), dist, s.tensor, g, xi, seed);
    DistClass c2 = classify_distribution(pick(dist, split.d2), dist, s.tensor, g, xi, seed + 1);
    combine_split(cls, c1, c2);
    bool in1 = std::find(split.d1.begin(), split.d1.end(), first_index) != split.d1.end();
    bool in2 = std::find(split.d2.begin(), split.d2.end(), first_index) != split.d2.end();
    if (in1 || in2) cls.first_in_d1 = in1;
    if (cls.kind != ClassKind::generic) return cls;
  }
  DistClass whole = classify_distribution(dist.vectors, dist, s.tensor, g, xi, seed);
  if (whole.samples == 0) {
    // only xi spans the distribution; phi kills it
    cls.kind = ClassKind::anti_invariant;
    cls.theta = pi / 2;
    cls.notes.push_back("distribution is spanned by xi alone; reported as anti_invariant");
    return cls;
  }
  if (split.empty() || cls.kind == ClassKind::generic) {
    cls.kind = whole.kind;
    cls.theta = whole.theta;
    cls.max_deviation = whole.deviation;
  }
  return cls;
}

}  // namespace

StructureClass classify_submersion_structure(const SubmersionAnalysis& a, const DistributionSplit& split,
                                             int first_index, std::uint64_t seed) {
  StructureClass cls = classify_common(a.vertical, a.horizontal, a.structure, a.metric, split, first_index, seed,
                                       XiPosition::vertical, XiPosition::horizontal);
  cls.norms = submersion_norms(a);
  return cls;
}

StructureClass classify_map_structure(const MapAnalysis& a, const DistributionSplit& split, int first_index,
                                      std::uint64_t seed) {
  StructureClass cls = classify_common(a.range, a.range_perp, a.target_structure, a.target_metric, split,
                                       first_index, seed, XiPosition::range, XiPosition::range_perp);
  cls.norms = map_norms(a);
  return cls;
}

// ---------------------------------------------------------------------------
// submersion families

ModelBlock computed_model(const SubmersionAnalysis& a) { return {a.ric_V_M1, a.ric_H_M1, a.mixed_sum}; }

namespace {

bool complex_family(const SpaceFormSpec& spec) {
  switch (spec.kind) {
    case SpaceFormKind::real:
    case SpaceFormKind::complex:
    case SpaceFormKind::real_kahler:
    case SpaceFormKind::generalized_complex: return true;
    default: return false;
  }
}

void require_xi_branch(const StructureClass& cls) {
  if (cls.xi_position != XiPosition::vertical && cls.xi_position != XiPosition::horizontal)
    throw Error(ErrorCode::UnsupportedClass, "xi must be vertical or horizontal for the contact branches");
}

}  // namespace

ModelBlock complex_model(const StructureClass& cls, const SpaceFormSpec& spec, int n, int r) {
  if (!complex_family(spec)) throw Error(ErrorCode::UnsupportedClass, "space form is not of complex type");
  const StructureNorms& N = cls.norms;
  return {spec.c1 * (n - 1) + 3 * spec.c2 * N.Qv1_sq, spec.c1 * (r - 1) + 3 * spec.c2 * N.Ph1_sq,
          n * r * spec.c1 + 3 * spec.c2 * N.P_sq};
}

ModelBlock sasakian_model(const StructureClass& cls, const SpaceFormSpec& spec, int n, int r) {
  if (!spec.is_contact()) throw Error(ErrorCode::UnsupportedClass, "space form is not of contact type");
  require_xi_branch(cls);
  const StructureNorms& N = cls.norms;
  ModelBlock m{spec.c1 * (n - 1) + 3 * spec.c2 * N.Qv1_sq, spec.c1 * (r - 1) + 3 * spec.c2 * N.Ph1_sq,
               n * r * spec.c1 + 3 * spec.c2 * N.P_sq};
  if (cls.xi_position == XiPosition::vertical) {
    m.ric_v -= spec.c3 * (1 + (n - 2) * N.eta_v1_sq);
    m.mixed -= spec.c3 * r;
  } else {
    m.ric_h -= spec.c3 * (1 + (r - 2) * N.eta_h1_sq);
    m.mixed -= spec.c3 * n;
  }
  return m;
}

namespace {

// Which single-distribution case governs v_1 for the split classes.
ClassKind effective_class(const StructureClass& cls) {
  switch (cls.kind) {
    case ClassKind::invariant:
    case ClassKind::anti_invariant:
    case ClassKind::slant: return cls.kind;
    case ClassKind::semi_invariant:
    case ClassKind::semi_slant:
    case ClassKind::hemi_slant: {
      if (!cls.first_in_d1)
        throw Error(ErrorCode::UnsupportedClass, "the designated first vector lies in neither D1 nor D2");
      if (*cls.first_in_d1) return cls.kind == ClassKind::hemi_slant ? ClassKind::anti_invariant : ClassKind::invariant;
      return cls.kind == ClassKind::semi_invariant ? ClassKind::anti_invariant : ClassKind::slant;
    }
    case ClassKind::generic: break;
  }
  throw Error(ErrorCode::UnsupportedClass, "generic structure has no class constants");
}

double class_cos_sq(const StructureClass& cls, ClassKind eff) {
  if (eff == ClassKind::invariant) return 1.0;
  if (eff == ClassKind::anti_invariant) return 0.0;
  if (!cls.theta) throw Error(ErrorCode::UnsupportedClass, "slant class without an angle");
  return std::pow(std::cos(*cls.theta), 2);
}

}  // namespace

ModelBlock structured_submersion_rhs(const StructureClass& cls, const SpaceFormSpec& spec, int n, int r) {
  ClassKind eff = effective_class(cls);
  const StructureNorms& N = cls.norms;
  const double c1 = spec.c1, c2 = spec.c2, c3 = spec.c3;
  const double cos2 = class_cos_sq(cls, eff), sin2 = 1.0 - cos2;
  const double base = c1 * (n * r + n + r - 2);
  ModelBlock m;
  double vh = 0.0;
  if (complex_family(spec)) {
    m.ric_h = c1 * (r - 1) + 3 * c2 * N.Ph1_sq;
    switch (eff) {
      case ClassKind::invariant:
        m.ric_v = c1 * (n - 1) + 3 * c2;
        vh = base + 3 * c2 * (1 + N.Ph1_sq);
        break;
      case ClassKind::anti_invariant:
        m.ric_v = c1 * (n - 1);
        vh = base + 3 * c2 * (n + N.Ph1_sq);
        break;
      default:
        m.ric_v = c1 * (n - 1) + 3 * c2 * cos2;
        vh = base + 3 * c2 * (n * sin2 + N.Ph1_sq + cos2);
        break;
    }
  } else {
    require_xi_branch(cls);
    const bool xi_v = cls.xi_position == XiPosition::vertical;
    const double e1 = N.eta_v1_sq;
    const double c3_v = xi_v ? c3 * (1 + (n - 2) * e1) : 0.0;
    const double c3_h = xi_v ? 0.0 : c3 * (1 + (r - 2) * N.eta_h1_sq);
    const double c3_vh = xi_v ? c3 * (r + 1 + (n - 2) * e1) : c3 * (n + 1 + (r - 2) * N.eta_h1_sq);
    const double contact_factor = xi_v ? 1.0 - e1 : 1.0;
    m.ric_h = c1 * (r - 1) + 3 * c2 * N.Ph1_sq - c3_h;
    switch (eff) {
      case ClassKind::invariant:
        m.ric_v = c1 * (n - 1) + 3 * c2 * contact_factor - c3_v;
        vh = base + 3 * c2 * (N.Ph1_sq + contact_factor) - c3_vh;
        break;
      case ClassKind::anti_invariant:
        m.ric_v = c1 * (n - 1) - c3_v;
        vh = base + 3 * c2 * (n - 1 + N.Ph1_sq) - c3_vh;
        break;
      default:
        m.ric_v = c1 * (n - 1) + 3 * c2 * contact_factor * cos2 - c3_v;
        vh = base + 3 * c2 * ((n - 1) * sin2 + N.Ph1_sq + contact_factor * cos2) - c3_vh;
        break;
    }
  }
  m.mixed = vh - m.ric_v - m.ric_h;
  return m;
}

std::array<Verdict, 3> submersion_verdicts(const SubmersionAnalysis& a, const SignProfile& profile,
                                           const ModelBlock& model, const std::array<std::string, 3>& ids,
                                           const std::array<std::string, 3>& variants) {
  const int n = a.n, r = a.r;
  const int s23 = profile.s23(), s24 = profile.s24(), s25 = profile.s25();
  const double H_term = n * n * a.H_norm_sq / 4.0;
  const double A1j = horizontal_correction(a);

  // T-conditions: T_11 = sum_{j>=2} T_jj and T_1j = 0
  double t_scale = 0.0, t_res = 0.0;
  for (double x : a.T_comp) t_scale = std::max(t_scale, std::abs(x));
  for (int t = 0; t < r && n > 0; ++t) {
    double tail = 0.0;
    for (int j = 1; j < n; ++j) {
      tail += a.T(j, j, t);
      t_res = std::max(t_res, std::abs(a.T(0, j, t)));
    }
    t_res = std::max(t_res, std::abs(a.T(0, 0, t) - tail));
  }
  const bool t_conditions = t_res <= condition_tolerance(t_scale);

  double a_scale = 0.0, a_res = 0.0;
  for (double x : a.A_comp) a_scale = std::max(a_scale, std::abs(x));
  for (int j = 1; j < r; ++j)
    for (int al = 0; al < n; ++al) a_res = std::max(a_res, std::abs(a.A(0, j, al)));
  const bool a_conditions = a_res <= condition_tolerance(a_scale);

  const Relation rel_v = s23 > 0 ? Relation::ge : Relation::le;
  const Relation rel_h = s24 > 0 ? Relation::le : Relation::ge;

  Verdict v = make_verdict(ids[0], variants[0], a.ric_V_ker, model.ric_v - s23 * H_term, rel_v, t_conditions);
  v.details = {{"ric_V_M1", a.ric_V_M1}, {"n2H2_over_4", H_term}, {"T_condition_residual", t_res},
               {"rhs_printed_signs", model.ric_v - H_term}};

  Verdict h = make_verdict(ids[1], variants[1], a.ric_H_perp, model.ric_h, rel_h, a_conditions);
  h.details = {{"ric_H_M1", a.ric_H_M1}, {"sum_A1j_sq", A1j}, {"A_condition_residual", a_res},
               {"rhs_printed_signs", model.ric_h}};

  const double shared = a.delta_N - a.norm_TV_sq + a.norm_AH_sq;
  const double vh_rhs = model.ric_v + model.ric_h + s25 * model.mixed + shared - s23 * H_term - 3.0 * s24 * A1j;
  Verdict vh = make_verdict(ids[2], variants[2], a.ric_V_ker + a.ric_H_perp, vh_rhs, rel_v, t_conditions);
  vh.details = {{"delta_N", a.delta_N},          {"norm_TV_sq", a.norm_TV_sq},
                {"norm_AH_sq", a.norm_AH_sq},    {"mixed_model", model.mixed},
                {"mixed_computed", a.mixed_sum}, {"sum_A1j_sq", A1j},
                {"rhs_printed_signs", model.ric_v + model.ric_h + model.mixed + shared - H_term - 3.0 * A1j}};
  for (int j = 1; j < r; ++j)
    for (int al = 0; al < n; ++al)
      vh.details.emplace_back("A_1" + std::to_string(j + 1) + "^" + std::to_string(al + 1), a.A(0, j, al));
  vh.notes.push_back("A_1j values reported separately; not part of the equality conditions");

  for (Verdict* x : {&v, &h, &vh}) {
    x->point = a.point;
    if (!profile.vertical.determined && x != &h) x->notes.push_back("fiber relation sign undetermined; printed sign used");
    if (!profile.horizontal.determined && x != &v)
      x->notes.push_back("horizontal relation sign undetermined; printed sign used");
  }
  if (!profile.mixed.determined) vh.notes.push_back("mixed relation sign undetermined; printed sign used");
  return {v, h, vh};
}

namespace {

void attach_identity_residuals(std::array<Verdict, 3>& out, const SubmersionAnalysis& a, const ModelBlock& m) {
  out[0].details.emplace_back("model_identity_residual", std::abs(a.ric_V_M1 - m.ric_v));
  out[1].details.emplace_back("model_identity_residual", std::abs(a.ric_H_M1 - m.ric_h));
  out[2].details.emplace_back("model_identity_residual", std::abs(a.mixed_sum - m.mixed));
}

}  // namespace

Verdict verify_GFCRV(const SubmersionAnalysis& a, const SignProfile& profile) {
  return submersion_verdicts(a, profile, computed_model(a), {"GFCRV", "GFCRH", "GFCRVH"}, {"", "", ""})[0];
}

Verdict verify_GFCRH(const SubmersionAnalysis& a, const SignProfile& profile) {
  return submersion_verdicts(a, profile, computed_model(a), {"GFCRV", "GFCRH", "GFCRVH"}, {"", "", ""})[1];
}

Verdict verify_GFCRVH(const SubmersionAnalysis& a, const SignProfile& profile) {
  return submersion_verdicts(a, profile, computed_model(a), {"GFCRV", "GFCRH", "GFCRVH"}, {"", "", ""})[2];
}

std::array<Verdict, 3> verify_CRI_GCSF(const SubmersionAnalysis& a, const SignProfile& profile,
                                       const StructureClass& cls, const SpaceFormSpec& spec) {
  if (spec.c2 != 0.0 && a.structure.kind != StructureKind::complex)
    throw Error(ErrorCode::StructureMissing, "generalized complex bound needs J on the source");
  ModelBlock m = complex_model(cls, spec, a.n, a.r);
  auto out = submersion_verdicts(a, profile, m, {"CRI-GCSF", "CRI-GCSF", "CRI-GCSF"}, {"V", "H", "VH"});
  attach_identity_residuals(out, a, m);
  return out;
}

std::array<Verdict, 3> verify_CRI_GSSF(const SubmersionAnalysis& a, const SignProfile& profile,
                                       const StructureClass& cls, const SpaceFormSpec& spec) {
  if (a.structure.kind != StructureKind::contact)
    throw Error(ErrorCode::StructureMissing, "generalized Sasakian bound needs phi, xi, eta on the source");
  ModelBlock m = sasakian_model(cls, spec, a.n, a.r);
  auto out = submersion_verdicts(a, profile, m, {"CRI-GSSF", "CRI-GSSF", "CRI-GSSF"}, {"V", "H", "VH"});
  attach_identity_residuals(out, a, m);
  for (Verdict& v : out) v.notes.push_back(std::string("xi ") + xi_position_name(cls.xi_position) + " branch");
  return out;
}

std::array<Verdict, 3> verify_STRUCT_SUB(const SubmersionAnalysis& a, const SignProfile& profile,
                                         const StructureClass& cls, const SpaceFormSpec& spec) {
  ModelBlock m = structured_submersion_rhs(cls, spec, a.n, a.r);
  auto out = submersion_verdicts(a, profile, m, {"STRUCT-SUB", "STRUCT-SUB", "STRUCT-SUB"}, {"V", "H", "VH"});
  attach_identity_residuals(out, a, m);
  for (Verdict& v : out) {
    v.notes.push_back(std::string("class ") + class_kind_name(cls.kind));
    if (cls.theta) v.details.emplace_back("theta", *cls.theta);
  }
  return out;
}

// ---------------------------------------------------------------------------
// equality pattern

namespace {

struct PatternFit {
  double residual = 0.0;
  double mu = 0.0;
};

// Rotated second fundamental form pieces for horizontal angle phi.
void rotate_horizontal(const std::vector<double>& B, int q, double phi, Vec& b11, Vec& b22, Vec& b12) {
  const double c = std::cos(phi), s = std::sin(phi);
  b11.resize(q);
  b22.resize(q);
  b12.resize(q);
  for (int al = 0; al < q; ++al) {
    double x11 = B[static_cast<std::size_t>((0 * 2 + 0) * q + al)];
    double x12 = B[static_cast<std::size_t>((0 * 2 + 1) * q + al)];
    double x22 = B[static_cast<std::size_t>((1 * 2 + 1) * q + al)];
    b11(al) = c * c * x11 + 2 * c * s * x12 + s * s * x22;
    b22(al) = s * s * x11 - 2 * c * s * x12 + c * c * x22;
    b12(al) = -c * s * x11 + (c * c - s * s) * x12 + c * s * x22;
  }
}

PatternFit fit_in_frame(const Vec& b11, const Vec& b22, const Vec& b12, const Vec& V1, const Vec& V2) {
  PatternFit f;
  f.mu = (3 * b11.dot(V1) + b22.dot(V1) + b12.dot(V2)) / 11.0;
  f.residual = std::sqrt((b11 - 3 * f.mu * V1).squaredNorm() + (b22 - f.mu * V1).squaredNorm() +
                         (b12 - f.mu * V2).squaredNorm());
  return f;
}

void normal_frame(int q, double psi, bool reflect, Vec& V1, Vec& V2) {
  V1 = Vec::Zero(q);
  V2 = Vec::Zero(q);
  V1(0) = std::cos(psi);
  V1(1) = std::sin(psi);
  V2(0) = -std::sin(psi);
  V2(1) = std::cos(psi);
  if (reflect) V2 = -V2;
}

// Normal frame read off the data when q > 2.
void data_frame(const Vec& b11, const Vec& b22, const Vec& b12, Vec& V1, Vec& V2) {
  const int q = static_cast<int>(b11.size());
  V1 = 3 * b11 + b22;
  if (V1.norm() < 1e-300) {
    V1 = Vec::Zero(q);
    V1(0) = 1;
  }
  V1.normalize();
  V2 = b12 - b12.dot(V1) * V1;
  if (V2.norm() < 1e-14) {
    V2 = Vec::Zero(q);
    V2((V1.cwiseAbs().minCoeff() == std::abs(V1(0))) ? 0 : 1) = 1;
    V2 -= V2.dot(V1) * V1;
  }
  V2.normalize();
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double& best) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  best = 0.5 * (lo + hi);
  return f(best);
}

}  // namespace

EqualityPattern classify_equality_pattern(const std::vector<double>& B, int r, int q) {
  EqualityPattern out;
  double scale = 0.0;
  for (double x : B) scale = std::max(scale, std::abs(x));
  const double tol = 1e-6 * (1.0 + scale);
  if (scale <= tol) {
    out.matched = true;
    out.mu = 0.0;
    out.detail = "second fundamental form vanishes; B = 0 branch";
    return out;
  }
  if (r != 2) {
    out.detail = "template needs r = 2";
    return out;
  }
  if (q < 2) {
    out.detail = "template needs two normal directions";
    return out;
  }

  const int grid = 64;
  Vec b11, b22, b12, V1, V2;
  auto objective = [&](double phi, double psi, bool refl) {
    rotate_horizontal(B, q, phi, b11, b22, b12);
    if (q == 2)
      normal_frame(q, psi, refl, V1, V2);
    else
      data_frame(b11, b22, b12, V1, V2);
    return fit_in_frame(b11, b22, b12, V1, V2);
  };

  double best_res = 1e300, best_phi = 0.0, best_psi = 0.0;
  bool best_refl = false;
  const int psi_steps = q == 2 ? grid : 1;
  for (int refl = 0; refl < (q == 2 ? 2 : 1); ++refl)
    for (int i = 0; i < grid; ++i)
      for (int k = 0; k < psi_steps; ++k) {
        double phi = pi * i / grid, psi = 2 * pi * k / grid;
        PatternFit f = objective(phi, psi, refl != 0);
        if (f.residual < best_res) {
          best_res = f.residual;
          best_phi = phi;
          best_psi = psi;
          best_refl = refl != 0;
        }
      }

  double dphi = pi / grid, dpsi = 2 * pi / grid;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double prev = best_res, x = best_phi;
    best_res = golden_min([&](double t) { return objective(t, best_psi, best_refl).residual; }, best_phi - dphi,
                          best_phi + dphi, x);
    best_phi = x;
    if (q == 2) {
      double y = best_psi;
      best_res = golden_min([&](double t) { return objective(best_phi, t, best_refl).residual; }, best_psi - dpsi,
                            best_psi + dpsi, y);
      best_psi = y;
    }
    dphi = std::max(dphi * 0.5, 1e-9);
    dpsi = std::max(dpsi * 0.5, 1e-9);
    if (std::abs(prev - best_res) < 1e-16 && sweep > 3) break;
  }

  PatternFit f = objective(best_phi, best_psi, best_refl);
  out.residual = f.residual;
  out.horizontal_angle = best_phi;
  out.normal_angle = best_psi;
  out.reflected = best_refl;
  out.matched = f.residual <= tol;
  if (out.matched) {
    out.mu = std::abs(f.mu);
    out.detail = "r = 2 template matched";
  } else {
    out.detail = "template not matched";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Riemannian maps

Verdict verify_RM_CRI(const MapAnalysis& a, int gauss_sign) {
  const int r = a.r, q = a.q;
  double scale = 0.0;
  for (double x : a.B_comp) scale = std::max(scale, std::abs(x));
  const double ctol = condition_tolerance(scale);

  // (i): B_1i = 0 for i >= 2 and B_11 = trace B / 2
  double res_i = 0.0;
  for (int al = 0; al < q; ++al) {
    for (int i = 1; i < r; ++i) res_i = std::max(res_i, std::abs(a.B(0, i, al)));
    res_i = std::max(res_i, std::abs(a.B(0, 0, al) - 0.5 * a.trace_B(al)));
  }
  // (ii): B = 0, or r = 2 with B_11 = B_22
  bool zero = scale <= ctol;
  double res_ii = 0.0;
  if (r == 2)
    for (int al = 0; al < q; ++al) res_ii = std::max(res_ii, std::abs(a.B(0, 0, al) - a.B(1, 1, al)));
  bool cond_ii = zero || (r == 2 && res_ii <= ctol);

  const Relation rel = gauss_sign > 0 ? Relation::le : Relation::ge;
  Verdict v = make_verdict("RM-CRI", "", a.ric_H, a.ric_R + gauss_sign * 0.25 * a.norm_traceB_sq, rel,
                           res_i <= ctol);
  v.point = a.point;
  v.details = {{"ric_R", a.ric_R},
               {"traceB_sq", a.norm_traceB_sq},
               {"condition_i_residual", res_i},
               {"condition_ii", cond_ii ? 1.0 : 0.0},
               {"rhs_printed_signs", a.ric_R + 0.25 * a.norm_traceB_sq}};
  if (zero) v.notes.push_back("B = 0 branch");
  v.notes.push_back(cond_ii ? "equality for every unit X (condition ii)" : "condition ii fails");
  return v;
}

std::pair<Verdict, EqualityPattern> verify_RM_ICRI(const MapAnalysis& a, int gauss_sign) {
  const int r = a.r;
  const double k = extrinsic_coefficient(r, true);
  double scale = 0.0;
  for (double x : a.B_comp) scale = std::max(scale, std::abs(x));
  const bool zero = scale <= condition_tolerance(0.0);

  EqualityPattern pattern = classify_equality_pattern(a.B_comp, r, a.q);
  std::optional<bool> cond;
  if (zero)
    cond = true;
  else if (r >= 2)
    cond = pattern.matched;

  const Relation rel = gauss_sign > 0 ? Relation::le : Relation::ge;
  Verdict v = make_verdict("RM-ICRI", "", a.ric_H, a.ric_R + gauss_sign * k * a.norm_traceB_sq, rel, cond);
  v.point = a.point;
  v.details = {{"ric_R", a.ric_R},
               {"traceB_sq", a.norm_traceB_sq},
               {"coefficient", k},
               {"pattern_residual", pattern.residual},
               {"rhs_printed_signs", a.ric_R + k * a.norm_traceB_sq}};
  if (pattern.mu) v.details.emplace_back("mu", *pattern.mu);
  if (r == 1) v.notes.push_back("degenerate: r = 1");
  if (zero) v.notes.push_back("B = 0 branch");
  v.notes.push_back("pattern: " + pattern.detail);
  return {v, pattern};
}

double extrinsic_coefficient(int r, bool improved) {
  return improved ? static_cast<double>(r - 1) / (4.0 * r) : 0.25;
}

double corollary_rhs(const CorollaryInput& in) {
  const double c = in.c, al = in.alpha, rm1 = in.r - 1.0, P = in.PFX_sq;
  const double ext = in.gauss_sign * extrinsic_coefficient(in.r, in.improved) * in.traceB_sq;
  const double t_eta = (in.r - 2) * in.eta_FX_sq;
  switch (in.kind) {
    case SpaceFormKind::real: return rm1 * c + ext;
    case SpaceFormKind::complex: return rm1 * c / 4 + 3 * c / 4 * P + ext;
    case SpaceFormKind::real_kahler: return rm1 * (c + 3 * al) / 4 + 3 * (c - al) / 4 * P + ext;
    case SpaceFormKind::generalized_complex: return rm1 * in.c1 + 3 * in.c2 * P + ext;
    case SpaceFormKind::sasakian: {
      double T_S = rm1 * (c + 3) / 4 + 3 * (c - 1) / 4 * P + ext;
      return in.xi_in_range ? T_S - (1 + t_eta) * (c - 1) / 4 : T_S;
    }
    case SpaceFormKind::kenmotsu: {
      double T_K = rm1 * (c - 3) / 4 + 3 * (c + 1) / 4 * P + ext;
      return in.xi_in_range ? T_K - (1 + t_eta) * (c + 1) / 4 : T_K;
    }
    case SpaceFormKind::cosymplectic: {
      double T_C = rm1 * c / 4 + 3 * c / 4 * P + ext;
      return in.xi_in_range ? T_C - (1 + t_eta) * c / 4 : T_C;
    }
    case SpaceFormKind::c_alpha: {
      double T_Ca = rm1 * (c + 3 * al * al) / 4 + 3 * (c - al * al) / 4 * P + ext;
      return in.xi_in_range ? T_Ca - (1 + t_eta) * (c - al * al) / 4 : T_Ca;
    }
    case SpaceFormKind::generalized_sasakian: {
      double T_GC = rm1 * in.c1 + 3 * in.c2 * P + ext;
      return in.xi_in_range ? T_GC - (1 + t_eta) * in.c3 : T_GC;
    }
  }
  return 0.0;
}

double generalized_corollary_rhs(const CorollaryInput& in, const SpaceFormSpec& k) {
  const double ext = in.gauss_sign * extrinsic_coefficient(in.r, in.improved) * in.traceB_sq;
  double T_GC = (in.r - 1) * k.c1 + 3 * k.c2 * in.PFX_sq + ext;
  if (k.is_contact() && in.xi_in_range) T_GC -= (1 + (in.r - 2) * in.eta_FX_sq) * k.c3;
  return T_GC;
}

double structured_map_rhs(const StructureClass& cls, const SpaceFormSpec& spec, int r, double traceB_sq,
                          bool improved, int gauss_sign) {
  ClassKind eff = effective_class(cls);
  const double ext = gauss_sign * extrinsic_coefficient(r, improved) * traceB_sq;
  const double T_AI = (r - 1) * spec.c1 + ext;
  const double T_I = T_AI + 3 * spec.c2;
  const double cos2 = class_cos_sq(cls, eff);
  if (!spec.is_contact()) {
    if (eff == ClassKind::invariant) return T_I;
    if (eff == ClassKind::anti_invariant) return T_AI;
    return T_AI + 3 * spec.c2 * cos2;
  }
  if (cls.xi_position != XiPosition::range && cls.xi_position != XiPosition::range_perp)
    throw Error(ErrorCode::UnsupportedClass, "xi must lie in the range or its complement");
  if (cls.xi_position == XiPosition::range_perp) {
    if (eff == ClassKind::invariant) return T_I;
    if (eff == ClassKind::anti_invariant) return T_AI;
    return T_AI + 3 * spec.c2 * cos2;
  }
  const double eta = cls.norms.eta_FX_sq;
  const double c3_term = (1 + (r - 2) * eta) * spec.c3;
  if (eff == ClassKind::invariant) return T_AI + 3 * spec.c2 * (1 - eta) - c3_term;
  if (eff == ClassKind::anti_invariant) return T_AI - c3_term;
  return T_AI + 3 * spec.c2 * (1 - eta) * cos2 - c3_term;
}

std::vector<Verdict> verify_COR(const MapAnalysis& a, int gauss_sign, const SpaceFormSpec& spec,
                                const StructureClass* cls, bool improved) {
  const std::string id = improved ? "COR-ICRI" : "COR-CRI";
  CorollaryInput in;
  in.kind = spec.kind;
  in.c = spec.c;
  in.alpha = spec.alpha;
  in.c1 = spec.c1;
  in.c2 = spec.c2;
  in.c3 = spec.c3;
  in.r = a.r;
  in.improved = improved;
  in.traceB_sq = a.norm_traceB_sq;
  in.gauss_sign = gauss_sign;
  StructureNorms norms = map_norms(a);
  in.PFX_sq = norms.PFX_sq;
  in.eta_FX_sq = norms.eta_FX_sq;
  if (spec.is_contact()) {
    if (!cls) throw Error(ErrorCode::StructureMissing, "contact corollary needs the target structure");
    if (cls->xi_position == XiPosition::range)
      in.xi_in_range = true;
    else if (cls->xi_position != XiPosition::range_perp)
      throw Error(ErrorCode::UnsupportedClass, "xi must lie in the range or its complement");
  } else if (spec.c2 != 0.0 && a.target_structure.kind == StructureKind::none) {
    throw Error(ErrorCode::StructureMissing, "complex corollary needs J on the target");
  }

  const Relation rel = gauss_sign > 0 ? Relation::le : Relation::ge;
  std::optional<bool> cond;
  {
    // equality cases are those of the underlying general theorem
    if (improved)
      cond = verify_RM_ICRI(a, gauss_sign).first.conditions_met;
    else
      cond = verify_RM_CRI(a, gauss_sign).conditions_met;
  }
  std::vector<Verdict> out;
  const double rhs = corollary_rhs(in);
  Verdict v = make_verdict(id, space_form_kind_name(spec.kind), a.ric_H, rhs, rel, cond);
  v.point = a.point;
  v.details = {{"PFX_sq", in.PFX_sq},
               {"eta_FX_sq", in.eta_FX_sq},
               {"traceB_sq", in.traceB_sq},
               {"generalized_rhs", generalized_corollary_rhs(in, spec)},
               {"model_identity_residual", std::abs(a.ric_R - (rhs - gauss_sign * extrinsic_coefficient(a.r, improved) * in.traceB_sq))}};
  if (spec.is_contact()) v.notes.push_back(in.xi_in_range ? "xi in range" : "xi in range complement");
  out.push_back(std::move(v));

  if (cls && cls->kind != ClassKind::generic) {
    try {
      double srhs = structured_map_rhs(*cls, spec, a.r, a.norm_traceB_sq, improved, gauss_sign);
      Verdict s = make_verdict(id, std::string("structured:") + class_kind_name(cls->kind), a.ric_H, srhs, rel, cond);
      s.point = a.point;
      if (cls->theta) s.details.emplace_back("theta", *cls->theta);
      out.push_back(std::move(s));
    } catch (const Error& e) {
      out.front().notes.push_back(std::string("structured bound skipped: ") + e.what());
    }
  }
  return out;
}

bool monotone_consistent(const Verdict& cri, const Verdict& icri, int gauss_sign) {
  double tol = equality_tolerance(cri.rhs, icri.rhs);
  return gauss_sign > 0 ? icri.rhs <= cri.rhs + tol : icri.rhs >= cri.rhs - tol;
}

}  // namespace riemkit
