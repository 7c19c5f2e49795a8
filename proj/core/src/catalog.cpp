#include "riemkit/catalog.hpp"

#include "riemkit/errors.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace riemkit {

const char* problem_kind_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::manifold: return "manifold";
    case ProblemKind::submersion: return "submersion";
    case ProblemKind::riemannian_map: return "riemannian_map";
  }
  return "manifold";
}

const ChartManifold& CatalogEntry::primary_manifold() const {
  if (manifold) return *manifold;
  if (submersion) return submersion->source;
  return map->map.target;
}

namespace {

constexpr double pi = 3.14159265358979323846;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return v < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
}

std::string var(int i) { return "x" + std::to_string(i + 1); }

std::vector<Expression> parse_all(const std::vector<std::string>& src, int dim) {
  std::vector<Expression> out;
  out.reserve(src.size());
  for (const auto& s : src) out.push_back(parse_expression(s, dim));
  return out;
}

std::vector<std::string> diagonal(const std::vector<std::string>& entries) {
  const int d = static_cast<int>(entries.size());
  std::vector<std::string> out(static_cast<std::size_t>(d * d), "0");
  for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i * d + i)] = entries[static_cast<std::size_t>(i)];
  return out;
}

Domain box(int dim, double lo, double hi) {
  return {std::vector<double>(static_cast<std::size_t>(dim), lo), std::vector<double>(static_cast<std::size_t>(dim), hi)};
}

ChartManifold chart(std::string name, Domain dom, const std::vector<std::string>& metric, Structure s = {}) {
  const int dim = static_cast<int>(dom.lo.size());
  return ChartManifold(std::move(name), dim, std::move(dom), parse_all(metric, dim), std::move(s));
}

ChartManifold euclidean(int dim, double lo, double hi) {
  std::vector<std::string> ones(static_cast<std::size_t>(dim), "1");
  return chart("R" + std::to_string(dim), box(dim, lo, hi), diagonal(ones));
}

// standard J on R^{2k}: J d_{2i} = d_{2i+1}
Structure standard_complex(int dim) {
  Structure s;
  s.kind = StructureKind::complex;
  std::vector<std::string> t(static_cast<std::size_t>(dim * dim), "0");
  for (int i = 0; i + 1 < dim; i += 2) {
    t[static_cast<std::size_t>((i + 1) * dim + i)] = "1";
    t[static_cast<std::size_t>(i * dim + i + 1)] = "-1";
  }
  s.tensor = parse_all(t, dim);
  return s;
}

// cosymplectic R^3: xi = d_3, phi d_1 = d_2
Structure flat_contact3() {
  Structure s;
  s.kind = StructureKind::contact;
  s.tensor = parse_all({"0", "-1", "0", "1", "0", "0", "0", "0", "0"}, 3);
  s.xi = parse_all({"0", "0", "1"}, 3);
  s.eta = parse_all({"0", "0", "1"}, 3);
  return s;
}

std::function<std::vector<Vec>(int, std::uint64_t)> box_sampler(const Domain& d) {
  return [d](int count, std::uint64_t seed) { return sample_box(d, count, seed); };
}

// S^{2k+1} in angles u_1..u_k and phases theta_0..theta_k.
// r_j = prod_{i<=j} sin u_i * cos u_{j+1}, r_k = prod sin u_i.
struct SphereChart {
  int k;
  int dim() const { return 2 * k + 1; }
  std::string u(int a) const { return var(a); }          // a = 0..k-1
  std::string th(int j) const { return var(k + j); }     // j = 0..k
  std::string G(int a) const {                            // metric on du_a
    std::string s = "1";
    for (int i = 0; i < a; ++i) s += "*sin(" + u(i) + ")^2";
    return s;
  }
  std::string radius(int j) const {
    std::string s = "1";
    for (int i = 0; i < j; ++i) s += "*sin(" + u(i) + ")";
    if (j < k) s += "*cos(" + u(j) + ")";
    return s;
  }
  // d_{u_a} log r_j
  std::string dlog(int a, int j) const {
    if (a < j) return "cos(" + u(a) + ")/sin(" + u(a) + ")";
    if (a == j && j < k) return "(-sin(" + u(a) + ")/cos(" + u(a) + "))";
    return "";
  }
};

ChartManifold sasakian_sphere_chart(int k) {
  SphereChart sc{k};
  const int d = sc.dim();
  std::vector<std::string> diag_entries;
  for (int a = 0; a < k; ++a) diag_entries.push_back(sc.G(a));
  for (int j = 0; j <= k; ++j) diag_entries.push_back("(" + sc.radius(j) + ")^2");

  Structure s;
  s.kind = StructureKind::contact;
  std::vector<std::string> t(static_cast<std::size_t>(d * d), "0");
  for (int a = 0; a < k; ++a)
    for (int j = 0; j <= k; ++j) {
      std::string dl = sc.dlog(a, j);
      if (dl.empty()) continue;
      // phi d_{u_a} has theta_j component dlog(a, j)
      t[static_cast<std::size_t>((k + j) * d + a)] = dl;
      // phi d_{theta_j} has u_a component -r_j^2 dlog(a, j) / G_aa
      t[static_cast<std::size_t>(a * d + (k + j))] =
          "(-(" + sc.radius(j) + ")^2*" + dl + "/(" + sc.G(a) + "))";
    }
  s.tensor = parse_all(t, d);
  std::vector<std::string> xi(static_cast<std::size_t>(d), "0"), eta(static_cast<std::size_t>(d), "0");
  for (int j = 0; j <= k; ++j) {
    xi[static_cast<std::size_t>(k + j)] = "1";
    eta[static_cast<std::size_t>(k + j)] = "(" + sc.radius(j) + ")^2";
  }
  s.xi = parse_all(xi, d);
  s.eta = parse_all(eta, d);

  Domain dom;
  for (int a = 0; a < k; ++a) {
    dom.lo.push_back(0.3);
    dom.hi.push_back(1.27);
  }
  for (int j = 0; j <= k; ++j) {
    dom.lo.push_back(-3.0);
    dom.hi.push_back(3.0);
  }
  return chart("S" + std::to_string(d) + "_sasakian", dom, diagonal(diag_entries), std::move(s));
}

ChartManifold fubini_study_chart(int n) {
  const int d = 2 * n;
  // x_{2j} = a_j, x_{2j+1} = b_j
  std::string S = "0";
  for (int i = 0; i < d; ++i) S += "+" + var(i) + "^2";
  const std::string D = "(1+" + S + ")^2";
  std::vector<std::string> g(static_cast<std::size_t>(d * d));
  auto a = [](int j) { return var(2 * j); };
  auto b = [](int j) { return var(2 * j + 1); };
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      std::string u = "(" + a(j) + "*" + a(k) + "+" + b(j) + "*" + b(k) + ")";
      std::string w = "(" + a(j) + "*" + b(k) + "-" + b(j) + "*" + a(k) + ")";
      std::string diag_part = j == k ? "(1+" + S + ")-" : "-";
      std::string same = "(" + diag_part + u + ")/" + D;
      g[static_cast<std::size_t>((2 * j) * d + 2 * k)] = same;
      g[static_cast<std::size_t>((2 * j + 1) * d + 2 * k + 1)] = same;
      g[static_cast<std::size_t>((2 * j + 1) * d + 2 * k)] = w + "/" + D;
      g[static_cast<std::size_t>((2 * j) * d + 2 * k + 1)] = "(-" + w + ")/" + D;
    }
  return chart("CP" + std::to_string(n), box(d, -0.8, 0.8), g, standard_complex(d));
}

// 4|dx|^2 / (1 + c|x|^2)^2, constant curvature c
ChartManifold conformal_form(int n, double c, const std::string& name) {
  std::string S = "0";
  for (int i = 0; i < n; ++i) S += "+" + var(i) + "^2";
  std::string f = "4/(1+" + num(c) + "*(" + S + "))^2";
  double half = c == 0.0 ? 1.0 : 0.4 / std::sqrt(std::abs(c));
  return chart(name, box(n, -half, half), diagonal(std::vector<std::string>(static_cast<std::size_t>(n), f)));
}

ChartManifold hopf_source(bool contact) {
  Domain dom{{0.3, -3.0, -3.0}, {1.27, 3.0, 3.0}};
  if (contact) {
    ChartManifold m = sasakian_sphere_chart(1);
    return ChartManifold("S3_contact", 3, dom, m.metric_expressions(), m.structure());
  }
  return chart("S3", dom, diagonal({"1", "cos(x1)^2", "sin(x1)^2"}));
}

ChartManifold hopf_target() {
  Domain dom{{0.3, -6.5}, {1.27, 6.5}};
  return chart("S2(1/2)", dom, diagonal({"1", "sin(2*x1)^2/4"}));
}

// ---------------------------------------------------------------------------

struct ParamDef {
  std::string name;
  double fallback;
  double lo;
  double hi;
  bool integer;
};

struct Definition {
  std::string id;
  std::string description;
  std::vector<ParamDef> params;
  std::function<CatalogEntry(const std::map<std::string, double>&)> build;
};

CatalogEntry make_entry(ProblemKind kind) {
  CatalogEntry e;
  e.kind = kind;
  return e;
}

const std::vector<Definition>& definitions() {
  static const std::vector<Definition> defs = [] {
    std::vector<Definition> d;

    d.push_back({"euclid_proj", "R^m -> R^n coordinate projection; T = A = 0",
                 {{"m", 3, 2, 8, true}, {"n", 2, 1, 7, true}},
                 [](const std::map<std::string, double>& p) {
                   const int m = static_cast<int>(p.at("m")), n = static_cast<int>(p.at("n"));
                   if (n >= m) throw Error(ErrorCode::BadParams, "euclid_proj needs n < m");
                   CatalogEntry e = make_entry(ProblemKind::submersion);
                   SubmersionProblem s;
                   s.name = "euclid_proj";
                   s.source = euclidean(m, -1.0, 1.0);
                   s.target = euclidean(n, -1.0, 1.0);
                   for (int i = 0; i < n; ++i) s.components.push_back(parse_expression(var(i), m));
                   e.sampler = box_sampler(s.source.domain());
                   e.submersion = std::move(s);
                   e.space_form = make_space_form(SpaceFormKind::real, 0.0);
                   e.known.values = {{"T_max", 0.0}, {"A_max", 0.0}, {"ric_V_ker", 0.0}, {"ric_H_perp", 0.0},
                                     {"equality_GFCRV", 1.0}, {"equality_GFCRH", 1.0}, {"equality_GFCRVH", 1.0}};
                   return e;
                 }});

    d.push_back({"hopf", "S^3(1) -> S^2(1/2) Hopf map in Euler-angle charts; T = 0, |A_12|^2 = 1", {},
                 [](const std::map<std::string, double>&) {
                   CatalogEntry e = make_entry(ProblemKind::submersion);
                   SubmersionProblem s;
                   s.name = "hopf";
                   s.source = hopf_source(false);
                   s.target = hopf_target();
                   s.components = parse_all({"x1", "x2-x3"}, 3);
                   e.sampler = box_sampler(s.source.domain());
                   e.submersion = std::move(s);
                   e.space_form = make_space_form(SpaceFormKind::real, 1.0);
                   e.known.values = {{"T_max", 0.0},      {"A12_sq", 1.0},     {"ric_H_M1", 1.0},
                                     {"ric_H_perp", 4.0}, {"norm_AH_sq", 2.0}, {"mixed_sum", 2.0},
                                     {"base_sectional", 4.0}, {"GFCRH_gap", 3.0}};
                   return e;
                 }});

    d.push_back({"hopf_contact", "Hopf map from S^3 with its Sasakian structure; xi vertical", {},
                 [](const std::map<std::string, double>&) {
                   CatalogEntry e = make_entry(ProblemKind::submersion);
                   SubmersionProblem s;
                   s.name = "hopf_contact";
                   s.source = hopf_source(true);
                   s.target = hopf_target();
                   s.components = parse_all({"x1", "x2-x3"}, 3);
                   e.sampler = box_sampler(s.source.domain());
                   e.submersion = std::move(s);
                   e.space_form = make_space_form(SpaceFormKind::sasakian, 1.0);
                   e.known.values = {{"T_max", 0.0}, {"A12_sq", 1.0}, {"ric_H_perp", 4.0}};
                   e.known.facts = {{"xi_position", "vertical"}};
                   return e;
                 }});

    d.push_back({"warped_radial", "R^3 minus origin -> R+, radial distance; fibers are round spheres",
                 {{"rho", 1.0, 0.2, 2.5, false}},
                 [](const std::map<std::string, double>& p) {
                   const double rho = p.at("rho");
                   CatalogEntry e = make_entry(ProblemKind::submersion);
                   SubmersionProblem s;
                   s.name = "warped_radial";
                   s.source = euclidean(3, -3.0, 3.0);
                   s.target = chart("R+", Domain{{0.01}, {6.0}}, {"1"});
                   s.components = parse_all({"sqrt(x1^2+x2^2+x3^2)"}, 3);
                   e.submersion = std::move(s);
                   // points on the shell of radius rho, away from the coordinate axes
                   e.sampler = [rho](int count, std::uint64_t seed) {
                     std::mt19937_64 rng(seed);
                     std::normal_distribution<double> gauss(0.0, 1.0);
                     std::vector<Vec> pts;
                     while (static_cast<int>(pts.size()) < count) {
                       Vec v(3);
                       for (int i = 0; i < 3; ++i) v(i) = gauss(rng);
                       if (v.norm() < 1e-3) continue;
                       v *= rho / v.norm();
                       if (v.cwiseAbs().minCoeff() < 0.05 * rho) continue;
                       pts.push_back(v);
                     }
                     return pts;
                   };
                   e.space_form = make_space_form(SpaceFormKind::real, 0.0);
                   e.known.values = {{"delta_N", 2.0 / (rho * rho)}, {"norm_TV_sq", 2.0 / (rho * rho)},
                                     {"H_norm", 1.0 / rho},          {"ric_V_ker", 1.0 / (rho * rho)},
                                     {"A_max", 0.0},                 {"equality_GFCRV", 1.0},
                                     {"equality_GFCRVH", 1.0}};
                   return e;
                 }});

    d.push_back({"fubini_study", "CP^n affine chart, holomorphic sectional curvature 4, standard J",
                 {{"n", 1, 1, 2, true}},
                 [](const std::map<std::string, double>& p) {
                   const int n = static_cast<int>(p.at("n"));
                   CatalogEntry e = make_entry(ProblemKind::manifold);
                   e.manifold = fubini_study_chart(n);
                   e.sampler = box_sampler(e.manifold->domain());
                   e.space_form = make_space_form(SpaceFormKind::complex, 4.0);
                   e.known.values = {{"c1", 1.0}, {"c2", 1.0}};
                   return e;
                 }});

    d.push_back({"sasakian_sphere", "S^{2n+1}(1) with its standard Sasakian structure",
                 {{"n", 2, 1, 3, true}},
                 [](const std::map<std::string, double>& p) {
                   CatalogEntry e = make_entry(ProblemKind::manifold);
                   e.manifold = sasakian_sphere_chart(static_cast<int>(p.at("n")));
                   e.sampler = box_sampler(e.manifold->domain());
                   e.space_form = make_space_form(SpaceFormKind::sasakian, 1.0);
                   e.known.values = {{"c1", 1.0}, {"c2", 0.0}, {"c3", 0.0}};
                   return e;
                 }});

    d.push_back({"poincare", "hyperbolic space, conformal ball chart with sectional curvature c < 0",
                 {{"n", 3, 2, 8, true}, {"c", -1.0, -4.0, -0.1, false}},
                 [](const std::map<std::string, double>& p) {
                   const int n = static_cast<int>(p.at("n"));
                   const double c = p.at("c");
                   CatalogEntry e = make_entry(ProblemKind::manifold);
                   e.manifold = conformal_form(n, c, "H" + std::to_string(n));
                   e.sampler = box_sampler(e.manifold->domain());
                   e.space_form = make_space_form(SpaceFormKind::real, c);
                   e.known.values = {{"sectional", c}};
                   return e;
                 }});

    d.push_back({"sphere", "round sphere, stereographic chart with sectional curvature c > 0",
                 {{"n", 3, 2, 8, true}, {"c", 1.0, 0.1, 4.0, false}},
                 [](const std::map<std::string, double>& p) {
                   const int n = static_cast<int>(p.at("n"));
                   const double c = p.at("c");
                   CatalogEntry e = make_entry(ProblemKind::manifold);
                   e.manifold = conformal_form(n, c, "S" + std::to_string(n));
                   e.sampler = box_sampler(e.manifold->domain());
                   e.space_form = make_space_form(SpaceFormKind::real, c);
                   e.known.values = {{"sectional", c}};
                   return e;
                 }});

    d.push_back({"fs_radial", "CP^1 polar chart onto R by the radial angle; anti-invariant, J-plane mixed", {},
                 [](const std::map<std::string, double>&) {
                   CatalogEntry e = make_entry(ProblemKind::submersion);
                   SubmersionProblem s;
                   s.name = "fs_radial";
                   Structure J;
                   J.kind = StructureKind::complex;
                   J.tensor = parse_all({"0", "-sin(2*x1)/2", "2/sin(2*x1)", "0"}, 2);
                   s.source = chart("CP1_polar", Domain{{0.2, -3.0}, {1.37, 3.0}}, diagonal({"1", "sin(2*x1)^2/4"}), J);
                   s.target = chart("R", Domain{{0.0}, {2.0}}, {"1"});
                   s.components = parse_all({"x1"}, 2);
                   e.sampler = box_sampler(s.source.domain());
                   e.submersion = std::move(s);
                   e.space_form = make_space_form(SpaceFormKind::complex, 4.0);
                   e.known.values = {{"mixed_sum", 4.0}, {"A_max", 0.0}};
                   e.known.facts = {{"structure_class", "anti_invariant"}};
                   return e;
                 }});

    d.push_back({"flat_slant_sub", "R^4 -> R^2 with fibers at Kahler angle theta to J",
                 {{"theta", pi / 4, 0.0, pi / 2, false}},
                 [](const std::map<std::string, double>& p) {
                   const double th = p.at("theta");
                   CatalogEntry e = make_entry(ProblemKind::submersion);
                   SubmersionProblem s;
                   s.name = "flat_slant_sub";
                   ChartManifold r4 = euclidean(4, -1.0, 1.0);
                   s.source = ChartManifold("R4", 4, r4.domain(), r4.metric_expressions(), standard_complex(4));
                   s.target = euclidean(2, -3.0, 3.0);
                   s.components = parse_all({num(-std::sin(th)) + "*x2+" + num(std::cos(th)) + "*x3", "x4"}, 4);
                   e.sampler = box_sampler(s.source.domain());
                   e.submersion = std::move(s);
                   e.space_form = make_space_form(SpaceFormKind::complex, 0.0);
                   e.known.values = {{"theta", th}, {"T_max", 0.0}, {"A_max", 0.0}};
                   std::string cls = th < 1e-12 ? "invariant" : (th > pi / 2 - 1e-12 ? "anti_invariant" : "slant");
                   e.known.facts = {{"structure_class", cls}};
                   return e;
                 }});

    d.push_back({"flat_cylinder_map", "R^2 -> R^3, (x, y) -> (cos x, sin x, 0); rank 1, |trace B|^2 = 1", {},
                 [](const std::map<std::string, double>&) {
                   CatalogEntry e = make_entry(ProblemKind::riemannian_map);
                   RiemannianMapProblem rm;
                   rm.map.name = "flat_cylinder_map";
                   rm.map.source = euclidean(2, -3.0, 3.0);
                   ChartManifold r3 = euclidean(3, -2.0, 2.0);
                   rm.map.target = ChartManifold("R3_cosymplectic", 3, r3.domain(), r3.metric_expressions(), flat_contact3());
                   rm.map.components = parse_all({"cos(x1)", "sin(x1)", "0"}, 2);
                   rm.declared_rank = 1;
                   e.sampler = box_sampler(rm.map.source.domain());
                   e.map = std::move(rm);
                   e.space_form = make_space_form(SpaceFormKind::cosymplectic, 0.0);
                   e.known.values = {{"traceB_sq", 1.0}, {"RM-CRI_slack", -0.25}};
                   e.known.facts = {{"xi_position", "range_perp"}};
                   return e;
                 }});

    d.push_back({"cylinder_graph_map", "R^3 -> R^3, (x, y, z) -> (cos x, sin x, y); rank 2, only B_11 nonzero", {},
                 [](const std::map<std::string, double>&) {
                   CatalogEntry e = make_entry(ProblemKind::riemannian_map);
                   RiemannianMapProblem rm;
                   rm.map.name = "cylinder_graph_map";
                   rm.map.source = euclidean(3, -3.0, 3.0);
                   ChartManifold r3 = euclidean(3, -4.0, 4.0);
                   rm.map.target = ChartManifold("R3_cosymplectic", 3, r3.domain(), r3.metric_expressions(), flat_contact3());
                   rm.map.components = parse_all({"cos(x1)", "sin(x1)", "x2"}, 3);
                   rm.declared_rank = 2;
                   e.sampler = box_sampler(rm.map.source.domain());
                   e.map = std::move(rm);
                   e.space_form = make_space_form(SpaceFormKind::cosymplectic, 0.0);
                   e.known.values = {{"traceB_sq", 1.0}, {"RM-CRI_slack", -0.25}, {"RM-ICRI_slack", -0.125}};
                   e.known.facts = {{"xi_position", "range"}, {"pattern", "unmatched"}};
                   return e;
                 }});

    d.push_back({"euclid_map", "R^3 -> R^3, (x, y, z) -> (x, y, 0); rank 2, totally geodesic", {},
                 [](const std::map<std::string, double>&) {
                   CatalogEntry e = make_entry(ProblemKind::riemannian_map);
                   RiemannianMapProblem rm;
                   rm.map.name = "euclid_map";
                   rm.map.source = euclidean(3, -1.0, 1.0);
                   ChartManifold r3 = euclidean(3, -2.0, 2.0);
                   rm.map.target = ChartManifold("R3_cosymplectic", 3, r3.domain(), r3.metric_expressions(), flat_contact3());
                   rm.map.components = parse_all({"x1", "x2", "0"}, 3);
                   rm.declared_rank = 2;
                   e.sampler = box_sampler(rm.map.source.domain());
                   e.map = std::move(rm);
                   e.space_form = make_space_form(SpaceFormKind::cosymplectic, 0.0);
                   e.known.values = {{"traceB_sq", 0.0}, {"RM-CRI_slack", 0.0}, {"RM-ICRI_slack", 0.0}};
                   e.known.facts = {{"xi_position", "range_perp"}};
                   return e;
                 }});
    return d;
  }();
  return defs;
}

std::string signature(const Definition& def) {
  if (def.params.empty()) return def.id;
  std::string s = def.id + "(";
  for (std::size_t i = 0; i < def.params.size(); ++i) {
    const ParamDef& p = def.params[i];
    if (i) s += ", ";
    std::ostringstream os;
    os << p.name << (p.integer ? ":int" : ":real") << " in [" << p.lo << ", " << p.hi << "] = " << p.fallback;
    s += os.str();
  }
  return s + ")";
}

}  // namespace

std::vector<CatalogInfo> catalog_list() {
  std::vector<CatalogInfo> out;
  for (const auto& d : definitions()) out.push_back({d.id, signature(d), d.description});
  return out;
}

CatalogEntry catalog_get(const std::string& id, const std::map<std::string, double>& params) {
  for (const auto& d : definitions()) {
    if (d.id != id) continue;
    std::map<std::string, double> full;
    for (const auto& [k, v] : params) {
      bool known = false;
      for (const auto& p : d.params) known = known || p.name == k;
      if (!known) throw Error(ErrorCode::BadParams, "catalog entry '" + id + "' has no parameter '" + k + "'");
    }
    for (const auto& p : d.params) {
      auto it = params.find(p.name);
      double v = it == params.end() ? p.fallback : it->second;
      if (!std::isfinite(v) || v < p.lo || v > p.hi)
        throw Error(ErrorCode::BadParams, "parameter '" + p.name + "' of '" + id + "' outside its range");
      if (p.integer && v != std::floor(v))
        throw Error(ErrorCode::BadParams, "parameter '" + p.name + "' of '" + id + "' must be an integer");
      full[p.name] = v;
    }
    CatalogEntry e = d.build(full);
    e.id = id;
    e.params = full;
    e.description = d.description;
    return e;
  }
  throw Error(ErrorCode::UnknownId, "unknown catalog id '" + id + "'");
}

CatalogEntry catalog_get_call(const std::string& call) {
  auto open = call.find('(');
  if (open == std::string::npos) return catalog_get(call);
  if (call.back() != ')') throw Error(ErrorCode::BadParams, "malformed catalog call '" + call + "'");
  std::string id = call.substr(0, open);
  std::string args = call.substr(open + 1, call.size() - open - 2);
  const Definition* def = nullptr;
  for (const auto& d : definitions())
    if (d.id == id) def = &d;
  if (!def) throw Error(ErrorCode::UnknownId, "unknown catalog id '" + id + "'");
  std::map<std::string, double> params;
  std::stringstream ss(args);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= def->params.size()) throw Error(ErrorCode::BadParams, "too many parameters for '" + id + "'");
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("trailing");
      params[def->params[i].name] = v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadParams, "parameter '" + item + "' of '" + id + "' is not a number");
    }
    ++i;
  }
  return catalog_get(id, params);
}

}  // namespace riemkit
