// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "riemkit/catalog.hpp"
#include "riemkit/errors.hpp"
#include "riemkit/inequality.hpp"
#include "riemkit/report.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace riemkit;

namespace {

constexpr double pi = 3.14159265358979323846;

// Pinned tolerances.
constexpr double symmetry_tol = 1e-8;
constexpr double christoffel_rel_tol = 1e-5;
constexpr double conformance_tol = 1e-6;
constexpr double audit_tol = 1e-6;
constexpr double identity_tol = 1e-10;
constexpr double slack_tol = 1e-9;
constexpr double mu_tol = 1e-9;
constexpr double theta_tol = 1e-6;
constexpr double corollary_tol = 1e-12;
constexpr double reduction_tol = 1e-14;
constexpr double grad_tol = 1e-6;
constexpr double hess_tol = 1e-4;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome curvature_core() {
  Outcome out;
  double worst_sym = 0.0, worst_chr = 0.0;
  int points = 0;
  for (const auto& s : oracle::catalog_manifolds(20, 1)) {
    for (const Vec& p : s.points) {
      const CurvatureData c = curvature_at(s.manifold, p);
      worst_sym = std::max(worst_sym, symmetry_residual(c));
      const auto jet = christoffel(s.manifold, p, Backend::jet);
      const auto fd = christoffel(s.manifold, p, Backend::finite_difference);
      double scale = 0.0, diff = 0.0;
      for (std::size_t i = 0; i < jet.size(); ++i) {
        scale = std::max(scale, std::abs(fd[i]));
        diff = std::max(diff, std::abs(jet[i] - fd[i]));
      }
      worst_chr = std::max(worst_chr, diff / (1 + scale));
      ++points;
    }
  }
  out.require(worst_sym <= symmetry_tol, "symmetry residual " + num(worst_sym));
  out.require(worst_chr <= christoffel_rel_tol, "Christoffel jet/FD " + num(worst_chr));
  if (out.pass)
    out.detail = std::to_string(points) + " points, symmetry " + num(worst_sym) + ", jet/FD " + num(worst_chr);
  return out;
}

Outcome space_form_conformance() {
  Outcome out;
  struct Case {
    std::string call;
    SpaceFormSpec model;
  };
  const Case cases[] = {
      {"fubini_study(1)", generalized_complex_form(1, 1)},
      {"fubini_study(2)", generalized_complex_form(1, 1)},
      {"sphere(3,1)", make_space_form(SpaceFormKind::real, 1)},
      {"sphere(4,2.5)", make_space_form(SpaceFormKind::real, 2.5)},
      {"sphere(2,0.5)", make_space_form(SpaceFormKind::real, 0.5)},
      {"sasakian_sphere(2)", generalized_sasakian_form(1, 0, 0)},
      {"poincare(3,-1)", make_space_form(SpaceFormKind::real, -1)},
  };
  double worst = 0.0;
  for (const Case& c : cases) {
    const CatalogEntry e = catalog_get_call(c.call);
    // 10 points x 5 tuples = 50 orthonormal tuples
    const double res = conformance_check(*e.manifold, c.model, e.sample(10, 2), 5, 3);
    out.require(res <= conformance_tol, c.call + " residual " + num(res));
    worst = std::max(worst, res);
  }
  // independent model formula on CP^2
  const CatalogEntry fs = catalog_get_call("fubini_study(2)");
  std::mt19937_64 rng(4);
  double indep = 0.0;
  for (const Vec& p : fs.sample(10, 5)) {
    const CurvatureData cd = curvature_at(*fs.manifold, p);
    const Mat J = fs.manifold->structure_tensor(p);
    for (int t = 0; t < 5; ++t) {
      const auto f = oracle::orthonormal_tuple(cd.metric, 4, rng);
      indep = std::max(indep, std::abs(cd.form(f[0], f[1], f[2], f[3]) -
                                       oracle::complex_model(1, 1, cd.metric, J, f[0], f[1], f[2], f[3])));
      indep = std::max(indep, std::abs(cd.form(f[0], f[1], f[1], f[0]) -
                                       oracle::complex_model(1, 1, cd.metric, J, f[0], f[1], f[1], f[0])));
    }
  }
  out.require(indep <= conformance_tol, "CP2 against the independent model " + num(indep));
  if (out.pass) out.detail = "max residual " + num(std::max(worst, indep));
  return out;
}

Outcome oneill_audit() {
  Outcome out;
  const CatalogEntry hopf = catalog_get("hopf");
  double worst = 0.0;
  for (const Vec& p : hopf.sample(10, 6)) {
    const SubmersionAnalysis a = analyze_submersion(*hopf.submersion, p);
    const RelationAudit& h = a.sign_profile.horizontal;
    out.require(h.determined && h.sign == -1, "hopf horizontal sign not audited to -1");
    const double A12 = a.A(0, 1, 0) * a.A(0, 1, 0);
    const double balance = std::abs(a.ric_H_perp - (a.ric_H_M1 + 3 * A12));
    out.require(std::abs(a.ric_H_perp - 4) <= audit_tol, "hopf base curvature " + num(a.ric_H_perp));
    out.require(std::abs(a.ric_H_M1 - 1) <= audit_tol, "hopf total curvature " + num(a.ric_H_M1));
    out.require(std::abs(3 * A12 - 3) <= audit_tol, "hopf 3|A12|^2 " + num(3 * A12));
    worst = std::max({worst, balance, h.residual()});
  }
  for (double rho : {0.5, 1.0, 2.0}) {
    const CatalogEntry w = catalog_get("warped_radial", {{"rho", rho}});
    for (const Vec& p : w.sample(5, 7)) {
      const SubmersionAnalysis a = analyze_submersion(*w.submersion, p);
      const RelationAudit& v = a.sign_profile.vertical;
      out.require(v.determined && v.sign == -1, "warped vertical sign not audited to -1");
      const double lambda = std::sqrt(a.H_norm_sq);
      out.require(std::abs(lambda - 1 / rho) <= audit_tol, "umbilic factor " + num(lambda));
      out.require(std::abs(a.ric_V_M1) <= audit_tol, "ambient curvature " + num(a.ric_V_M1));
      out.require(std::abs(a.ric_V_ker - 1 / (rho * rho)) <= audit_tol, "fiber curvature " + num(a.ric_V_ker));
      const double balance = std::abs(a.ric_V_ker - (a.ric_V_M1 + lambda * lambda));
      worst = std::max({worst, balance, v.residual()});
    }
  }
  out.require(worst <= audit_tol, "audit residual " + num(worst));
  if (out.pass) out.detail = "max residual " + num(worst);
  return out;
}

Outcome algebraic_identities() {
  Outcome out;
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 6, r = 1 + (k / 6) % 4;
    const auto t = oracle::symmetric_components(n, r, rng);
    double brute = 0.0;
    for (double x : t) brute += x * x;
    const IdentitySides s = identity_sum_of_squares(t, n, r);
    worst = std::max({worst, std::abs(s.lhs - s.rhs) / (1 + brute), std::abs(s.lhs - brute) / (1 + brute)});
    const auto b = oracle::symmetric_components(r + 1, n, rng);
    double brute_b = 0.0;
    for (double x : b) brute_b += x * x;
    const IdentitySides e = identity_eq5(b, r + 1, n);
    worst = std::max({worst, std::abs(e.lhs - e.rhs) / (1 + brute_b), std::abs(e.lhs - brute_b) / (1 + brute_b)});
  }
  out.require(worst <= identity_tol, "identity residual " + num(worst));
  out.detail = "200 arrays, max residual " + num(worst);
  return out;
}

Outcome submersion_inequalities() {
  Outcome out;
  int verdicts = 0;
  for (const char* call : {"euclid_proj(3,2)", "euclid_proj(6,3)", "hopf", "hopf_contact", "warped_radial(0.5)",
                           "warped_radial(2)", "fs_radial", "flat_slant_sub(0.6)"}) {
    const CatalogEntry e = catalog_get_call(call);
    std::vector<SubmersionAnalysis> as;
    std::vector<SignProfile> ps;
    for (const Vec& p : e.sample(8, 9)) {
      as.push_back(analyze_submersion(*e.submersion, p));
      ps.push_back(as.back().sign_profile);
    }
    const SignProfile profile = merge_profiles(ps);
    const std::string id(call);
    const bool equality_entry = id.rfind("euclid_proj", 0) == 0 || id.rfind("warped", 0) == 0 || id == "hopf";
    for (const auto& a : as) {
      for (const Verdict& v : {verify_GFCRV(a, profile), verify_GFCRH(a, profile), verify_GFCRVH(a, profile)}) {
        ++verdicts;
        out.require(v.holds, id + " " + v.theorem_id + " violated, slack " + num(v.slack));
        if (equality_entry)
          out.require(v.conditions_met.has_value() && *v.conditions_met == v.equality,
                      id + " " + v.theorem_id + " equality flag differs from conditions");
        if (id.rfind("euclid_proj", 0) == 0) out.require(v.equality, id + " " + v.theorem_id + " not an equality");
        if (id.rfind("warped", 0) == 0 && v.theorem_id == "GFCRV")
          out.require(v.equality && *v.conditions_met, id + " GFCRV umbilic equality missing");
        if (id == "hopf" && v.theorem_id == "GFCRH") {
          out.require(!v.equality && !*v.conditions_met, "hopf GFCRH should be strict with conditions violated");
          out.require(std::abs(std::abs(v.slack) - 3) <= audit_tol, "hopf GFCRH gap " + num(v.slack));
        }
      }
    }
  }
  if (out.pass) out.detail = std::to_string(verdicts) + " verdicts";
  return out;
}

Outcome map_inequalities() {
  Outcome out;
  const CatalogEntry flat = catalog_get("flat_cylinder_map");
  for (const Vec& p : flat.sample(5, 1)) {
    const double s = verify_RM_CRI(analyze_map(*flat.map, p)).slack;
    out.require(std::abs(s + 0.25) <= slack_tol, "flat_cylinder RM-CRI slack " + num(s));
  }
  const CatalogEntry graph = catalog_get("cylinder_graph_map");
  for (const Vec& p : graph.sample(5, 2)) {
    const MapAnalysis a = analyze_map(*graph.map, p);
    const double s = verify_RM_CRI(a).slack;
    const auto [icri, pattern] = verify_RM_ICRI(a);
    out.require(std::abs(s + 0.25) <= slack_tol, "cylinder_graph RM-CRI slack " + num(s));
    out.require(std::abs(icri.slack + 0.125) <= slack_tol, "cylinder_graph RM-ICRI slack " + num(icri.slack));
    out.require(!pattern.matched, "cylinder_graph pattern should not match");
  }
  const CatalogEntry lin = catalog_get("euclid_map");
  for (const Vec& p : lin.sample(5, 3)) {
    const MapAnalysis a = analyze_map(*lin.map, p);
    const auto [icri, pattern] = verify_RM_ICRI(a);
    const Verdict cri = verify_RM_CRI(a);
    out.require(cri.equality && icri.equality, "euclid_map should give equality");
    bool branch = false;
    for (const auto& n : icri.notes) branch = branch || n == "B = 0 branch";
    for (const auto& n : cri.notes) branch = branch || n == "B = 0 branch";
    out.require(branch, "euclid_map should take the B = 0 branch");
  }
  if (out.pass) out.detail = "slacks -0.25 / -0.125, B = 0 equality";
  return out;
}

Outcome equality_pattern() {
  Outcome out;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> angle(0.0, 2 * pi);
  double worst = 0.0;
  for (int q : {2, 3}) {
    for (int trial = 0; trial < 4; ++trial) {
      const Mat Q = trial == 0 ? Mat(Mat::Identity(q, q)) : oracle::random_orthogonal(q, rng);
      const double phi = trial == 0 ? 0.0 : angle(rng);
      const auto b = oracle::injected_pattern(0.3, q, phi, Q);
      const EqualityPattern p = classify_equality_pattern(b, 2, q);
      out.require(p.matched && p.mu.has_value(), "injected pattern not matched (q=" + std::to_string(q) + ")");
      if (p.mu) worst = std::max(worst, std::abs(*p.mu - 0.3));
      auto perturbed = b;
      perturbed[static_cast<std::size_t>((1 * 2 + 1) * q + 0)] += 1e-3;
      out.require(!classify_equality_pattern(perturbed, 2, q).matched, "perturbed B22 still matched");
    }
  }
  out.require(worst <= mu_tol, "mu error " + num(worst));
  if (out.pass) out.detail = "max |mu - 0.3| " + num(worst);
  return out;
}

Outcome structure_classifier() {
  Outcome out;
  double worst = 0.0;
  for (double theta : {0.0, pi / 6, pi / 4, pi / 2}) {
    const CatalogEntry e = catalog_get("flat_slant_sub", {{"theta", theta}});
    const SubmersionAnalysis a = analyze_submersion(*e.submersion, e.sample(1, 11)[0]);
    const StructureClass c = classify_submersion_structure(a);
    out.require(c.theta.has_value(), "no angle reported");
    if (c.theta) worst = std::max(worst, std::abs(*c.theta - theta));
    if (theta == 0.0) out.require(c.kind == ClassKind::invariant, "theta = 0 should be invariant");
    if (theta == pi / 2) out.require(c.kind == ClassKind::anti_invariant, "theta = pi/2 should be anti-invariant");
    if (theta > 0 && theta < pi / 2) out.require(c.kind == ClassKind::slant, "interior angle should be slant");
  }
  out.require(worst <= theta_tol, "angle error " + num(worst));
  const CatalogEntry h = catalog_get("hopf_contact");
  const SubmersionAnalysis a = analyze_submersion(*h.submersion, h.sample(1, 12)[0]);
  const StructureClass c = classify_submersion_structure(a);
  out.require(c.xi_position == XiPosition::vertical, "hopf_contact xi not vertical");
  const auto vs = verify_CRI_GSSF(a, a.sign_profile, c, *h.space_form);
  for (const Verdict& v : vs) {
    bool branch = false;
    for (const auto& n : v.notes) branch = branch || n == "xi vertical branch";
    out.require(branch, "CRI-GSSF did not take the xi-vertical branch");
  }
  if (out.pass) out.detail = "max angle error " + num(worst) + ", xi vertical";
  return out;
}

Outcome corollary_arithmetic() {
  Outcome out;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> cd(-5, 5), ad(-2, 2), nd(0, 3), ud(0, 1);
  std::uniform_int_distribution<int> rd(1, 8);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    CorollaryInput in;
    in.c = cd(rng);
    in.alpha = ad(rng);
    in.r = rd(rng);
    in.PFX_sq = nd(rng);
    in.eta_FX_sq = ud(rng);
    in.traceB_sq = nd(rng);
    in.improved = k % 2 == 1;
    in.xi_in_range = k % 3 == 0;
    for (SpaceFormKind kind : {SpaceFormKind::real, SpaceFormKind::complex, SpaceFormKind::real_kahler,
                               SpaceFormKind::sasakian, SpaceFormKind::kenmotsu, SpaceFormKind::cosymplectic,
                               SpaceFormKind::c_alpha}) {
      in.kind = kind;
      const double g = generalized_corollary_rhs(in, make_space_form(kind, in.c, in.alpha));
      worst = std::max(worst, std::abs(corollary_rhs(in) - g) / (1 + std::abs(g)));
    }
  }
  out.require(worst <= corollary_tol, "row vs generalized " + num(worst));

  double reduction = 0.0;
  for (int k = 0; k < 40; ++k) {
    const bool contact = k % 2 == 1;
    const SpaceFormSpec spec = contact ? generalized_sasakian_form(cd(rng), cd(rng), cd(rng))
                                       : generalized_complex_form(cd(rng), cd(rng));
    StructureClass s;
    s.kind = ClassKind::slant;
    s.norms.Ph1_sq = ud(rng);
    s.norms.eta_v1_sq = contact ? ud(rng) : 0.0;
    s.norms.eta_FX_sq = contact ? ud(rng) : 0.0;
    s.xi_position = contact ? XiPosition::vertical : XiPosition::not_applicable;
    StructureClass inv = s, anti = s;
    inv.kind = ClassKind::invariant;
    anti.kind = ClassKind::anti_invariant;
    const int n = 1 + k % 4, r = 2 + k % 3;
    s.theta = 0.0;
    const ModelBlock s0 = structured_submersion_rhs(s, spec, n, r), i0 = structured_submersion_rhs(inv, spec, n, r);
    s.theta = pi / 2;
    const ModelBlock s1 = structured_submersion_rhs(s, spec, n, r), a1 = structured_submersion_rhs(anti, spec, n, r);
    reduction = std::max({reduction, std::abs(s0.ric_v - i0.ric_v), std::abs(s0.ric_h - i0.ric_h),
                          std::abs(s0.mixed - i0.mixed), std::abs(s1.ric_v - a1.ric_v),
                          std::abs(s1.ric_h - a1.ric_h), std::abs(s1.mixed - a1.mixed)});
    StructureClass ms = s, mi = inv, ma = anti;
    for (StructureClass* c : {&ms, &mi, &ma})
      c->xi_position = contact ? (k % 4 == 1 ? XiPosition::range : XiPosition::range_perp) : XiPosition::not_applicable;
    const double tr = nd(rng);
    ms.theta = 0.0;
    reduction = std::max(reduction, std::abs(structured_map_rhs(ms, spec, r, tr, false) -
                                             structured_map_rhs(mi, spec, r, tr, false)));
    ms.theta = pi / 2;
    reduction = std::max(reduction, std::abs(structured_map_rhs(ms, spec, r, tr, true) -
                                             structured_map_rhs(ma, spec, r, tr, true)));
  }
  out.require(reduction <= reduction_tol, "theta reduction " + num(reduction));
  if (out.pass) out.detail = "rows " + num(worst) + ", reductions " + num(reduction);
  return out;
}

Outcome parser() {
  Outcome out;
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst_g = 0.0, worst_h = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int dim = 1 + k % 4;
    const Expression e = parse_expression(oracle::random_expression(rng, dim, 3), dim);
    Vec p(dim);
    for (int i = 0; i < dim; ++i) p[i] = u(rng);
    const Jet2 jet = evaluate_jet(e, p.data(), dim);
    for (int i = 0; i < dim; ++i) {
      const double fd = oracle::fd_partial(e, p, i);
      worst_g = std::max(worst_g, std::abs(jet.d(i) - fd) / (1 + std::abs(fd)));
      for (int l = 0; l < dim; ++l) {
        const double fdd = oracle::fd_second(e, p, i, l);
        worst_h = std::max(worst_h, std::abs(jet.dd(i, l) - fdd) / (1 + std::abs(fdd)));
      }
    }
    const Expression back = parse_expression(print_expression(e), dim);
    out.require(structurally_equal(e, back), "round trip failed for " + print_expression(e));
  }
  out.require(worst_g <= grad_tol, "gradient error " + num(worst_g));
  out.require(worst_h <= hess_tol, "Hessian error " + num(worst_h));
  struct Bad {
    const char* text;
    std::size_t offset;
  };
  for (const Bad& b : {Bad{"x1 + ", 5}, Bad{"x1 * (x2 + 1", 12}, Bad{"foo(x1)", 0}, Bad{"x1^1.5", 4}, Bad{"1e", 2}}) {
    try {
      parse_expression(b.text);
      out.require(false, std::string("accepted ") + b.text);
    } catch (const Error& e) {
      out.require(e.has_offset() && e.offset() == b.offset, std::string("wrong position for ") + b.text);
    }
  }
  if (out.pass) out.detail = "grad " + num(worst_g) + ", hess " + num(worst_h);
  return out;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" RIEMKIT_CLI_PATH "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  Outcome out;
  const auto dir = std::filesystem::temp_directory_path() / "riemkit_acceptance";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "hopf.json", bad = dir / "bad.json", a = dir / "a.json", b = dir / "b.json";
  std::ofstream(cfg) << R"({"problem": {"catalog": "hopf"}, "checks": ["GFCRV", "GFCRH", "GFCRVH"],
    "points": {"count": 4, "seed": 21}})";
  std::ofstream(bad) << R"({"problem": {"inline": {"kind": "submersion",
    "source": {"dim": 2, "metric": [["1", "0"], ["0", "1 + x1^"]]},
    "target": {"dim": 1, "metric": [["1"]]}, "map": ["x1"]}}})";
  const std::string base = "verify " + cfg.string() + " --seed 5 --no-timestamp --out ";
  out.require(run_cli(base + a.string()) == 0, "clean run did not exit 0");
  out.require(run_cli(base + b.string()) == 0, "repeat run did not exit 0");
  out.require(!slurp(a).empty() && slurp(a) == slurp(b), "reports differ between identical runs");
  out.require(run_cli(base + b.string(), "RIEMKIT_TEST_RHS_OFFSET=0.25") == 1, "forced violation did not exit 1");
  const std::string kept = slurp(a);
  out.require(run_cli("verify " + bad.string() + " --out " + a.string()) == 2, "syntax error did not exit 2");
  out.require(slurp(a) == kept, "failed run clobbered the previous report");
  if (out.pass) out.detail = "byte-identical reports, exits 0/1/2";
  return out;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"curvature core", curvature_core},
      {"space-form conformance", space_form_conformance},
      {"O'Neill audit", oneill_audit},
      {"algebraic identities", algebraic_identities},
      {"submersion inequalities", submersion_inequalities},
      {"Riemannian-map inequalities", map_inequalities},
      {"equality-pattern classifier", equality_pattern},
      {"structure classifier", structure_classifier},
      {"corollary arithmetic", corollary_arithmetic},
      {"parser", parser},
      {"CLI determinism", cli_determinism},
  };
  const auto start = clock::now();
  int failed = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto t0 = clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("%s %2d %-28s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  const double total = std::chrono::duration<double>(clock::now() - start).count();
  std::printf("%d/%d criteria passed in %.1fs\n", index - failed, index, total);
  return failed == 0 ? 0 : 1;
}
