#include "riemkit/report.hpp"

#include "riemkit/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

namespace riemkit {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* tool_version = "0.1.0";
constexpr int default_sweep_count = 32;

[[noreturn]] void config_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where + ": " + what);
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) config_fail(where + "." + it.key(), "unknown field");
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) config_fail(where, std::string("missing field '") + key + "'");
  return obj.at(key);
}

int as_int(const json& j, const std::string& where, int lo, int hi) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) config_fail(where, "expected an integer");
  const long long v = j.get<long long>();
  if (v < lo || v > hi) config_fail(where, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) config_fail(where, "expected a number");
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) config_fail(where, "expected a string");
  return j.get<std::string>();
}

std::string number_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return v < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
}

Expression parse_entry(const json& j, const std::string& where, int dim) {
  std::string text;
  if (j.is_number())
    text = number_text(j.get<double>());
  else if (j.is_string())
    text = j.get<std::string>();
  else
    config_fail(where, "expected an expression string or a number");
  try {
    return parse_expression(text, dim);
  } catch (const Error& e) {
    throw Error(e.code(), where + ": " + e.message(), e.offset());
  }
}

std::vector<Expression> parse_square(const json& j, const std::string& where, int dim) {
  std::vector<Expression> out;
  if (j.is_object()) {
    reject_unknown(j, where, {"diagonal"});
    const json& d = require(j, "diagonal", where);
    if (!d.is_array() || static_cast<int>(d.size()) != dim)
      config_fail(where + ".diagonal", "expected " + std::to_string(dim) + " entries");
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k)
        out.push_back(i == k ? parse_entry(d[static_cast<std::size_t>(i)],
                                           where + ".diagonal[" + std::to_string(i) + "]", dim)
                             : Expression::constant(0.0));
    return out;
  }
  if (!j.is_array()) config_fail(where, "expected a matrix");
  if (static_cast<int>(j.size()) == dim * dim && (j.empty() || !j[0].is_array())) {
    for (int i = 0; i < dim * dim; ++i)
      out.push_back(parse_entry(j[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]", dim));
    return out;
  }
  if (static_cast<int>(j.size()) != dim) config_fail(where, "expected " + std::to_string(dim) + " rows");
  for (int i = 0; i < dim; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      config_fail(rw, "expected " + std::to_string(dim) + " entries");
    for (int k = 0; k < dim; ++k)
      out.push_back(parse_entry(row[static_cast<std::size_t>(k)], rw + "[" + std::to_string(k) + "]", dim));
  }
  return out;
}

std::vector<Expression> parse_list(const json& j, const std::string& where, int count, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != count)
    config_fail(where, "expected " + std::to_string(count) + " entries");
  std::vector<Expression> out;
  for (int i = 0; i < count; ++i)
    out.push_back(parse_entry(j[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]", dim));
  return out;
}

std::vector<double> number_list(const json& j, const std::string& where, int count) {
  if (!j.is_array() || (count >= 0 && static_cast<int>(j.size()) != count))
    config_fail(where, count >= 0 ? "expected " + std::to_string(count) + " numbers" : "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

ChartManifold parse_manifold(const json& j, const std::string& where, const std::string& name) {
  if (!j.is_object()) config_fail(where, "expected an object");
  reject_unknown(j, where, {"name", "dim", "metric", "domain", "structure"});
  const int dim = as_int(require(j, "dim", where), where + ".dim", 1, max_dim);
  std::vector<Expression> metric = parse_square(require(j, "metric", where), where + ".metric", dim);

  Domain dom{std::vector<double>(static_cast<std::size_t>(dim), -1.0),
             std::vector<double>(static_cast<std::size_t>(dim), 1.0)};
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    const std::string dw = where + ".domain";
    reject_unknown(d, dw, {"lo", "hi"});
    dom.lo = number_list(require(d, "lo", dw), dw + ".lo", dim);
    dom.hi = number_list(require(d, "hi", dw), dw + ".hi", dim);
    for (int i = 0; i < dim; ++i)
      if (!(dom.lo[static_cast<std::size_t>(i)] < dom.hi[static_cast<std::size_t>(i)]))
        config_fail(dw, "lo must be below hi in every coordinate");
  }

  Structure s;
  if (j.contains("structure")) {
    const json& st = j.at("structure");
    const std::string sw = where + ".structure";
    reject_unknown(st, sw, {"kind", "tensor", "xi", "eta"});
    const std::string kind = as_string(require(st, "kind", sw), sw + ".kind");
    if (kind == "complex")
      s.kind = StructureKind::complex;
    else if (kind == "contact")
      s.kind = StructureKind::contact;
    else
      config_fail(sw + ".kind", "expected 'complex' or 'contact'");
    s.tensor = parse_square(require(st, "tensor", sw), sw + ".tensor", dim);
    if (s.kind == StructureKind::contact) {
      s.xi = parse_list(require(st, "xi", sw), sw + ".xi", dim, dim);
      s.eta = parse_list(require(st, "eta", sw), sw + ".eta", dim, dim);
    }
  }
  std::string label = name;
  if (j.contains("name")) label = as_string(j.at("name"), where + ".name");
  return ChartManifold(label, dim, std::move(dom), std::move(metric), std::move(s));
}

SpaceFormSpec parse_space_form(const json& j, const std::string& where) {
  if (!j.is_object()) config_fail(where, "expected an object");
  reject_unknown(j, where, {"kind", "c", "alpha", "c1", "c2", "c3"});
  const std::string name = as_string(require(j, "kind", where), where + ".kind");
  SpaceFormKind kind;
  try {
    kind = space_form_kind_from_name(name);
  } catch (const Error&) {
    config_fail(where + ".kind", "unknown space form '" + name + "'");
  }
  auto num = [&](const char* key, double def) {
    return j.contains(key) ? as_number(j.at(key), where + "." + key) : def;
  };
  if (kind == SpaceFormKind::generalized_complex)
    return generalized_complex_form(as_number(require(j, "c1", where), where + ".c1"),
                                    as_number(require(j, "c2", where), where + ".c2"));
  if (kind == SpaceFormKind::generalized_sasakian)
    return generalized_sasakian_form(as_number(require(j, "c1", where), where + ".c1"),
                                     as_number(require(j, "c2", where), where + ".c2"),
                                     as_number(require(j, "c3", where), where + ".c3"));
  return make_space_form(kind, as_number(require(j, "c", where), where + ".c"), num("alpha", 0.0));
}

bool is_submersion_check(const std::string& id) {
  return id == "GFCRV" || id == "GFCRH" || id == "GFCRVH" || id == "CRI-GCSF" || id == "CRI-GSSF" ||
         id == "STRUCT-SUB";
}

void parse_problem(const json& j, RunConfig& cfg) {
  const std::string where = "problem";
  if (!j.is_object()) config_fail(where, "expected an object");
  if (j.contains("catalog")) {
    reject_unknown(j, where, {"catalog", "params"});
    const std::string id = as_string(j.at("catalog"), where + ".catalog");
    std::map<std::string, double> params;
    if (j.contains("params")) {
      const json& p = j.at("params");
      if (!p.is_object()) config_fail(where + ".params", "expected an object");
      for (auto it = p.begin(); it != p.end(); ++it)
        params[it.key()] = as_number(it.value(), where + ".params." + it.key());
    }
    CatalogEntry entry;
    try {
      if (id.find('(') != std::string::npos) {
        if (!params.empty()) config_fail(where, "give params either inline in the call or in 'params'");
        entry = catalog_get_call(id);
      } else {
        entry = catalog_get(id, params);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      throw Error(e.code(), where + ".catalog: " + e.message());
    }
    cfg.kind = entry.kind;
    cfg.manifold = entry.manifold;
    cfg.submersion = entry.submersion;
    cfg.map = entry.map;
    cfg.space_form = entry.space_form;
    cfg.problem_label = entry.id;
    if (!entry.params.empty()) {
      cfg.problem_label += "(";
      bool first = true;
      for (const auto& [k, v] : entry.params) {
        if (!first) cfg.problem_label += ",";
        std::ostringstream os;
        os << k << "=" << v;
        cfg.problem_label += os.str();
        first = false;
      }
      cfg.problem_label += ")";
    }
    cfg.catalog = std::move(entry);
    return;
  }

  const json& in = j.contains("inline") ? j.at("inline") : j;
  const std::string iw = j.contains("inline") ? where + ".inline" : where;
  if (j.contains("inline")) reject_unknown(j, where, {"inline"});
  if (!in.is_object()) config_fail(iw, "expected an object");
  reject_unknown(in, iw, {"kind", "name", "source", "target", "map", "declared_rank"});
  std::string kind = in.contains("map") ? "submersion" : "manifold";
  if (in.contains("kind")) kind = as_string(in.at("kind"), iw + ".kind");
  const std::string name = in.contains("name") ? as_string(in.at("name"), iw + ".name") : "inline";
  cfg.problem_label = name;

  ChartManifold source = parse_manifold(require(in, "source", iw), iw + ".source", name + ".source");
  if (kind == "manifold") {
    if (in.contains("map") || in.contains("target")) config_fail(iw, "a manifold problem takes only 'source'");
    cfg.kind = ProblemKind::manifold;
    cfg.manifold = std::move(source);
    return;
  }
  if (kind != "submersion" && kind != "riemannian_map")
    config_fail(iw + ".kind", "expected 'manifold', 'submersion' or 'riemannian_map'");
  ChartManifold target = parse_manifold(require(in, "target", iw), iw + ".target", name + ".target");
  SmoothMap f;
  f.name = name;
  f.components = parse_list(require(in, "map", iw), iw + ".map", target.dim(), source.dim());
  f.source = std::move(source);
  f.target = std::move(target);
  if (kind == "submersion") {
    if (in.contains("declared_rank")) config_fail(iw + ".declared_rank", "only riemannian_map problems take a rank");
    if (f.target_dim() >= f.source_dim()) config_fail(iw, "a submersion needs dim(target) < dim(source)");
    cfg.kind = ProblemKind::submersion;
    cfg.submersion = std::move(f);
  } else {
    RiemannianMapProblem p;
    const int hi = std::min(f.source_dim(), f.target_dim()) - 1;
    p.declared_rank = as_int(require(in, "declared_rank", iw), iw + ".declared_rank", 1, hi);
    p.map = std::move(f);
    cfg.kind = ProblemKind::riemannian_map;
    cfg.map = std::move(p);
  }
}

const ChartManifold& source_of(const RunConfig& cfg) {
  if (cfg.submersion) return cfg.submersion->source;
  if (cfg.map) return cfg.map->map.source;
  return *cfg.manifold;
}

// ---------------------------------------------------------------- output

std::string timestamp_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json audit_json(const RelationAudit& a) {
  return json{{"sign", a.sign},        {"determined", a.determined},       {"residual", a.residual()},
              {"residual_plus", a.residual_plus}, {"residual_minus", a.residual_minus}, {"scale", a.scale},
              {"tuples", a.tuples}};
}

json verdict_json(const Verdict& v) {
  json d = json::object();
  for (const auto& [k, x] : v.details) d[k] = x;
  json out{{"theorem_id", v.theorem_id},
           {"variant", v.variant},
           {"point_index", v.point_index},
           {"point", vec_json(v.point)},
           {"lhs", v.lhs},
           {"rhs", v.rhs},
           {"slack", v.slack},
           {"relation", relation_symbol(v.relation)},
           {"tolerance", v.tolerance},
           {"holds", v.holds},
           {"equality", v.equality}};
  out["conditions_met"] = v.conditions_met ? json(*v.conditions_met) : json(nullptr);
  out["details"] = std::move(d);
  out["notes"] = v.notes;
  return out;
}

json class_json(const StructureClass& c, int point_index) {
  json out{{"point_index", point_index}, {"kind", class_kind_name(c.kind)}};
  out["theta"] = c.theta ? json(*c.theta) : json(nullptr);
  out["max_deviation"] = c.max_deviation;
  out["norms"] = json{{"P_sq", c.norms.P_sq},           {"Ph1_sq", c.norms.Ph1_sq},
                      {"Qv1_sq", c.norms.Qv1_sq},       {"PFX_sq", c.norms.PFX_sq},
                      {"eta_v1_sq", c.norms.eta_v1_sq}, {"eta_h1_sq", c.norms.eta_h1_sq},
                      {"eta_FX_sq", c.norms.eta_FX_sq}};
  out["xi_position"] = xi_position_name(c.xi_position);
  if (c.first_in_d1) {
    out["first_in_d1"] = *c.first_in_d1;
    out["d1_kind"] = class_kind_name(c.d1_kind);
    out["d2_kind"] = class_kind_name(c.d2_kind);
  }
  out["notes"] = c.notes;
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string render_markdown(const json& r) {
  std::ostringstream md;
  md << "# riemkit report\n\n";
  md << "- problem: `" << r["run"]["problem"].get<std::string>() << "` (" << r["run"]["kind"].get<std::string>()
     << ")\n";
  md << "- command: " << r["run"]["command"].get<std::string>() << "\n";
  md << "- points: " << r["run"]["points"].get<int>() << ", seed " << r["run"]["seed"].get<std::uint64_t>() << "\n";
  if (r.contains("generated_at")) md << "- generated: " << r["generated_at"].get<std::string>() << "\n";
  md << "\n## Sign profile\n\n";
  const json& sp = r["sign_profile"];
  if (sp.empty()) {
    md << "not applicable\n";
  } else {
    md << "| relation | sign | determined | residual |\n|---|---|---|---|\n";
    for (auto it = sp.begin(); it != sp.end(); ++it) {
      if (it.key() == "printed_convention") continue;
      const json& a = it.value();
      md << "| " << it.key() << " | " << a["sign"].get<int>() << " | " << (a["determined"].get<bool>() ? "yes" : "no")
         << " | " << fmt(a["residual"].get<double>()) << " |\n";
    }
  }
  if (r.contains("conformance") && !r["conformance"].is_null()) {
    const json& c = r["conformance"];
    md << "\n## Conformance\n\n- model: " << c["space_form"].get<std::string>() << "\n- max residual: "
       << fmt(c["residual"].get<double>()) << " (tolerance " << fmt(c["tolerance"].get<double>()) << ", "
       << (c["passed"].get<bool>() ? "pass" : "FAIL") << ")\n";
  }
  if (r.contains("classification") && !r["classification"].empty()) {
    md << "\n## Structure classes\n\n| point | class | theta | xi |\n|---|---|---|---|\n";
    for (const json& c : r["classification"])
      md << "| " << c["point_index"].get<int>() << " | " << c["kind"].get<std::string>() << " | "
         << (c["theta"].is_null() ? std::string("-") : fmt(c["theta"].get<double>())) << " | "
         << c["xi_position"].get<std::string>() << " |\n";
  }
  md << "\n## Verdicts\n\n";
  if (r["verdicts"].empty()) {
    md << "none\n";
  } else {
    md << "| point | theorem | variant | lhs | rel | rhs | slack | holds | equality | conditions |\n"
          "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const json& v : r["verdicts"]) {
      const json& cm = v["conditions_met"];
      md << "| " << v["point_index"].get<int>() << " | " << v["theorem_id"].get<std::string>() << " | "
         << v["variant"].get<std::string>() << " | " << fmt(v["lhs"].get<double>()) << " | "
         << v["relation"].get<std::string>() << " | " << fmt(v["rhs"].get<double>()) << " | "
         << fmt(v["slack"].get<double>()) << " | " << (v["holds"].get<bool>() ? "yes" : "**NO**") << " | "
         << (v["equality"].get<bool>() ? "yes" : "no") << " | "
         << (cm.is_null() ? std::string("n/a") : (cm.get<bool>() ? "met" : "not met")) << " |\n";
    }
  }
  const json& s = r["summary"];
  md << "\n## Summary\n\n- checked: " << s["checked"].get<int>() << "\n- held: " << s["held"].get<int>()
     << "\n- equalities: " << s["equalities"].get<int>() << "\n- violations: " << s["violations"].get<int>() << "\n";
  if (!r["notes"].empty()) {
    md << "\n## Notes\n\n";
    for (const json& n : r["notes"]) md << "- " << n.get<std::string>() << "\n";
  }
  return md.str();
}

// ---------------------------------------------------------------- orchestration

struct Session {
  const RunConfig& cfg;
  std::vector<Vec> points;
  std::uint64_t seed = 1;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  json sign_profile = json::object();
  json classification = json::array();
  json conformance = nullptr;
  json point_audits = json::array();
};

std::vector<Vec> resolve_points(const RunConfig& cfg, const RunOptions& opts, std::uint64_t seed) {
  if (!cfg.explicit_points.empty() && !opts.samples) return cfg.explicit_points;
  const int count = opts.samples ? *opts.samples : cfg.sample_count;
  if (count < 1) config_fail("samples", "need at least one point");
  if (cfg.catalog) return cfg.catalog->sample(count, seed);
  return sample_box(source_of(cfg).domain(), count, seed);
}

Vec random_unit(const Frame& frame, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec coeffs(frame.size());
  do {
    for (int i = 0; i < frame.size(); ++i) coeffs[i] = gauss(rng);
  } while (coeffs.norm() < 1e-8);
  coeffs.normalize();
  Vec out = Vec::Zero(frame[0].size());
  for (int i = 0; i < frame.size(); ++i) out += coeffs[i] * frame[i];
  return out;
}

bool wants(const RunConfig& cfg, const char* id) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), id) != cfg.checks.end();
}

void tag(Verdict& v, int point_index, int designation) {
  v.point_index = point_index;
  if (designation > 0) v.details.emplace_back("designation", designation);
}

void run_conformance(Session& s, const ChartManifold& m, const std::vector<Vec>& pts) {
  const SpaceFormSpec& spec = *s.cfg.space_form;
  const double res = conformance_check(m, spec, pts, s.cfg.conformance_tuples, s.seed);
  const bool ok = res <= s.cfg.conformance_tolerance;
  s.conformance = json{{"manifold", m.name()},
                       {"space_form", space_form_kind_name(spec.kind)},
                       {"c", spec.c},
                       {"alpha", spec.alpha},
                       {"c1", spec.c1},
                       {"c2", spec.c2},
                       {"c3", spec.c3},
                       {"tuples_per_point", s.cfg.conformance_tuples},
                       {"seed", s.seed},
                       {"residual", res},
                       {"tolerance", s.cfg.conformance_tolerance},
                       {"passed", ok}};
  if (!ok)
    s.notes.push_back("conformance residual " + fmt(res) + " exceeds tolerance; " + m.name() +
                      " does not match the declared space form");
}

std::vector<Vec> images(const SmoothMap& f, const std::vector<Vec>& pts) {
  std::vector<Vec> out;
  for (const Vec& p : pts) out.push_back(map_value(f, p));
  return out;
}

void run_submersion(Session& s, bool verdicts) {
  const RunConfig& cfg = s.cfg;
  const SubmersionProblem& prob = *cfg.submersion;
  std::vector<SubmersionAnalysis> analyses;
  std::vector<SignProfile> profiles;
  for (const Vec& p : s.points) {
    analyses.push_back(analyze_submersion(prob, p));
    profiles.push_back(analyses.back().sign_profile);
  }
  const SignProfile profile = merge_profiles(profiles);
  s.sign_profile = json{{"vertical", audit_json(profile.vertical)},
                        {"horizontal", audit_json(profile.horizontal)},
                        {"mixed", audit_json(profile.mixed)},
                        {"printed_convention", json{{"vertical", 1}, {"horizontal", 1}, {"mixed", 1}}}};
  const char* names[] = {"vertical", "horizontal", "mixed"};
  const RelationAudit* audits[] = {&profile.vertical, &profile.horizontal, &profile.mixed};
  for (int k = 0; k < 3; ++k)
    if (!audits[k]->determined)
      s.notes.push_back(std::string(names[k]) + " relation sign undetermined at every point; +1 assumed");

  for (std::size_t i = 0; i < analyses.size(); ++i) {
    const SubmersionAnalysis& a = analyses[i];
    s.point_audits.push_back(json{{"point_index", static_cast<int>(i)},
                                  {"point", vec_json(a.point)},
                                  {"vertical", audit_json(a.sign_profile.vertical)},
                                  {"horizontal", audit_json(a.sign_profile.horizontal)},
                                  {"mixed", audit_json(a.sign_profile.mixed)},
                                  {"oneill_residual", a.properties.worst()},
                                  {"isometry_residual", a.isometry_residual}});
  }
  if (!verdicts) return;

  const Designations& des = cfg.designations;
  const bool needs_class = wants(cfg, "CRI-GCSF") || wants(cfg, "CRI-GSSF") || wants(cfg, "STRUCT-SUB");
  const bool has_structure = prob.source.structure().kind != StructureKind::none;

  for (std::size_t i = 0; i < analyses.size(); ++i) {
    const SubmersionAnalysis& a = analyses[i];
    const int pi = static_cast<int>(i);
    if (des.v1_index >= a.n) config_fail("designations.v1_index", "exceeds the fiber dimension " + std::to_string(a.n));
    if (des.h1_index >= a.r)
      config_fail("designations.h1_index", "exceeds the horizontal dimension " + std::to_string(a.r));

    std::mt19937_64 rng(s.seed * 1000003ULL + i);
    for (int k = 0; k <= des.sweep_unit_vectors; ++k) {
      Vec v1 = k == 0 ? Vec(a.vertical[des.v1_index]) : random_unit(a.vertical, rng);
      Vec h1 = k == 0 ? Vec(a.horizontal[des.h1_index]) : random_unit(a.horizontal, rng);
      const SubmersionAnalysis d = designate(a, &v1, &h1);

      std::optional<StructureClass> cls;
      if (needs_class && has_structure) {
        cls = classify_submersion_structure(d, des.split, 0);
        if (k == 0) s.classification.push_back(class_json(*cls, pi));
      }
      auto push = [&](Verdict v) {
        tag(v, pi, k);
        s.verdicts.push_back(std::move(v));
      };
      if (wants(cfg, "GFCRV")) push(verify_GFCRV(d, profile));
      if (wants(cfg, "GFCRH")) push(verify_GFCRH(d, profile));
      if (wants(cfg, "GFCRVH")) push(verify_GFCRVH(d, profile));
      const StructureClass none_class;
      const StructureClass& c = cls ? *cls : none_class;
      if (wants(cfg, "CRI-GCSF"))
        for (auto& v : verify_CRI_GCSF(d, profile, c, *cfg.space_form)) push(std::move(v));
      if (wants(cfg, "CRI-GSSF")) {
        if (!cls) throw Error(ErrorCode::StructureMissing, "CRI-GSSF needs a contact structure on the source");
        for (auto& v : verify_CRI_GSSF(d, profile, c, *cfg.space_form)) push(std::move(v));
      }
      if (wants(cfg, "STRUCT-SUB")) {
        if (!cls) throw Error(ErrorCode::StructureMissing, "STRUCT-SUB needs a structure on the source");
        for (auto& v : verify_STRUCT_SUB(d, profile, c, *cfg.space_form)) push(std::move(v));
      }
    }
  }
}

void run_map(Session& s, bool verdicts) {
  const RunConfig& cfg = s.cfg;
  const RiemannianMapProblem& prob = *cfg.map;
  std::vector<MapAnalysis> analyses;
  for (const Vec& p : s.points) analyses.push_back(analyze_map(prob, p));

  RelationAudit gauss = analyses.front().gauss;
  bool determined = false;
  for (std::size_t i = 0; i < analyses.size(); ++i) {
    const RelationAudit& g = analyses[i].gauss;
    s.point_audits.push_back(json{{"point_index", static_cast<int>(i)},
                                  {"point", vec_json(analyses[i].point)},
                                  {"gauss", audit_json(g)},
                                  {"isometry_residual", analyses[i].isometry_residual},
                                  {"range_perp_residual", analyses[i].range_perp_residual}});
    if (!g.determined) continue;
    if (determined && g.sign != gauss.sign)
      throw Error(ErrorCode::AuditFailure, "Gauss relation sign flips between sampled points");
    if (!determined || g.residual() > gauss.residual()) gauss = g;
    determined = true;
  }
  if (!determined) {
    gauss.sign = 1;
    gauss.determined = false;
    s.notes.push_back("Gauss relation sign undetermined at every point; +1 assumed");
  }
  s.sign_profile = json{{"gauss", audit_json(gauss)}, {"printed_convention", json{{"gauss", 1}}}};
  if (!verdicts) return;

  const Designations& des = cfg.designations;
  const bool wants_cor = wants(cfg, "COR-CRI") || wants(cfg, "COR-ICRI");
  const bool has_structure = prob.map.target.structure().kind != StructureKind::none;
  bool monotone_reported = false;

  for (std::size_t i = 0; i < analyses.size(); ++i) {
    const MapAnalysis& a = analyses[i];
    const int pi = static_cast<int>(i);
    if (des.h1_index >= a.r) config_fail("designations.h1_index", "exceeds the rank " + std::to_string(a.r));
    std::mt19937_64 rng(s.seed * 1000003ULL + i);
    for (int k = 0; k <= des.sweep_unit_vectors; ++k) {
      Vec x = k == 0 ? Vec(a.horizontal[des.h1_index]) : random_unit(a.horizontal, rng);
      const MapAnalysis d = designate_map(a, x);
      auto push = [&](Verdict v) {
        tag(v, pi, k);
        s.verdicts.push_back(std::move(v));
      };
      std::optional<Verdict> cri, icri;
      if (wants(cfg, "RM-CRI")) {
        cri = verify_RM_CRI(d, gauss.sign);
        push(*cri);
      }
      if (wants(cfg, "RM-ICRI")) {
        auto [v, pattern] = verify_RM_ICRI(d, gauss.sign);
        v.details.emplace_back("pattern_matched", pattern.matched ? 1.0 : 0.0);
        icri = v;
        push(std::move(v));
      }
      if (cri && icri && !monotone_consistent(*cri, *icri, gauss.sign) && !monotone_reported) {
        s.notes.push_back("improved bound exceeds the plain bound at point " + std::to_string(pi));
        monotone_reported = true;
      }
      if (wants_cor) {
        std::optional<StructureClass> cls;
        if (has_structure) {
          cls = classify_map_structure(d, des.split, 0);
          if (k == 0) s.classification.push_back(class_json(*cls, pi));
        }
        const StructureClass* cp = cls ? &*cls : nullptr;
        if (wants(cfg, "COR-CRI"))
          for (auto& v : verify_COR(d, gauss.sign, *cfg.space_form, cp, false)) push(std::move(v));
        if (wants(cfg, "COR-ICRI"))
          for (auto& v : verify_COR(d, gauss.sign, *cfg.space_form, cp, true)) push(std::move(v));
      }
    }
  }
}

void run_manifold(Session& s) {
  const ChartManifold& m = *s.cfg.manifold;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const CurvatureData c = curvature_at(m, s.points[i]);
    s.point_audits.push_back(json{{"point_index", static_cast<int>(i)},
                                  {"point", vec_json(s.points[i])},
                                  {"symmetry_residual", symmetry_residual(c)},
                                  {"scalar_curvature", scalar_curvature(c)}});
  }
}

Summary summarize(const std::vector<Verdict>& verdicts) {
  Summary sum;
  for (const Verdict& v : verdicts) {
    ++sum.checked;
    if (v.holds)
      ++sum.held;
    else
      ++sum.violations;
    if (v.equality) ++sum.equalities;
  }
  return sum;
}

RunResult execute(const RunConfig& cfg, const RunOptions& opts, bool verdicts) {
  Session s{cfg, {}, opts.seed ? *opts.seed : cfg.seed, {}, {}, json::object(), json::array(), nullptr, json::array()};
  s.points = resolve_points(cfg, opts, s.seed);

  const int dim = source_of(cfg).dim();
  for (std::size_t i = 0; i < s.points.size(); ++i)
    if (s.points[i].size() != dim)
      config_fail("points[" + std::to_string(i) + "]", "expected " + std::to_string(dim) + " coordinates");

  if (testing::rhs_corruption() != 0.0)
    s.notes.push_back("testing hook active: every rhs shifted by " + fmt(testing::rhs_corruption()));

  switch (cfg.kind) {
    case ProblemKind::submersion: run_submersion(s, verdicts); break;
    case ProblemKind::riemannian_map: run_map(s, verdicts); break;
    case ProblemKind::manifold: run_manifold(s); break;
  }

  if (cfg.space_form) {
    if (cfg.kind == ProblemKind::riemannian_map)
      run_conformance(s, cfg.map->map.target, images(cfg.map->map, s.points));
    else
      run_conformance(s, source_of(cfg), s.points);
  }

  std::stable_sort(s.verdicts.begin(), s.verdicts.end(), [](const Verdict& a, const Verdict& b) {
    if (a.point_index != b.point_index) return a.point_index < b.point_index;
    return a.theorem_id < b.theorem_id;
  });

  RunResult result;
  result.summary = summarize(s.verdicts);
  result.verdicts = s.verdicts;
  result.notes = s.notes;
  for (const Verdict& v : s.verdicts)
    if (!v.holds)
      result.notes.push_back("violation: " + v.theorem_id + (v.variant.empty() ? "" : " " + v.variant) +
                             " at point " + std::to_string(v.point_index) + ", slack " + fmt(v.slack));

  json report = json::object();
  report["tool"] = "riemkit";
  report["version"] = tool_version;
  if (opts.timestamp) report["generated_at"] = timestamp_now();
  report["config"] = json::parse(cfg.source_text);
  report["run"] = json{{"command", verdicts ? "verify" : "audit"},
                       {"problem", cfg.problem_label},
                       {"kind", problem_kind_name(cfg.kind)},
                       {"seed", s.seed},
                       {"points", static_cast<int>(s.points.size())},
                       {"checks", cfg.checks}};
  report["sign_profile"] = s.sign_profile;
  report["conformance"] = s.conformance;
  report["point_audits"] = s.point_audits;
  report["classification"] = s.classification;
  json vs = json::array();
  for (const Verdict& v : s.verdicts) vs.push_back(verdict_json(v));
  report["verdicts"] = std::move(vs);
  report["summary"] = json{{"checked", result.summary.checked},
                           {"held", result.summary.held},
                           {"equalities", result.summary.equalities},
                           {"violations", result.summary.violations}};
  report["notes"] = result.notes;

  const ReportFormat format = opts.format ? *opts.format : cfg.format;
  result.report = format == ReportFormat::json ? report.dump(2) + "\n" : render_markdown(report);

  if (verdicts)
    result.exit_code = result.summary.violations > 0 ? 1 : 0;
  else
    result.exit_code = (!s.conformance.is_null() && !s.conformance["passed"].get<bool>()) ? 1 : 0;
  return result;
}

}  // namespace

const std::vector<std::string>& theorem_ids() {
  static const std::vector<std::string> ids = {"GFCRV",  "GFCRH",  "GFCRVH",  "CRI-GCSF", "CRI-GSSF",
                                               "STRUCT-SUB", "RM-CRI", "RM-ICRI", "COR-CRI",  "COR-ICRI"};
  return ids;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw Error(ErrorCode::ConfigError,
                "config: invalid JSON at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  if (!j.is_object()) config_fail("config", "top level must be an object");
  reject_unknown(j, "config",
                 {"$schema", "problem", "space_form", "checks", "points", "designations", "tolerances", "output"});

  RunConfig cfg;
  cfg.source_text = j.dump();
  parse_problem(require(j, "problem", "config"), cfg);

  if (j.contains("space_form")) cfg.space_form = parse_space_form(j.at("space_form"), "space_form");

  if (j.contains("checks")) {
    const json& c = j.at("checks");
    if (!c.is_array()) config_fail("checks", "expected a list of theorem ids");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string w = "checks[" + std::to_string(i) + "]";
      const std::string id = as_string(c[i], w);
      const auto& ids = theorem_ids();
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) config_fail(w, "unknown theorem id '" + id + "'");
      if (!seen.insert(id).second) config_fail(w, "duplicate theorem id '" + id + "'");
      const bool sub = is_submersion_check(id);
      if ((sub && cfg.kind != ProblemKind::submersion) || (!sub && cfg.kind != ProblemKind::riemannian_map))
        config_fail(w, id + " does not apply to a " + problem_kind_name(cfg.kind) + " problem");
      const bool needs_form = id == "CRI-GCSF" || id == "CRI-GSSF" || id == "STRUCT-SUB" || id == "COR-CRI" ||
                              id == "COR-ICRI";
      if (needs_form && !cfg.space_form) config_fail(w, id + " needs a space_form");
      if (id == "CRI-GCSF" && cfg.space_form->is_contact())
        config_fail(w, "CRI-GCSF needs a complex-type space form");
      if (id == "CRI-GSSF" && !cfg.space_form->is_contact())
        config_fail(w, "CRI-GSSF needs a contact-type space form");
      const StructureKind carried = source_of(cfg).structure().kind;
      if (id == "CRI-GCSF" && carried != StructureKind::complex)
        config_fail(w, "CRI-GCSF needs a complex structure on the source manifold");
      if (id == "CRI-GSSF" && carried != StructureKind::contact)
        config_fail(w, "CRI-GSSF needs a contact structure on the source manifold");
      if (id == "STRUCT-SUB" && carried == StructureKind::none)
        config_fail(w, "STRUCT-SUB needs a structure on the source manifold");
      cfg.checks.push_back(id);
    }
  } else if (cfg.kind == ProblemKind::submersion) {
    cfg.checks = {"GFCRV", "GFCRH", "GFCRVH"};
  } else if (cfg.kind == ProblemKind::riemannian_map) {
    cfg.checks = {"RM-CRI", "RM-ICRI"};
  }

  const int dim = source_of(cfg).dim();
  if (j.contains("points")) {
    const json& p = j.at("points");
    if (p.is_array()) {
      if (p.empty()) config_fail("points", "explicit list is empty");
      for (std::size_t i = 0; i < p.size(); ++i) {
        const std::string w = "points[" + std::to_string(i) + "]";
        std::vector<double> xs = number_list(p[i], w, dim);
        Vec v = Eigen::Map<const Vec>(xs.data(), dim);
        if (!source_of(cfg).domain().contains(v)) config_fail(w, "outside the chart domain");
        cfg.explicit_points.push_back(v);
      }
    } else if (p.is_object()) {
      reject_unknown(p, "points", {"count", "seed"});
      if (p.contains("count")) cfg.sample_count = as_int(p.at("count"), "points.count", 1, 10000);
      if (p.contains("seed")) {
        const json& s = p.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
          config_fail("points.seed", "expected a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
      }
    } else {
      config_fail("points", "expected a list of points or {count, seed}");
    }
  }

  if (j.contains("designations")) {
    const json& d = j.at("designations");
    const std::string w = "designations";
    reject_unknown(d, w, {"v1_index", "h1_index", "sweep_unit_vectors", "d1", "d2"});
    if (d.contains("v1_index")) cfg.designations.v1_index = as_int(d.at("v1_index"), w + ".v1_index", 0, max_dim);
    if (d.contains("h1_index")) cfg.designations.h1_index = as_int(d.at("h1_index"), w + ".h1_index", 0, max_dim);
    if (d.contains("sweep_unit_vectors")) {
      const json& sw = d.at("sweep_unit_vectors");
      if (sw.is_boolean())
        cfg.designations.sweep_unit_vectors = sw.get<bool>() ? default_sweep_count : 0;
      else
        cfg.designations.sweep_unit_vectors = as_int(sw, w + ".sweep_unit_vectors", 0, 1000);
    }
    for (const char* key : {"d1", "d2"}) {
      if (!d.contains(key)) continue;
      const json& list = d.at(key);
      const std::string lw = w + "." + key;
      if (!list.is_array() || list.empty()) config_fail(lw, "expected a non-empty list of frame indices");
      std::vector<int>& out = std::string(key) == "d1" ? cfg.designations.split.d1 : cfg.designations.split.d2;
      for (std::size_t i = 0; i < list.size(); ++i)
        out.push_back(as_int(list[i], lw + "[" + std::to_string(i) + "]", 0, max_dim - 1));
    }
    if (d.contains("d1") != d.contains("d2")) config_fail(w, "d1 and d2 must be given together");
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t, "tolerances", {"conformance", "conformance_tuples"});
    if (t.contains("conformance")) {
      cfg.conformance_tolerance = as_number(t.at("conformance"), "tolerances.conformance");
      if (!(cfg.conformance_tolerance > 0)) config_fail("tolerances.conformance", "must be positive");
    }
    if (t.contains("conformance_tuples"))
      cfg.conformance_tuples = as_int(t.at("conformance_tuples"), "tolerances.conformance_tuples", 1, 1000);
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"path", "format"});
    if (o.contains("path")) cfg.output_path = as_string(o.at("path"), "output.path");
    if (o.contains("format")) {
      const std::string f = as_string(o.at("format"), "output.format");
      if (f == "json")
        cfg.format = ReportFormat::json;
      else if (f == "markdown" || f == "md")
        cfg.format = ReportFormat::markdown;
      else
        config_fail("output.format", "expected 'json' or 'markdown'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

RunResult run_verify(const RunConfig& config, const RunOptions& opts) { return execute(config, opts, true); }

RunResult run_audit(const RunConfig& config, const RunOptions& opts) { return execute(config, opts, false); }

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigError, path + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::ConfigError, path + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::ConfigError, path + ": cannot move report into place");
  }
}

}  // namespace riemkit
