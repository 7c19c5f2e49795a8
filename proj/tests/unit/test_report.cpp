#include "riemkit/errors.hpp"
#include "riemkit/inequality.hpp"
#include "riemkit/report.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace riemkit;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "riemkit_report_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" RIEMKIT_CLI_PATH "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ErrorCode config_error_code(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::DegenerateInput;
}

}  // namespace

TEST(Config, EuclidProjectionRunIsAllEqualities) {
  const RunConfig cfg = parse_config(R"cfg({"problem": {"catalog": "euclid_proj(3,2)"},
    "checks": ["GFCRV", "GFCRH", "GFCRVH"], "points": {"count": 5, "seed": 1}})cfg");
  const RunResult r = run_verify(cfg, RunOptions{std::nullopt, std::nullopt, std::nullopt, std::nullopt, false});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.verdicts.size(), 15u);
  EXPECT_EQ(r.summary.checked, 15);
  EXPECT_EQ(r.summary.equalities, 15);
  EXPECT_EQ(r.summary.violations, 0);
}

TEST(Config, HopfHorizontalCheck) {
  const RunConfig cfg = parse_config(R"cfg({"problem": {"catalog": "hopf"}, "checks": ["GFCRH"]})cfg");
  const RunResult r = run_verify(cfg);
  EXPECT_EQ(r.exit_code, 0);
  ASSERT_FALSE(r.verdicts.empty());
  for (const Verdict& v : r.verdicts) {
    EXPECT_FALSE(v.equality);
    ASSERT_TRUE(v.conditions_met.has_value());
    EXPECT_FALSE(*v.conditions_met);
  }
}

TEST(Config, MetricTypoIsASyntaxErrorWithOffset) {
  const std::string text = R"cfg({"problem": {"inline": {"kind": "submersion",
      "source": {"dim": 2, "metric": [["1", "0"], ["0", "1 + * x1"]]},
      "target": {"dim": 1, "metric": [["1"]]}, "map": ["x1"]}}})cfg";
  try {
    parse_config(text);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_NE(std::string(e.what()).find("metric[1][1]"), std::string::npos) << e.what();
  }
}

TEST(Config, FieldDiagnostics) {
  EXPECT_EQ(config_error_code("{"), ErrorCode::ConfigError);
  EXPECT_EQ(config_error_code(R"cfg({"checks": []})cfg"), ErrorCode::ConfigError);
  EXPECT_EQ(config_error_code(R"cfg({"problem": {"catalog": "hopf"}, "chekcs": []})cfg"), ErrorCode::ConfigError);
  EXPECT_EQ(config_error_code(R"cfg({"problem": {"catalog": "hopf"}, "checks": ["RM-CRI"]})cfg"), ErrorCode::ConfigError);
  EXPECT_EQ(config_error_code(R"cfg({"problem": {"catalog": "hopf"}, "checks": ["CRI-GCSF"]})cfg"), ErrorCode::ConfigError);
  EXPECT_EQ(config_error_code(R"cfg({"problem": {"catalog": "hopf"}, "points": [[0.5, 0.0]]})cfg"), ErrorCode::ConfigError);
  EXPECT_EQ(config_error_code(R"cfg({"problem": {"catalog": "nope"}})cfg"), ErrorCode::UnknownId);
  EXPECT_EQ(config_error_code(R"cfg({"problem": {"catalog": "warped_radial", "params": {"rho": 9}}})cfg"),
            ErrorCode::BadParams);
  try {
    parse_config("{\n  \"problem\": {\"catalog\": \"hopf\"},\n  \"points\": {\"count\": \"five\"}\n}");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("points.count"), std::string::npos) << e.what();
  }
  try {
    parse_config("{\n  \"problem\": {\"catalog\": \"hopf\"},\n  \"checks\": [\"GFCRV\",]\n}");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, InlineProblemsAllKinds) {
  const RunConfig m = parse_config(R"cfg({"problem": {"kind": "manifold",
      "source": {"dim": 2, "metric": {"diagonal": ["1", "exp(2*x1)"]}}}})cfg");
  EXPECT_EQ(m.kind, ProblemKind::manifold);
  EXPECT_EQ(run_verify(m).exit_code, 0);

  const RunConfig rm = parse_config(R"cfg({"problem": {"inline": {"kind": "riemannian_map",
      "source": {"dim": 3, "metric": {"diagonal": [1, 1, 1]}},
      "target": {"dim": 3, "metric": {"diagonal": [1, 1, 1]}, "domain": {"lo": [-5,-5,-5], "hi": [5,5,5]}},
      "map": ["x1", "x2", "0"], "declared_rank": 2}},
      "checks": ["RM-CRI", "RM-ICRI"], "points": [[0.1, 0.2, 0.3]]})cfg");
  const RunResult r = run_verify(rm);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.verdicts.size(), 2u);
  for (const Verdict& v : r.verdicts) EXPECT_TRUE(v.equality);
}

TEST(Report, DeterministicWithoutTimestamp) {
  const RunConfig cfg = parse_config(R"cfg({"problem": {"catalog": "warped_radial"}, "points": {"count": 3, "seed": 4},
      "designations": {"sweep_unit_vectors": 2}})cfg");
  RunOptions opts;
  opts.timestamp = false;
  const RunResult a = run_verify(cfg, opts);
  const RunResult b = run_verify(cfg, opts);
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.verdicts.size(), 3u * 3u * 3u);
  opts.seed = 5;
  EXPECT_NE(run_verify(cfg, opts).report, a.report);
}

TEST(Report, VerdictOrderIsPointThenTheorem) {
  const RunConfig cfg = parse_config(R"cfg({"problem": {"catalog": "hopf"}, "checks": ["GFCRVH", "GFCRV", "GFCRH"],
      "points": {"count": 3, "seed": 2}})cfg");
  const RunResult r = run_verify(cfg);
  for (std::size_t i = 1; i < r.verdicts.size(); ++i) {
    const Verdict& p = r.verdicts[i - 1];
    const Verdict& q = r.verdicts[i];
    EXPECT_TRUE(p.point_index < q.point_index || (p.point_index == q.point_index && p.theorem_id <= q.theorem_id));
  }
}

TEST(Report, JsonCarriesTheRequiredKeys) {
  const RunConfig cfg = parse_config(R"cfg({"problem": {"catalog": "cylinder_graph_map"}, "points": {"count": 2}})cfg");
  const std::string text = run_verify(cfg).report;
  for (const char* key : {"\"config\"", "\"sign_profile\"", "\"verdicts\"", "\"summary\"", "\"notes\"",
                          "\"theorem_id\"", "\"point\"", "\"lhs\"", "\"rhs\"", "\"slack\"", "\"holds\"",
                          "\"equality\"", "\"conditions_met\"", "\"generated_at\""})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST(Report, MarkdownRendering) {
  const RunConfig cfg = parse_config(R"cfg({"problem": {"catalog": "hopf"}, "checks": ["GFCRH"],
      "output": {"format": "markdown"}})cfg");
  const std::string md = run_verify(cfg).report;
  EXPECT_EQ(md.rfind("# riemkit report", 0), 0u);
  EXPECT_NE(md.find("| GFCRH |"), std::string::npos);
  EXPECT_NE(md.find("## Summary"), std::string::npos);
}

TEST(Report, ForcedViolationExitsOne) {
  const RunConfig cfg = parse_config(R"cfg({"problem": {"catalog": "euclid_proj"}, "points": {"count": 2}})cfg");
  riemkit::testing::set_rhs_corruption(1.0);
  const RunResult r = run_verify(cfg);
  riemkit::testing::set_rhs_corruption(0.0);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.summary.violations, r.summary.checked);
  EXPECT_EQ(r.summary.held + r.summary.violations, r.summary.checked);
}

TEST(Report, AuditRunsConformance) {
  const RunConfig ok = parse_config(R"cfg({"problem": {"catalog": "sphere(3,2)"}, "points": {"count": 3}})cfg");
  EXPECT_EQ(run_audit(ok).exit_code, 0);
  const RunConfig wrong = parse_config(R"cfg({"problem": {"catalog": "sphere(3,2)"}, "points": {"count": 3},
      "space_form": {"kind": "real", "c": 1}})cfg");
  EXPECT_EQ(run_audit(wrong).exit_code, 1);
}

TEST(Report, AtomicWriteReplacesContent) {
  const auto p = scratch("atomic.txt");
  write_atomic(p.string(), "first");
  write_atomic(p.string(), "second");
  EXPECT_EQ(slurp(p.string()), "second");
  for (const auto& entry : std::filesystem::directory_iterator(p.parent_path()))
    EXPECT_EQ(entry.path().string().find(".tmp."), std::string::npos) << entry.path();
  EXPECT_THROW(write_atomic((p.parent_path() / "missing_dir" / "x.txt").string(), "x"), Error);
}

TEST(Cli, ExitCodesAndDeterminism) {
  const auto cfg = scratch("cli_config.json");
  write_file(cfg, R"cfg({"problem": {"catalog": "hopf"}, "checks": ["GFCRV", "GFCRH"], "points": {"count": 3, "seed": 8}})cfg");
  const auto a = scratch("a.json"), b = scratch("b.json");
  ASSERT_EQ(run_cli("verify " + cfg.string() + " --no-timestamp --out " + a.string()), 0);
  ASSERT_EQ(run_cli("verify " + cfg.string() + " --no-timestamp --out " + b.string()), 0);
  EXPECT_EQ(slurp(a.string()), slurp(b.string()));
  EXPECT_FALSE(slurp(a.string()).empty());

  // a violating run still writes its report; an erroring run leaves the old one alone
  EXPECT_EQ(run_cli("verify " + cfg.string() + " --no-timestamp --out " + b.string(), "RIEMKIT_TEST_RHS_OFFSET=0.5"), 1);
  EXPECT_NE(slurp(a.string()), slurp(b.string()));

  const auto bad = scratch("bad.json");
  write_file(bad, R"cfg({"problem": {"inline": {"kind": "submersion", "source": {"dim": 2, "metric": [["1","0"],["0","1+"]]},
      "target": {"dim": 1, "metric": [["1"]]}, "map": ["x1"]}}})cfg");
  const std::string before = slurp(a.string());
  EXPECT_EQ(run_cli("verify " + bad.string() + " --out " + a.string()), 2);
  EXPECT_EQ(slurp(a.string()), before);

  EXPECT_EQ(run_cli("verify /nonexistent/config.json"), 2);
  EXPECT_EQ(run_cli("verify"), 2);
  EXPECT_EQ(run_cli("catalog list"), 0);
  EXPECT_EQ(run_cli("audit " + cfg.string() + " --samples 2"), 0);
  EXPECT_EQ(run_cli("verify " + cfg.string() + " --format md --samples 1 --seed 3"), 0);
}
