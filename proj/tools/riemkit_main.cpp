#include "riemkit/catalog.hpp"
#include "riemkit/errors.hpp"
#include "riemkit/report.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

// Test-only: shifts every assembled rhs against its relation so a run can be
// forced into violation.
void apply_testing_hook() {
  if (const char* offset = std::getenv("RIEMKIT_TEST_RHS_OFFSET")) {
    try {
      riemkit::testing::set_rhs_corruption(std::stod(offset));
    } catch (const std::exception&) {
      std::cerr << "riemkit: ignoring malformed RIEMKIT_TEST_RHS_OFFSET\n";
    }
  }
}

void print_error(const riemkit::Error& e) {
  std::cerr << "riemkit: " << e.what() << "\n";
}

struct RunArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::string format;
  std::string out;
  bool no_timestamp = false;
};

int run_command(const RunArgs& args, bool audit) {
  riemkit::RunConfig cfg = riemkit::load_config(args.config_path);
  riemkit::RunOptions opts;
  opts.seed = args.seed;
  opts.samples = args.samples;
  if (args.format == "json")
    opts.format = riemkit::ReportFormat::json;
  else if (args.format == "md" || args.format == "markdown")
    opts.format = riemkit::ReportFormat::markdown;
  opts.timestamp = !args.no_timestamp;
  if (!args.out.empty()) opts.out = args.out;

  const riemkit::RunResult result = audit ? riemkit::run_audit(cfg, opts) : riemkit::run_verify(cfg, opts);
  const std::optional<std::string> path = opts.out ? opts.out : cfg.output_path;
  if (path) {
    riemkit::write_atomic(*path, result.report);
    std::cerr << "riemkit: " << result.summary.checked << " checked, " << result.summary.violations
              << " violations; report written to " << *path << "\n";
  } else {
    std::cout << result.report;
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  apply_testing_hook();

  CLI::App app{"riemkit: numerical verification of Chen-Ricci type inequalities"};
  app.require_subcommand(1);

  RunArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Evaluate the configured inequalities and write a report");
  verify->add_option("config", verify_args.config_path, "Run configuration (JSON)")->required();
  verify->add_option("--seed", verify_args.seed, "Override the sampling seed");
  verify->add_option("--samples", verify_args.samples, "Override the number of sampled points")
      ->check(CLI::PositiveNumber);
  verify->add_option("--format", verify_args.format, "Report format")->check(CLI::IsMember({"json", "md", "markdown"}));
  verify->add_option("--out", verify_args.out, "Report path (written atomically)");
  verify->add_flag("--no-timestamp", verify_args.no_timestamp, "Omit the generation time");

  RunArgs audit_args;
  auto* audit = app.add_subcommand("audit", "Run only the conformance and sign audits");
  audit->add_option("config", audit_args.config_path, "Run configuration (JSON)")->required();
  audit->add_option("--seed", audit_args.seed, "Override the sampling seed");
  audit->add_option("--samples", audit_args.samples, "Override the number of sampled points")
      ->check(CLI::PositiveNumber);
  audit->add_option("--format", audit_args.format, "Report format")->check(CLI::IsMember({"json", "md", "markdown"}));
  audit->add_option("--out", audit_args.out, "Report path (written atomically)");
  audit->add_flag("--no-timestamp", audit_args.no_timestamp, "Omit the generation time");

  auto* catalog = app.add_subcommand("catalog", "Inspect the built-in problem catalog");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "One line per entry with its parameter signature");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify) return run_command(verify_args, false);
    if (*audit) return run_command(audit_args, true);
    if (*list) {
      for (const auto& info : riemkit::catalog_list())
        std::cout << info.signature << "  " << info.description << "\n";
      return 0;
    }
  } catch (const riemkit::Error& e) {
    print_error(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "riemkit: error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
