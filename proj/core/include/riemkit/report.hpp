#pragma once

#include "riemkit/catalog.hpp"
#include "riemkit/inequality.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace riemkit {

enum class ReportFormat { json, markdown };

struct Designations {
  int v1_index = 0;
  int h1_index = 0;
  int sweep_unit_vectors = 0;  // extra random designations per point
  DistributionSplit split;
};

struct RunConfig {
  std::string source_text;  // canonical echo of the parsed config

  std::string problem_label;
  ProblemKind kind = ProblemKind::manifold;
  std::optional<ChartManifold> manifold;
  std::optional<SubmersionProblem> submersion;
  std::optional<RiemannianMapProblem> map;
  std::optional<CatalogEntry> catalog;

  std::optional<SpaceFormSpec> space_form;
  std::vector<std::string> checks;

  std::vector<Vec> explicit_points;
  int sample_count = 5;
  std::uint64_t seed = 1;

  Designations designations;
  double conformance_tolerance = 1e-6;
  int conformance_tuples = 10;

  std::optional<std::string> output_path;
  ReportFormat format = ReportFormat::json;
};

// Throws Error(ConfigError) with a line/field diagnostic, or the parser's
// positioned SyntaxError for bad expressions.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

const std::vector<std::string>& theorem_ids();

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<ReportFormat> format;
  std::optional<std::string> out;
  bool timestamp = true;
};

struct Summary {
  int checked = 0;
  int held = 0;
  int equalities = 0;
  int violations = 0;
};

struct RunResult {
  int exit_code = 0;
  std::string report;  // rendered in the requested format
  std::vector<Verdict> verdicts;
  Summary summary;
  std::vector<std::string> notes;
};

// In-process equivalents of `verify` and `audit`. Errors propagate as Error.
RunResult run_verify(const RunConfig& config, const RunOptions& opts = {});
RunResult run_audit(const RunConfig& config, const RunOptions& opts = {});

// Writes via a temporary file in the same directory and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace riemkit
