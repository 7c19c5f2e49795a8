#pragma once

#include "riemkit/geometry.hpp"
#include "riemkit/rmap.hpp"
#include "riemkit/submersion.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace riemkit {

enum class ProblemKind { manifold, submersion, riemannian_map };

const char* problem_kind_name(ProblemKind kind);

// Expected quantities; numeric values are compared by tests against the
// full pipeline, facts are class labels and branch names.
struct KnownRecord {
  std::map<std::string, double> values;
  std::map<std::string, std::string> facts;
};

struct CatalogEntry {
  std::string id;
  std::map<std::string, double> params;
  ProblemKind kind = ProblemKind::manifold;
  std::string description;

  std::optional<ChartManifold> manifold;
  std::optional<SubmersionProblem> submersion;
  std::optional<RiemannianMapProblem> map;

  // model the relevant manifold conforms to (source for submersions, target
  // for maps)
  std::optional<SpaceFormSpec> space_form;
  KnownRecord known;

  std::function<std::vector<Vec>(int count, std::uint64_t seed)> sampler;

  // the manifold whose curvature the entry exercises most
  const ChartManifold& primary_manifold() const;
  std::vector<Vec> sample(int count, std::uint64_t seed) const { return sampler(count, seed); }
};

struct CatalogInfo {
  std::string id;
  std::string signature;
  std::string description;
};

std::vector<CatalogInfo> catalog_list();

// Throws UnknownId or BadParams. Missing params take documented defaults.
CatalogEntry catalog_get(const std::string& id, const std::map<std::string, double>& params = {});

// Accepts "name" or "name(a,b,...)" with positional params.
CatalogEntry catalog_get_call(const std::string& call);

}  // namespace riemkit
