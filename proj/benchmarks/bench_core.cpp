#include "riemkit/catalog.hpp"
#include "riemkit/expr.hpp"
#include "riemkit/inequality.hpp"

#include <benchmark/benchmark.h>

using namespace riemkit;

static void BM_ParseExpression(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(parse_expression("4*(1 + x2^2)/((1 + x1^2 + x2^2)^2) + sin(x1)*exp(-x2)", 2));
}
BENCHMARK(BM_ParseExpression);

static void BM_CurvatureFubiniStudy(benchmark::State& state) {
  const CatalogEntry e = catalog_get_call("fubini_study(2)");
  const Vec p = e.sample(1, 3)[0];
  const Backend backend = state.range(0) == 0 ? Backend::jet : Backend::finite_difference;
  for (auto _ : state) benchmark::DoNotOptimize(curvature_at(*e.manifold, p, backend));
}
BENCHMARK(BM_CurvatureFubiniStudy)->Arg(0)->Arg(1);

static void BM_AnalyzeHopf(benchmark::State& state) {
  const CatalogEntry e = catalog_get("hopf");
  const Vec p = e.sample(1, 4)[0];
  for (auto _ : state) benchmark::DoNotOptimize(analyze_submersion(*e.submersion, p));
}
BENCHMARK(BM_AnalyzeHopf)->Unit(benchmark::kMillisecond);

static void BM_AnalyzeCylinderGraph(benchmark::State& state) {
  const CatalogEntry e = catalog_get("cylinder_graph_map");
  const Vec p = e.sample(1, 5)[0];
  for (auto _ : state) {
    const MapAnalysis a = analyze_map(*e.map, p);
    benchmark::DoNotOptimize(verify_RM_ICRI(a));
  }
}
BENCHMARK(BM_AnalyzeCylinderGraph)->Unit(benchmark::kMillisecond);

static void BM_EqualityPattern(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  std::vector<double> b(static_cast<std::size_t>(4 * q), 0.0);
  b[0] = 0.9;
  b[static_cast<std::size_t>(3 * q)] = 0.3;
  b[static_cast<std::size_t>(q + 1)] = 0.3;
  b[static_cast<std::size_t>(2 * q + 1)] = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(classify_equality_pattern(b, 2, q));
}
BENCHMARK(BM_EqualityPattern)->Arg(2)->Arg(3);
BENCHMARK_MAIN();
