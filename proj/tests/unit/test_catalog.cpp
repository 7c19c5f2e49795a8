#include "riemkit/catalog.hpp"
#include "riemkit/errors.hpp"

#include <gtest/gtest.h>

using namespace riemkit;

TEST(Catalog, ListsEveryEntryWithSignature) {
  const auto list = catalog_list();
  ASSERT_GE(list.size(), 13u);
  for (const auto& info : list) {
    EXPECT_FALSE(info.description.empty()) << info.id;
    EXPECT_EQ(info.signature.rfind(info.id, 0), 0u) << info.signature;
    EXPECT_NO_THROW(catalog_get(info.id)) << info.id;
  }
}

TEST(Catalog, UnknownIdAndBadParams) {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::DegenerateInput;
  };
  EXPECT_EQ(code_of([] { catalog_get("klein_bottle"); }), ErrorCode::UnknownId);
  EXPECT_EQ(code_of([] { catalog_get("euclid_proj", {{"m", 3}, {"n", 3}}); }), ErrorCode::BadParams);
  EXPECT_EQ(code_of([] { catalog_get("euclid_proj", {{"m", 2.5}}); }), ErrorCode::BadParams);
  EXPECT_EQ(code_of([] { catalog_get("warped_radial", {{"rho", 10}}); }), ErrorCode::BadParams);
  EXPECT_EQ(code_of([] { catalog_get("warped_radial", {{"radius", 1}}); }), ErrorCode::BadParams);
  EXPECT_EQ(code_of([] { catalog_get("poincare", {{"c", 1}}); }), ErrorCode::BadParams);
  EXPECT_EQ(code_of([] { catalog_get_call("euclid_proj(3,2,1)"); }), ErrorCode::BadParams);
  EXPECT_EQ(code_of([] { catalog_get_call("euclid_proj(3,"); }), ErrorCode::BadParams);
}

TEST(Catalog, CallSyntaxIsPositional) {
  const CatalogEntry e = catalog_get_call("euclid_proj(4,1)");
  EXPECT_EQ(e.submersion->source_dim(), 4);
  EXPECT_EQ(e.submersion->target_dim(), 1);
  EXPECT_DOUBLE_EQ(e.params.at("m"), 4.0);
  const CatalogEntry d = catalog_get_call("sphere");
  EXPECT_DOUBLE_EQ(d.params.at("c"), 1.0);
}

TEST(Catalog, SamplersAreDeterministicAndInsideTheDomain) {
  for (const auto& info : catalog_list()) {
    const CatalogEntry e = catalog_get(info.id);
    const auto a = e.sample(10, 5);
    const auto b = e.sample(10, 5);
    const auto c = e.sample(10, 6);
    ASSERT_EQ(a.size(), 10u);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i], b[i]) << info.id;
      differs = differs || a[i] != c[i];
      const ChartManifold& m = e.submersion ? e.submersion->source : e.map ? e.map->map.source : *e.manifold;
      EXPECT_TRUE(m.domain().contains(a[i])) << info.id;
    }
    EXPECT_TRUE(differs) << info.id;
  }
}

TEST(Catalog, KindsAndSpaceForms) {
  EXPECT_EQ(catalog_get("hopf").kind, ProblemKind::submersion);
  EXPECT_EQ(catalog_get("cylinder_graph_map").kind, ProblemKind::riemannian_map);
  EXPECT_EQ(catalog_get("fubini_study").kind, ProblemKind::manifold);
  EXPECT_EQ(catalog_get("hopf_contact").space_form->kind, SpaceFormKind::sasakian);
  EXPECT_EQ(catalog_get("euclid_map").space_form->kind, SpaceFormKind::cosymplectic);
  EXPECT_EQ(catalog_get("hopf_contact").known.facts.at("xi_position"), "vertical");
}
