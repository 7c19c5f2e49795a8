#include "riemkit/errors.hpp"
#include "riemkit/tensor.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace riemkit;

namespace {

Mat random_spd(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng);
  return a * a.transpose() + d * Mat::Identity(d, d);
}

}  // namespace

TEST(Tensor, GramSchmidtIsOrthonormalInTheMetric) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int d = 2; d <= 8; ++d) {
    Mat metric = random_spd(d, rng);
    std::vector<Vec> raw;
    for (int k = 0; k < d; ++k) raw.push_back(Vec::NullaryExpr(d, [&]() { return g(rng); }));
    Frame f = gram_schmidt(raw, metric);
    ASSERT_EQ(f.size(), d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) EXPECT_NEAR(inner(f[a], f[b], metric), a == b ? 1.0 : 0.0, 1e-12);
    // input order kept: first vector is parallel to raw[0]
    EXPECT_NEAR(std::abs(inner(f[0], raw[0], metric)), norm(raw[0], metric), 1e-10);
  }
}

TEST(Tensor, GramSchmidtRejectsDependentInput) {
  Mat g = Mat::Identity(3, 3);
  Vec a(3), b(3);
  a << 1, 2, 3;
  b = 2 * a;
  EXPECT_THROW(gram_schmidt({a, b}, g), Error);
}

TEST(Tensor, KernelSplitOfProjection) {
  Mat map(2, 4);
  map << 1, 0, 0, 0, 0, 1, 1, 0;
  Mat g = Mat::Identity(4, 4);
  KernelSplit s = kernel_split(map, g);
  EXPECT_EQ(s.rank, 2);
  EXPECT_EQ(s.kernel.size(), 2);
  EXPECT_EQ(s.complement.size(), 2);
  for (int i = 0; i < s.kernel.size(); ++i) EXPECT_LT((map * s.kernel[i]).norm(), 1e-12);
  for (int i = 0; i < s.kernel.size(); ++i)
    for (int j = 0; j < s.complement.size(); ++j) EXPECT_NEAR(inner(s.kernel[i], s.complement[j], g), 0.0, 1e-12);
}

TEST(Tensor, NumericalRankUsesRelativeThreshold) {
  Mat m = Mat::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 1e-12;
  EXPECT_EQ(numerical_rank(m), 1);
  m(1, 1) = 1e-6;
  EXPECT_EQ(numerical_rank(m), 2);
}

TEST(Tensor, ProjectorIsIdempotentAndSelfAdjoint) {
  std::mt19937_64 rng(9);
  Mat g = random_spd(5, rng);
  Mat basis = Mat::Random(5, 2);
  Mat P = orthogonal_projector(basis, g);
  EXPECT_LT((P * P - P).norm(), 1e-12);
  // g-self-adjoint: g P = P^T g
  EXPECT_LT((g * P - P.transpose() * g).norm(), 1e-10);
}

TEST(Tensor, RotationWithFirstRow) {
  Vec v(4);
  v << 1, -2, 0.5, 3;
  Mat R = rotation_with_first(v);
  EXPECT_LT((R * R.transpose() - Mat::Identity(4, 4)).norm(), 1e-12);
  EXPECT_LT((Vec(R.row(0).transpose()) - v.normalized()).norm(), 1e-12);
}
