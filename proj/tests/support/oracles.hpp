#pragma once

// Independent numerical references used by the unit and acceptance tests.

#include "riemkit/catalog.hpp"
#include "riemkit/expr.hpp"
#include "riemkit/geometry.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace riemkit::oracle {

inline double value_at(const Expression& e, const Vec& p) { return evaluate(e, p.data(), static_cast<int>(p.size())); }

// Central difference with one Richardson step.
inline double fd_partial(const Expression& e, const Vec& p, int i, double h = 1e-3) {
  auto central = [&](double step) {
    Vec a = p, b = p;
    a[i] += step;
    b[i] -= step;
    return (value_at(e, a) - value_at(e, b)) / (2 * step);
  };
  return (4 * central(h / 2) - central(h)) / 3;
}

inline double fd_second(const Expression& e, const Vec& p, int i, int j, double h = 1e-3) {
  auto shifted = [&](double si, double sj) {
    Vec q = p;
    q[i] += si;
    q[j] += sj;
    return value_at(e, q);
  };
  auto central = [&](double step) {
    if (i == j) return (shifted(step, 0) - 2 * value_at(e, p) + shifted(-step, 0)) / (step * step);
    return (shifted(step, step) - shifted(step, -step) - shifted(-step, step) + shifted(-step, -step)) /
           (4 * step * step);
  };
  return (4 * central(h / 2) - central(h)) / 3;
}

// Christoffel symbols from a finite-difference metric derivative, written
// out directly from the Koszul formula.
inline std::vector<double> fd_christoffel(const ChartManifold& m, const Vec& p, double h = 1e-4) {
  const int d = m.dim();
  std::vector<Mat> dg(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    Vec a = p, b = p;
    a[k] += h;
    b[k] -= h;
    Vec a2 = p, b2 = p;
    a2[k] += h / 2;
    b2[k] -= h / 2;
    Mat coarse = (m.metric(a) - m.metric(b)) / (2 * h);
    Mat fine = (m.metric(a2) - m.metric(b2)) / h;
    dg[static_cast<std::size_t>(k)] = (4 * fine - coarse) / 3;
  }
  const Mat ginv = m.metric(p).inverse();
  std::vector<double> gamma(static_cast<std::size_t>(d * d * d), 0.0);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int l = 0; l < d; ++l)
          s += ginv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                             dg[static_cast<std::size_t>(l)](i, j));
        gamma[static_cast<std::size_t>((k * d + i) * d + j)] = 0.5 * s;
      }
  return gamma;
}

// Holomorphic-type model: c1 {g(Y,Z)g(X,W) - g(X,Z)g(Y,W)}
//   + c2 {g(X,JZ)g(JY,W) - g(Y,JZ)g(JX,W) + 2 g(X,JY)g(JZ,W)}
inline double complex_model(double c1, double c2, const Mat& g, const Mat& J, const Vec& x, const Vec& y,
                            const Vec& z, const Vec& w) {
  auto ip = [&](const Vec& a, const Vec& b) { return a.dot(g * b); };
  const Vec Jx = J * x, Jy = J * y, Jz = J * z;
  return c1 * (ip(y, z) * ip(x, w) - ip(x, z) * ip(y, w)) +
         c2 * (ip(x, Jz) * ip(Jy, w) - ip(y, Jz) * ip(Jx, w) + 2 * ip(x, Jy) * ip(Jz, w));
}

inline double constant_curvature_model(double c, const Mat& g, const Vec& x, const Vec& y, const Vec& z,
                                       const Vec& w) {
  auto ip = [&](const Vec& a, const Vec& b) { return a.dot(g * b); };
  return c * (ip(y, z) * ip(x, w) - ip(x, z) * ip(y, w));
}

// Seeded orthonormal tuple via modified Gram-Schmidt in the metric g.
inline std::vector<Vec> orthonormal_tuple(const Mat& g, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = static_cast<int>(g.rows());
  std::vector<Vec> out;
  while (static_cast<int>(out.size()) < count) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    for (const Vec& e : out) v -= e.dot(g * v) * e;
    const double n = std::sqrt(v.dot(g * v));
    if (n < 1e-6) continue;
    out.push_back(v / n);
  }
  return out;
}

// Random symmetric component array c[(i*n + j)*r + t] with c_ij = c_ji.
inline std::vector<double> symmetric_components(int n, int r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> c(static_cast<std::size_t>(n * n * r));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int t = 0; t < r; ++t) {
        const double v = u(rng);
        c[static_cast<std::size_t>((i * n + j) * r + t)] = v;
        c[static_cast<std::size_t>((j * n + i) * r + t)] = v;
      }
  return c;
}

// Every manifold a catalog entry touches, with points on it.
struct ManifoldSample {
  std::string label;
  ChartManifold manifold;
  std::vector<Vec> points;
};

inline std::vector<ManifoldSample> catalog_manifolds(int count, std::uint64_t seed) {
  std::vector<ManifoldSample> out;
  auto add = [&](const std::string& call) {
    CatalogEntry e = catalog_get_call(call);
    std::vector<Vec> pts = e.sample(count, seed);
    if (e.manifold) out.push_back({call, *e.manifold, pts});
    if (e.submersion) {
      std::vector<Vec> img;
      for (const Vec& p : pts) img.push_back(map_value(*e.submersion, p));
      out.push_back({call + ":source", e.submersion->source, pts});
      out.push_back({call + ":target", e.submersion->target, img});
    }
    if (e.map) {
      std::vector<Vec> img;
      for (const Vec& p : pts) img.push_back(map_value(e.map->map, p));
      out.push_back({call + ":source", e.map->map.source, pts});
      out.push_back({call + ":target", e.map->map.target, img});
    }
  };
  for (const auto& info : catalog_list()) add(info.id);
  add("fubini_study(2)");
  add("sasakian_sphere(1)");
  add("sasakian_sphere(3)");
  add("poincare(4,-2)");
  add("sphere(2,0.5)");
  return out;
}

}  // namespace riemkit::oracle

namespace riemkit::oracle {

// Random well-conditioned expression text over x1..x<dim>: every log, sqrt and
// division sees an argument bounded away from zero on [-1, 1]^dim.
inline std::string random_expression(std::mt19937_64& rng, int dim, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<int> var(1, dim);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  auto leaf = [&]() -> std::string {
    if (pick(rng) < 3) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", coef(rng));
      return buf[0] == '-' ? "(" + std::string(buf) + ")" : std::string(buf);
    }
    return "x" + std::to_string(var(rng));
  };
  if (depth <= 0) return leaf();
  const std::string a = random_expression(rng, dim, depth - 1);
  const std::string b = random_expression(rng, dim, depth - 1);
  switch (pick(rng)) {
    case 0: return "(" + a + " + " + b + ")";
    case 1: return "(" + a + " - " + b + ")";
    case 2: return a + " * " + b;
    case 3: return "(" + a + ") / (2 + sin(" + b + "))";
    case 4: return "sin(" + a + ")";
    case 5: return "cos(" + a + ") * " + b;
    case 6: return "exp(sin(" + a + "))";
    case 7: return "log(3 + cos(" + a + "))";
    case 8: return "sqrt(2 + sin(" + a + "))";
    default: return "(" + a + ")^" + std::to_string(std::uniform_int_distribution<int>(0, 3)(rng)) + " * " + b;
  }
}

}  // namespace riemkit::oracle

namespace riemkit::oracle {

// Horizontal lift of a target vector w at q: v = G^-1 dF^T (dF G^-1 dF^T)^-1 w.
inline Vec horizontal_lift(const SmoothMap& f, const Vec& q, const Vec& w) {
  const Mat J = map_jacobian(f, q);
  const Mat Ginv = f.source.metric(q).inverse();
  const Mat M = J * Ginv * J.transpose();
  return Ginv * J.transpose() * M.ldlt().solve(w);
}

// Target orthonormal frame from coordinate vectors (Gram-Schmidt, coordinate order).
inline std::vector<Vec> target_frame(const SmoothMap& f, const Vec& y) {
  const Mat g = f.target.metric(y);
  std::vector<Vec> out;
  for (int i = 0; i < f.target_dim(); ++i) {
    Vec v = Vec::Unit(f.target_dim(), i);
    for (const Vec& e : out) v -= e.dot(g * v) * e;
    out.push_back(v / std::sqrt(v.dot(g * v)));
  }
  return out;
}

// |A_{X_a} X_b|^2 = |V[X_a, X_b]|^2 / 4 for basic lifts of the target frame,
// with the bracket taken by central differences.
inline double oneill_A_sq_fd(const SmoothMap& f, const Vec& p, int a, int b, double h = 1e-5) {
  auto lift = [&](const Vec& q, int k) { return horizontal_lift(f, q, target_frame(f, map_value(f, q))[k]); };
  auto directional = [&](int k, const Vec& dir) {
    return Vec((lift(p + h * dir, k) - lift(p - h * dir, k)) / (2 * h));
  };
  const Vec X = lift(p, a), Y = lift(p, b);
  const Vec bracket = directional(b, X) - directional(a, Y);
  const Mat J = map_jacobian(f, p);
  const Mat g = f.source.metric(p);
  // vertical part: remove the horizontal component
  const Vec horizontal = horizontal_lift(f, p, J * bracket);
  const Vec vertical = bracket - horizontal;
  return vertical.dot(g * vertical) / 4.0;
}

}  // namespace riemkit::oracle

namespace riemkit::oracle {

// B11 = 3 mu V1, B22 = mu V1, B12 = mu V2, then rotated by (phi) in the
// horizontal plane and by an orthogonal Q in the normal space.
inline std::vector<double> injected_pattern(double mu, int q, double phi, const Mat& Q) {
  const int r = 2;
  std::vector<double> base(static_cast<std::size_t>(r * r * q), 0.0);
  auto at = [&](std::vector<double>& b, int i, int j, int a) -> double& {
    return b[static_cast<std::size_t>((i * r + j) * q + a)];
  };
  at(base, 0, 0, 0) = 3 * mu;
  at(base, 1, 1, 0) = mu;
  at(base, 0, 1, 1) = mu;
  at(base, 1, 0, 1) = mu;
  Mat R(2, 2);
  R << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  std::vector<double> out(base.size(), 0.0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int a = 0; a < q; ++a) {
        double s = 0.0;
        for (int k = 0; k < r; ++k)
          for (int l = 0; l < r; ++l)
            for (int b = 0; b < q; ++b) s += R(i, k) * R(j, l) * Q(a, b) * at(base, k, l, b);
        at(out, i, j, a) = s;
      }
  return out;
}

inline Mat random_orthogonal(int q, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ();
}

}  // namespace riemkit::oracle
