#include "riemkit/fields.hpp"

#include <cmath>

namespace riemkit {

Field constant_field(const Vec& v) {
  return [v](const Vec&) { return v; };
}

Vec directional_derivative(const Field& w, const Vec& p, const Vec& x, double base_step) {
  double xlen = x.cwiseAbs().maxCoeff();
  if (xlen == 0.0) return Vec::Zero(w(p).size());
  double h = base_step * (1.0 + p.cwiseAbs().maxCoeff()) / xlen;
  auto central = [&](double step) -> Vec { return (w(p + step * x) - w(p - step * x)) / (2.0 * step); };
  return (4.0 * central(h / 2) - central(h)) / 3.0;
}

Vec covariant_derivative(const CurvatureData& c, const Field& w, const Vec& x, double base_step) {
  return directional_derivative(w, c.point, x, base_step) + c.connection_term(x, w(c.point));
}

Vec covariant_derivative(const ChartManifold& m, const Field& w, const Vec& x, const Vec& p, Backend backend) {
  CurvatureData c;
  c.dim = m.dim();
  c.point = p;
  c.metric = m.metric(p);
  c.gamma = christoffel(m, p, backend);
  return covariant_derivative(c, w, x);
}

}  // namespace riemkit
