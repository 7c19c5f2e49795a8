#pragma once

#include "riemkit/geometry.hpp"

#include <functional>

namespace riemkit {

using Field = std::function<Vec(const Vec&)>;

Field constant_field(const Vec& v);

// d/dt W(p + t X) at t = 0; central differences with one Richardson step,
// base step scaled by (1 + |p|_inf).
Vec directional_derivative(const Field& w, const Vec& p, const Vec& x, double base_step = 1e-4);

// (nabla_X W)^k = X^i d_i W^k + Gamma^k_ij X^i W^j
Vec covariant_derivative(const CurvatureData& c, const Field& w, const Vec& x, double base_step = 1e-4);
Vec covariant_derivative(const ChartManifold& m, const Field& w, const Vec& x, const Vec& p,
                         Backend backend = Backend::jet);

}  // namespace riemkit
