#pragma once

#include "riemkit/geometry.hpp"

#include <string>
#include <vector>

namespace riemkit {

// F : source -> target, one expression per target coordinate.
struct SmoothMap {
  std::string name;
  ChartManifold source;
  ChartManifold target;
  std::vector<Expression> components;

  int source_dim() const { return source.dim(); }
  int target_dim() const { return target.dim(); }
};

struct MapJetAt {
  Vec value;
  Mat jacobian;               // target_dim x source_dim
  std::vector<Mat> hessians;  // one source_dim x source_dim block per component
};

MapJetAt map_jet(const SmoothMap& f, const Vec& p);
Vec map_value(const SmoothMap& f, const Vec& p);
Mat map_jacobian(const SmoothMap& f, const Vec& p);

// Second fundamental form of the map,
// (nabla F*)(X,Y)^k = X^a Y^b (d_a d_b F^k - Gamma1^c_ab d_c F^k + Gamma2^k_ij d_a F^i d_b F^j),
// target Christoffels taken at F(p).
Vec map_second_fundamental_form(const MapJetAt& jet, const CurvatureData& source_curv,
                                const std::vector<double>& target_gamma, const Vec& x, const Vec& y);

}  // namespace riemkit
