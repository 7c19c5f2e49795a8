#include "riemkit/smooth_map.hpp"

namespace riemkit {

MapJetAt map_jet(const SmoothMap& f, const Vec& p) {
  const int m1 = f.source_dim(), m2 = f.target_dim();
  MapJetAt out;
  out.value = Vec(m2);
  out.jacobian = Mat(m2, m1);
  out.hessians.assign(static_cast<std::size_t>(m2), Mat(m1, m1));
  for (int k = 0; k < m2; ++k) {
    Jet2 j = evaluate_jet(f.components[static_cast<std::size_t>(k)], p.data(), m1);
    out.value(k) = j.value;
    for (int a = 0; a < m1; ++a) {
      out.jacobian(k, a) = j.d(a);
      for (int b = 0; b < m1; ++b) out.hessians[static_cast<std::size_t>(k)](a, b) = j.dd(a, b);
    }
  }
  return out;
}

Vec map_value(const SmoothMap& f, const Vec& p) {
  Vec v(f.target_dim());
  for (int k = 0; k < f.target_dim(); ++k)
    v(k) = evaluate(f.components[static_cast<std::size_t>(k)], p.data(), f.source_dim());
  return v;
}

Mat map_jacobian(const SmoothMap& f, const Vec& p) { return map_jet(f, p).jacobian; }

Vec map_second_fundamental_form(const MapJetAt& jet, const CurvatureData& source_curv,
                                const std::vector<double>& target_gamma, const Vec& x, const Vec& y) {
  const int m2 = static_cast<int>(jet.value.size());
  Vec out(m2);
  Vec gxy = source_curv.connection_term(x, y);
  Vec fx = jet.jacobian * x, fy = jet.jacobian * y;
  for (int k = 0; k < m2; ++k) {
    double s = x.dot(jet.hessians[static_cast<std::size_t>(k)] * y) - jet.jacobian.row(k).dot(gxy);
    for (int i = 0; i < m2; ++i)
      for (int j = 0; j < m2; ++j) s += target_gamma[static_cast<std::size_t>((k * m2 + i) * m2 + j)] * fx(i) * fy(j);
    out(k) = s;
  }
  return out;
}

}  // namespace riemkit
