#include "riemkit/submersion.hpp"

#include "riemkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace riemkit {

double OneillProperties::worst() const {
  return std::max(std::max(A_antisymmetry, T_symmetry), std::max(T_skew, A_skew));
}

double IdentitySides::residual() const { return std::fabs(lhs - rhs); }

namespace {

Mat fixed_kernel_basis(const Mat& jac, int n) {
  Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(n);
}

Vec connection(const std::vector<double>& gamma, int d, const Vec& x, const Vec& y) {
  Vec out = Vec::Zero(d);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i) {
      if (x(i) == 0.0) continue;
      for (int j = 0; j < d; ++j) out(k) += gamma[static_cast<std::size_t>((k * d + i) * d + j)] * x(i) * y(j);
    }
  return out;
}

std::size_t idx4(int k, int a, int b, int c, int d) {
  return static_cast<std::size_t>(((a * k + b) * k + c) * k + d);
}

RelationAudit decide(const std::vector<double>& L, const std::vector<double>& I, const std::vector<double>& C,
                     const char* what) {
  RelationAudit out;
  out.tuples = static_cast<int>(L.size());
  double big = 0.0;
  for (std::size_t k = 0; k < L.size(); ++k) {
    out.residual_plus = std::max(out.residual_plus, std::fabs(L[k] - I[k] - C[k]));
    out.residual_minus = std::max(out.residual_minus, std::fabs(L[k] - I[k] + C[k]));
    big = std::max({big, std::fabs(L[k]), std::fabs(I[k]), std::fabs(C[k])});
  }
  out.scale = 1.0 + big;
  double tol = 1e-6 * out.scale;
  bool plus = out.residual_plus <= tol;
  bool minus = out.residual_minus <= tol;
  if (plus && minus) {
    out.sign = 1;
    out.determined = false;
  } else if (plus || minus) {
    out.sign = plus ? 1 : -1;
    out.determined = true;
  } else {
    throw Error(ErrorCode::AuditFailure,
                std::string(what) + " relation fails for both signs (residuals " + std::to_string(out.residual_plus) +
                    ", " + std::to_string(out.residual_minus) + ")");
  }
  return out;
}

std::vector<double> transform4(const std::vector<double>& src, const Mat& O) {
  const int k = static_cast<int>(O.rows());
  std::vector<double> tmp = src, out(src.size(), 0.0);
  // contract one slot at a time
  for (int slot = 0; slot < 4; ++slot) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        for (int c = 0; c < k; ++c)
          for (int d = 0; d < k; ++d) {
            int ids[4] = {a, b, c, d};
            double s = 0.0;
            for (int m = 0; m < k; ++m) {
              int src_ids[4] = {a, b, c, d};
              src_ids[slot] = m;
              s += O(ids[slot], m) * tmp[idx4(k, src_ids[0], src_ids[1], src_ids[2], src_ids[3])];
            }
            out[idx4(k, a, b, c, d)] = s;
          }
    tmp = out;
  }
  return tmp;
}

}  // namespace

SubmersionGeometry::SubmersionGeometry(const SubmersionProblem& prob, const Vec& base_point, double outer_step)
    : prob_(&prob), outer_step_(outer_step) {
  const int m1 = prob.source_dim(), m2 = prob.target_dim();
  r_ = m2;
  n_ = m1 - m2;
  Mat pv = vertical_projector(base_point);
  Mat g = prob.source.metric(base_point);
  Mat ph = Mat::Identity(m1, m1) - pv;
  greedy_frame(pv, g, n_, FrameLabel::vertical, &vertical_idx_);
  greedy_frame(ph, g, r_, FrameLabel::horizontal, &horizontal_idx_);
}

Mat SubmersionGeometry::vertical_projector(const Vec& q) const {
  Mat jac = map_jacobian(*prob_, q);
  Mat kb = fixed_kernel_basis(jac, n_);
  return orthogonal_projector(kb, prob_->source.metric(q));
}

Field SubmersionGeometry::vertical_frame(int a) const {
  const SubmersionGeometry* self = this;
  return [self, a](const Vec& q) -> Vec {
    Mat pv = self->vertical_projector(q);
    Mat g = self->prob_->source.metric(q);
    return frame_from_indices(pv, g, self->vertical_idx_, FrameLabel::vertical)[a];
  };
}

Field SubmersionGeometry::horizontal_frame(int t) const {
  const SubmersionGeometry* self = this;
  return [self, t](const Vec& q) -> Vec {
    Mat pv = self->vertical_projector(q);
    Mat g = self->prob_->source.metric(q);
    Mat ph = Mat::Identity(pv.rows(), pv.cols()) - pv;
    return frame_from_indices(ph, g, self->horizontal_idx_, FrameLabel::horizontal)[t];
  };
}

Vec SubmersionGeometry::nabla(const Field& w, const Vec& x, const Vec& q, double step) const {
  std::vector<double> gamma = christoffel(prob_->source, q);
  return directional_derivative(w, q, x, step) + connection(gamma, prob_->source_dim(), x, w(q));
}

Vec SubmersionGeometry::T(const Field& e, const Field& f, const Vec& q) const {
  const int m1 = prob_->source_dim();
  Mat pv = vertical_projector(q);
  Mat ph = Mat::Identity(m1, m1) - pv;
  Vec ve = pv * e(q);
  const SubmersionGeometry* self = this;
  Field vf = [self, f](const Vec& y) -> Vec { return self->vertical_projector(y) * f(y); };
  Vec d_vf = nabla(vf, ve, q);
  Vec d_hf = nabla(f, ve, q) - d_vf;
  return ph * d_vf + pv * d_hf;
}

Vec SubmersionGeometry::A(const Field& e, const Field& f, const Vec& q) const {
  const int m1 = prob_->source_dim();
  Mat pv = vertical_projector(q);
  Mat ph = Mat::Identity(m1, m1) - pv;
  Vec he = ph * e(q);
  const SubmersionGeometry* self = this;
  Field vf = [self, f](const Vec& y) -> Vec { return self->vertical_projector(y) * f(y); };
  Vec d_vf = nabla(vf, he, q);
  Vec d_hf = nabla(f, he, q) - d_vf;
  return pv * d_hf + ph * d_vf;
}

Vec SubmersionGeometry::nabla_T(const Field& x, const Field& u, const Field& v, const Vec& q) const {
  const SubmersionGeometry* self = this;
  Vec X = x(q);
  Field tuv = [self, u, v](const Vec& y) -> Vec { return self->T(u, v, y); };
  Vec outer = nabla(tuv, X, q, outer_step_);
  Vec nxu = nabla(u, X, q);
  Vec nxv = nabla(v, X, q);
  return outer - T(constant_field(nxu), v, q) - T(u, constant_field(nxv), q);
}

Vec SubmersionGeometry::nabla_A(const Field& x, const Field& u, const Field& v, const Vec& q) const {
  const SubmersionGeometry* self = this;
  Vec X = x(q);
  Field auv = [self, u, v](const Vec& y) -> Vec { return self->A(u, v, y); };
  Vec outer = nabla(auv, X, q, outer_step_);
  Vec nxu = nabla(u, X, q);
  Vec nxv = nabla(v, X, q);
  return outer - A(constant_field(nxu), v, q) - A(u, constant_field(nxv), q);
}

std::vector<double> SubmersionGeometry::fiber_curvature(const Vec& q) const {
  const int n = n_;
  std::vector<double> out(static_cast<std::size_t>(n * n * n * n), 0.0);
  if (n < 2) return out;
  std::vector<Field> E;
  std::vector<Vec> Eq;
  for (int a = 0; a < n; ++a) {
    E.push_back(vertical_frame(a));
    Eq.push_back(E.back()(q));
  }
  Mat pv = vertical_projector(q);
  Mat g = prob_->source.metric(q);
  const SubmersionGeometry* self = this;
  // vertical connection of the fiber: v(nabla_Y Z)
  auto inner_field = [self](const Field& y, const Field& z) -> Field {
    return [self, y, z](const Vec& s) -> Vec { return self->vertical_projector(s) * self->nabla(z, y(s), s); };
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      Vec bracket = nabla(E[static_cast<std::size_t>(b)], Eq[static_cast<std::size_t>(a)], q) -
                    nabla(E[static_cast<std::size_t>(a)], Eq[static_cast<std::size_t>(b)], q);
      for (int c = 0; c < n; ++c) {
        Field wbc = inner_field(E[static_cast<std::size_t>(b)], E[static_cast<std::size_t>(c)]);
        Field wac = inner_field(E[static_cast<std::size_t>(a)], E[static_cast<std::size_t>(c)]);
        Vec t1 = pv * nabla(wbc, Eq[static_cast<std::size_t>(a)], q, outer_step_);
        Vec t2 = pv * nabla(wac, Eq[static_cast<std::size_t>(b)], q, outer_step_);
        Vec t3 = pv * nabla(E[static_cast<std::size_t>(c)], bracket, q);
        Vec rv = t1 - t2 - t3;
        for (int d = 0; d < n; ++d) out[idx4(n, a, b, c, d)] = inner(rv, Eq[static_cast<std::size_t>(d)], g);
      }
    }
  return out;
}

double SubmersionGeometry::delta_N(const Vec& q) const {
  Mat g = prob_->source.metric(q);
  double s = 0.0;
  for (int i = 0; i < r_; ++i) {
    Field h = horizontal_frame(i);
    Vec hq = h(q);
    for (int j = 0; j < n_; ++j) {
      Field v = vertical_frame(j);
      s += inner(nabla_T(h, v, v, q), hq, g);
    }
  }
  return s;
}

IdentitySides identity_sum_of_squares(const std::vector<double>& comp, int n, int r) {
  auto T = [&](int i, int j, int t) { return comp[static_cast<std::size_t>((i * n + j) * r + t)]; };
  IdentitySides s;
  for (int t = 0; t < r; ++t) {
    double trace = 0.0, rest = 0.0, cross = 0.0, pairs = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.lhs += T(i, j, t) * T(i, j, t);
    for (int i = 0; i < n; ++i) trace += T(i, i, t);
    for (int j = 1; j < n; ++j) rest += T(j, j, t);
    for (int j = 1; j < n; ++j) cross += T(0, j, t) * T(0, j, t);
    for (int i = 1; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs += T(i, i, t) * T(j, j, t) - T(i, j, t) * T(i, j, t);
    double lead = T(0, 0, t) - rest;
    s.rhs += 0.5 * trace * trace + 0.5 * lead * lead + 2.0 * cross - 2.0 * pairs;
  }
  return s;
}

double fiber_correction(const SubmersionAnalysis& a) {
  double s = 0.0;
  for (int t = 0; t < a.r; ++t)
    for (int j = 1; j < a.n; ++j) s += a.T(0, 0, t) * a.T(j, j, t) - a.T(0, j, t) * a.T(0, j, t);
  return s;
}

double horizontal_correction(const SubmersionAnalysis& a) {
  double s = 0.0;
  for (int al = 0; al < a.n; ++al)
    for (int j = 1; j < a.r; ++j) s += a.A(0, j, al) * a.A(0, j, al);
  return s;
}

RelationAudit audit_vertical_relation(const SubmersionAnalysis& a) {
  std::vector<double> L, I, C;
  const int n = a.n;
  if (a.fiber_curvature_computed) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double corr = 0.0;
            for (int t = 0; t < a.r; ++t) corr += a.T(i, l, t) * a.T(j, k, t) - a.T(j, l, t) * a.T(i, k, t);
            L.push_back(a.R_vert_M1[idx4(n, i, j, k, l)]);
            I.push_back(a.R_vert_ker[idx4(n, i, j, k, l)]);
            C.push_back(corr);
          }
  }
  return decide(L, I, C, "fiber");
}

RelationAudit audit_horizontal_relation(const SubmersionAnalysis& a) {
  std::vector<double> L, I, C;
  const int r = a.r;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l) {
          double corr = 0.0;
          for (int al = 0; al < a.n; ++al)
            corr += -2.0 * a.A(i, j, al) * a.A(k, l, al) + a.A(j, k, al) * a.A(i, l, al) - a.A(i, k, al) * a.A(j, l, al);
          L.push_back(a.R_hor_M1[idx4(r, i, j, k, l)]);
          I.push_back(a.R_hor_perp[idx4(r, i, j, k, l)]);
          C.push_back(corr);
        }
  return decide(L, I, C, "horizontal");
}

RelationAudit audit_mixed_relation(const SubmersionGeometry& geo, const SubmersionAnalysis& a, int max_tuples) {
  std::vector<double> L, I, C;
  const Vec& p = a.point;
  CurvatureData curv = curvature_at(geo.problem().source, p);
  const Mat& g = curv.metric;
  std::vector<std::array<int, 4>> tuples;
  // diagonal tuples first, they are the ones the theorems use
  for (int i = 0; i < a.r; ++i)
    for (int j = 0; j < a.n; ++j) tuples.push_back({i, j, i, j});
  for (int i = 0; i < a.r; ++i)
    for (int j = 0; j < a.n; ++j)
      for (int k = 0; k < a.r; ++k)
        for (int l = 0; l < a.n; ++l)
          if (!(i == k && j == l)) tuples.push_back({i, j, k, l});
  if (static_cast<int>(tuples.size()) > max_tuples) tuples.resize(static_cast<std::size_t>(max_tuples));
  for (const auto& tp : tuples) {
    Field y1 = geo.horizontal_frame(tp[0]), u1 = geo.vertical_frame(tp[1]);
    Field y2 = geo.horizontal_frame(tp[2]), u2 = geo.vertical_frame(tp[3]);
    Vec Y1 = a.horizontal[tp[0]], U1 = a.vertical[tp[1]], Y2 = a.horizontal[tp[2]], U2 = a.vertical[tp[3]];
    double corr = inner(geo.nabla_T(y1, u1, u2, p), Y2, g) + inner(geo.nabla_A(u1, y1, y2, p), U2, g) -
                  inner(geo.T(u1, y1, p), geo.T(u2, y2, p), g) + inner(geo.A(y2, u2, p), geo.A(y1, u1, p), g);
    L.push_back(curv.form(Y1, U1, Y2, U2));
    I.push_back(0.0);
    C.push_back(corr);
  }
  return decide(L, I, C, "mixed");
}

SignProfile merge_profiles(const std::vector<SignProfile>& profiles) {
  SignProfile out;
  auto merge = [](RelationAudit& acc, const RelationAudit& next, bool first, const char* what) {
    if (first) {
      acc = next;
      return;
    }
    if (acc.determined && next.determined && acc.sign != next.sign)
      throw Error(ErrorCode::AuditFailure, std::string(what) + " relation sign flips between sample points");
    if (!acc.determined && next.determined) {
      acc.sign = next.sign;
      acc.determined = true;
    }
    acc.residual_plus = std::max(acc.residual_plus, next.residual_plus);
    acc.residual_minus = std::max(acc.residual_minus, next.residual_minus);
    acc.scale = std::max(acc.scale, next.scale);
    acc.tuples += next.tuples;
  };
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    merge(out.vertical, profiles[i].vertical, i == 0, "fiber");
    merge(out.horizontal, profiles[i].horizontal, i == 0, "horizontal");
    merge(out.mixed, profiles[i].mixed, i == 0, "mixed");
  }
  return out;
}

void fill_scalar_block(SubmersionAnalysis& a) {
  const int n = a.n, r = a.r;
  a.tau_V_ker = a.tau_V_M1 = a.tau_H_perp = a.tau_H_M1 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a.tau_V_M1 += a.R_vert_M1[idx4(n, i, j, j, i)];
      a.tau_V_ker += a.R_vert_ker[idx4(n, i, j, j, i)];
    }
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      a.tau_H_M1 += a.R_hor_M1[idx4(r, i, j, j, i)];
      a.tau_H_perp += a.R_hor_perp[idx4(r, i, j, j, i)];
    }
  a.ric_V_ker = a.ric_V_M1 = a.ric_H_perp = a.ric_H_M1 = 0.0;
  for (int j = 1; j < n; ++j) {
    a.ric_V_M1 += a.R_vert_M1[idx4(n, 0, j, j, 0)];
    a.ric_V_ker += a.R_vert_ker[idx4(n, 0, j, j, 0)];
  }
  for (int j = 1; j < r; ++j) {
    a.ric_H_M1 += a.R_hor_M1[idx4(r, 0, j, j, 0)];
    a.ric_H_perp += a.R_hor_perp[idx4(r, 0, j, j, 0)];
  }
}

SubmersionAnalysis analyze_submersion(const SubmersionProblem& prob, const Vec& p, const SubmersionOptions& opts) {
  const int m1 = prob.source_dim(), m2 = prob.target_dim();
  if (m2 >= m1) throw Error(ErrorCode::BadParams, "a submersion needs source dimension above target dimension");
  MapJetAt jet = map_jet(prob, p);
  if (numerical_rank(jet.jacobian) < m2)
    throw Error(ErrorCode::RankDeficiency, "differential is not surjective at the sample point");

  SubmersionGeometry geo(prob, p, opts.outer_step);
  SubmersionAnalysis a;
  a.point = p;
  a.n = geo.n();
  a.r = geo.r();
  const int n = a.n, r = a.r;

  CurvatureData src = curvature_at(prob.source, p);
  CurvatureData tgt = curvature_at(prob.target, jet.value);
  a.metric = src.metric;
  a.structure = structure_at(prob.source, p);
  const Mat& g = src.metric;

  std::vector<Field> V, Hf;
  for (int i = 0; i < n; ++i) {
    V.push_back(geo.vertical_frame(i));
    a.vertical.vectors.push_back(V.back()(p));
  }
  for (int t = 0; t < r; ++t) {
    Hf.push_back(geo.horizontal_frame(t));
    a.horizontal.vectors.push_back(Hf.back()(p));
  }
  a.vertical.label = FrameLabel::vertical;
  a.horizontal.label = FrameLabel::horizontal;

  std::vector<Vec> images;
  for (int t = 0; t < r; ++t) images.push_back(jet.jacobian * a.horizontal[t]);
  for (int s = 0; s < r; ++s)
    for (int t = 0; t < r; ++t)
      a.isometry_residual = std::max(a.isometry_residual,
                                     std::fabs(inner(images[static_cast<std::size_t>(s)], images[static_cast<std::size_t>(t)], tgt.metric) -
                                               (s == t ? 1.0 : 0.0)));
  if (a.isometry_residual > 1e-6)
    throw Error(ErrorCode::BadParams,
                "map is not isometric on the horizontal space (residual " + std::to_string(a.isometry_residual) + ")");

  // tensor values on frame pairs
  std::vector<std::vector<Vec>> Tvv(n, std::vector<Vec>(n)), Tvh(n, std::vector<Vec>(r));
  std::vector<std::vector<Vec>> Ahh(r, std::vector<Vec>(r)), Ahv(r, std::vector<Vec>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) Tvv[i][j] = geo.T(V[i], V[j], p);
    for (int t = 0; t < r; ++t) Tvh[i][t] = geo.T(V[i], Hf[t], p);
  }
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) Ahh[i][j] = geo.A(Hf[i], Hf[j], p);
    for (int al = 0; al < n; ++al) Ahv[i][al] = geo.A(Hf[i], V[al], p);
  }

  a.T_comp.assign(static_cast<std::size_t>(n * n * r), 0.0);
  a.A_comp.assign(static_cast<std::size_t>(r * r * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < r; ++t) a.T_comp[static_cast<std::size_t>((i * n + j) * r + t)] = inner(Tvv[i][j], a.horizontal[t], g);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int al = 0; al < n; ++al) a.A_comp[static_cast<std::size_t>((i * r + j) * n + al)] = inner(Ahh[i][j], a.vertical[al], g);

  a.H = Vec::Zero(m1);
  for (int i = 0; i < n; ++i) a.H += Tvv[i][i];
  a.H /= n;
  a.H_norm_sq = inner(a.H, a.H, g);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < r; ++t) a.norm_TV_sq += inner(Tvh[i][t], Tvh[i][t], g);
  for (int i = 0; i < r; ++i)
    for (int al = 0; al < n; ++al) a.norm_AH_sq += inner(Ahv[i][al], Ahv[i][al], g);

  // property identities over the full frame
  std::vector<Vec> basis(a.vertical.vectors);
  basis.insert(basis.end(), a.horizontal.vectors.begin(), a.horizontal.vectors.end());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a.properties.T_symmetry = std::max(a.properties.T_symmetry, (Tvv[i][j] - Tvv[j][i]).cwiseAbs().maxCoeff());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a.properties.A_antisymmetry = std::max(a.properties.A_antisymmetry, (Ahh[i][j] + Ahh[j][i]).cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) {
    std::vector<Vec> img(Tvv[i]);
    img.insert(img.end(), Tvh[i].begin(), Tvh[i].end());
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (std::size_t l = 0; l < basis.size(); ++l)
        a.properties.T_skew = std::max(a.properties.T_skew, std::fabs(inner(img[k], basis[l], g) + inner(img[l], basis[k], g)));
  }
  for (int i = 0; i < r; ++i) {
    std::vector<Vec> img(Ahv[i]);
    img.insert(img.end(), Ahh[i].begin(), Ahh[i].end());
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (std::size_t l = 0; l < basis.size(); ++l)
        a.properties.A_skew = std::max(a.properties.A_skew, std::fabs(inner(img[k], basis[l], g) + inner(img[l], basis[k], g)));
  }

  a.delta_N = geo.delta_N(p);

  a.R_vert_M1.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          a.R_vert_M1[idx4(n, i, j, k, l)] = src.form(a.vertical[i], a.vertical[j], a.vertical[k], a.vertical[l]);
  a.R_hor_M1.assign(static_cast<std::size_t>(r * r * r * r), 0.0);
  a.R_hor_perp.assign(static_cast<std::size_t>(r * r * r * r), 0.0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l) {
          a.R_hor_M1[idx4(r, i, j, k, l)] = src.form(a.horizontal[i], a.horizontal[j], a.horizontal[k], a.horizontal[l]);
          a.R_hor_perp[idx4(r, i, j, k, l)] =
              tgt.form(images[static_cast<std::size_t>(i)], images[static_cast<std::size_t>(j)],
                       images[static_cast<std::size_t>(k)], images[static_cast<std::size_t>(l)]);
        }
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < n; ++j) a.mixed_sum += src.form(a.horizontal[i], a.vertical[j], a.vertical[j], a.horizontal[i]);

  if (opts.fiber_curvature) {
    a.R_vert_ker = geo.fiber_curvature(p);
    a.fiber_curvature_computed = true;
  } else {
    a.R_vert_ker.assign(a.R_vert_M1.size(), 0.0);
  }

  a.sign_profile.vertical = audit_vertical_relation(a);
  a.sign_profile.horizontal = audit_horizontal_relation(a);
  if (opts.mixed_audit) a.sign_profile.mixed = audit_mixed_relation(geo, a, opts.max_mixed_tuples);

  fill_scalar_block(a);
  return a;
}

SubmersionAnalysis designate(const SubmersionAnalysis& a, const Vec* v1, const Vec* h1) {
  SubmersionAnalysis out = a;
  const int n = a.n, r = a.r;
  Mat Ov = Mat::Identity(n, n), Oh = Mat::Identity(r, r);
  if (v1) {
    Vec c(n);
    for (int i = 0; i < n; ++i) c(i) = inner(*v1, a.vertical[i], a.metric);
    Ov = rotation_with_first(c);
  }
  if (h1) {
    Vec c(r);
    for (int i = 0; i < r; ++i) c(i) = inner(*h1, a.horizontal[i], a.metric);
    Oh = rotation_with_first(c);
  }
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(a.point.size());
    for (int k = 0; k < n; ++k) e += Ov(i, k) * a.vertical[k];
    out.vertical.vectors[static_cast<std::size_t>(i)] = e;
  }
  for (int i = 0; i < r; ++i) {
    Vec e = Vec::Zero(a.point.size());
    for (int k = 0; k < r; ++k) e += Oh(i, k) * a.horizontal[k];
    out.horizontal.vectors[static_cast<std::size_t>(i)] = e;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < r; ++t) {
        double s = 0.0;
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y)
            for (int z = 0; z < r; ++z) s += Ov(i, x) * Ov(j, y) * Oh(t, z) * a.T(x, y, z);
        out.T_comp[static_cast<std::size_t>((i * n + j) * r + t)] = s;
      }
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int al = 0; al < n; ++al) {
        double s = 0.0;
        for (int x = 0; x < r; ++x)
          for (int y = 0; y < r; ++y)
            for (int z = 0; z < n; ++z) s += Oh(i, x) * Oh(j, y) * Ov(al, z) * a.A(x, y, z);
        out.A_comp[static_cast<std::size_t>((i * r + j) * n + al)] = s;
      }
  out.R_vert_M1 = transform4(a.R_vert_M1, Ov);
  out.R_vert_ker = transform4(a.R_vert_ker, Ov);
  out.R_hor_M1 = transform4(a.R_hor_M1, Oh);
  out.R_hor_perp = transform4(a.R_hor_perp, Oh);
  fill_scalar_block(out);
  return out;
}

}  // namespace riemkit
