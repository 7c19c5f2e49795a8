#include "riemkit/geometry.hpp"

#include "riemkit/errors.hpp"

#include <cmath>
#include <random>

namespace riemkit {

bool Domain::contains(const Vec& p) const {
  for (int i = 0; i < p.size(); ++i)
    if (p(i) < lo[static_cast<std::size_t>(i)] || p(i) > hi[static_cast<std::size_t>(i)]) return false;
  return true;
}

Vec Domain::center() const {
  Vec c(static_cast<int>(lo.size()));
  for (std::size_t i = 0; i < lo.size(); ++i) c(static_cast<int>(i)) = 0.5 * (lo[i] + hi[i]);
  return c;
}

const char* structure_kind_name(StructureKind kind) {
  switch (kind) {
    case StructureKind::none: return "none";
    case StructureKind::complex: return "complex";
    case StructureKind::contact: return "contact";
  }
  return "none";
}

ChartManifold::ChartManifold(std::string name, int dim, Domain domain, std::vector<Expression> metric,
                             Structure structure)
    : name_(std::move(name)), dim_(dim), domain_(std::move(domain)), metric_(std::move(metric)),
      structure_(std::move(structure)) {
  if (dim_ < 1 || dim_ > max_dim) throw Error(ErrorCode::BadParams, "chart dimension must be in 1..8");
  if (static_cast<int>(metric_.size()) != dim_ * dim_)
    throw Error(ErrorCode::BadParams, "metric needs dim*dim entries");
  if (static_cast<int>(domain_.lo.size()) != dim_ || static_cast<int>(domain_.hi.size()) != dim_)
    throw Error(ErrorCode::BadParams, "domain box has wrong dimension");
  for (const auto& e : metric_)
    if (e.arity() > dim_) throw Error(ErrorCode::UnknownIdentifier, "metric uses a variable beyond the chart dimension");
  // symmetric entries must agree at the domain center
  Vec c = domain_.center();
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j) {
      double a = evaluate(metric_[static_cast<std::size_t>(i * dim_ + j)], c.data(), dim_);
      double b = evaluate(metric_[static_cast<std::size_t>(j * dim_ + i)], c.data(), dim_);
      if (std::fabs(a - b) > 1e-12 * (1.0 + std::fabs(a)))
        throw Error(ErrorCode::BadParams, "metric is not symmetric");
    }
}

ChartManifold ChartManifold::from_strings(std::string name, int dim, Domain domain,
                                          const std::vector<std::string>& metric) {
  std::vector<Expression> exprs;
  for (const auto& s : metric) exprs.push_back(parse_expression(s, dim));
  return ChartManifold(std::move(name), dim, std::move(domain), std::move(exprs));
}

Mat ChartManifold::metric(const Vec& p) const {
  Mat g(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      double v = evaluate(metric_[static_cast<std::size_t>(i * dim_ + j)], p.data(), dim_);
      g(i, j) = v;
      g(j, i) = v;
    }
  return g;
}

MetricJet ChartManifold::metric_jet(const Vec& p) const {
  MetricJet mj;
  mj.dim = dim_;
  mj.g = Mat(dim_, dim_);
  mj.dg.assign(static_cast<std::size_t>(dim_), Mat(dim_, dim_));
  mj.ddg.assign(static_cast<std::size_t>(dim_), std::vector<Mat>(static_cast<std::size_t>(dim_), Mat(dim_, dim_)));
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      Jet2 jt = evaluate_jet(metric_[static_cast<std::size_t>(i * dim_ + j)], p.data(), dim_);
      mj.g(i, j) = mj.g(j, i) = jt.value;
      for (int k = 0; k < dim_; ++k) {
        mj.dg[static_cast<std::size_t>(k)](i, j) = mj.dg[static_cast<std::size_t>(k)](j, i) = jt.d(k);
        for (int l = 0; l < dim_; ++l)
          mj.ddg[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)](i, j) =
              mj.ddg[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)](j, i) = jt.dd(k, l);
      }
    }
  return mj;
}

static Mat eval_matrix(const std::vector<Expression>& entries, int dim, const Vec& p) {
  Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = evaluate(entries[static_cast<std::size_t>(i * dim + j)], p.data(), dim);
  return m;
}

static Vec eval_vector(const std::vector<Expression>& entries, int dim, const Vec& p) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = evaluate(entries[static_cast<std::size_t>(i)], p.data(), dim);
  return v;
}

Mat ChartManifold::structure_tensor(const Vec& p) const {
  if (structure_.kind == StructureKind::none)
    throw Error(ErrorCode::StructureMissing, "manifold '" + name_ + "' carries no complex or contact structure");
  return eval_matrix(structure_.tensor, dim_, p);
}

Vec ChartManifold::reeb(const Vec& p) const {
  if (structure_.kind != StructureKind::contact)
    throw Error(ErrorCode::StructureMissing, "manifold '" + name_ + "' carries no contact structure");
  return eval_vector(structure_.xi, dim_, p);
}

Vec ChartManifold::contact_form(const Vec& p) const {
  if (structure_.kind != StructureKind::contact)
    throw Error(ErrorCode::StructureMissing, "manifold '" + name_ + "' carries no contact structure");
  return eval_vector(structure_.eta, dim_, p);
}

void check_metric(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw Error(ErrorCode::SingularMetric, "metric is not positive definite");
  if (hi / lo > 1e12) throw Error(ErrorCode::SingularMetric, "metric condition number exceeds 1e12");
}

namespace {

// Richardson-extrapolated central differences of the metric.
MetricJet metric_jet_fd(const ChartManifold& m, const Vec& p) {
  const int d = m.dim();
  MetricJet mj;
  mj.dim = d;
  mj.g = m.metric(p);
  mj.dg.assign(static_cast<std::size_t>(d), Mat::Zero(d, d));
  mj.ddg.assign(static_cast<std::size_t>(d), std::vector<Mat>(static_cast<std::size_t>(d), Mat::Zero(d, d)));
  auto first = [&](int k, double h) {
    Vec a = p, b = p;
    a(k) += h;
    b(k) -= h;
    return Mat((m.metric(a) - m.metric(b)) / (2.0 * h));
  };
  for (int k = 0; k < d; ++k) {
    double h = 1e-4 * (1.0 + std::fabs(p(k)));
    mj.dg[static_cast<std::size_t>(k)] = (4.0 * first(k, h / 2) - first(k, h)) / 3.0;
  }
  auto second = [&](int k, int l, double hk, double hl) {
    if (k == l) {
      Vec a = p, b = p;
      a(k) += hk;
      b(k) -= hk;
      return Mat((m.metric(a) - 2.0 * mj.g + m.metric(b)) / (hk * hk));
    }
    Vec pp = p, pm = p, mp = p, mm = p;
    pp(k) += hk; pp(l) += hl;
    pm(k) += hk; pm(l) -= hl;
    mp(k) -= hk; mp(l) += hl;
    mm(k) -= hk; mm(l) -= hl;
    return Mat((m.metric(pp) - m.metric(pm) - m.metric(mp) + m.metric(mm)) / (4.0 * hk * hl));
  };
  for (int k = 0; k < d; ++k)
    for (int l = k; l < d; ++l) {
      double hk = 1e-3 * (1.0 + std::fabs(p(k)));
      double hl = 1e-3 * (1.0 + std::fabs(p(l)));
      Mat v = (4.0 * second(k, l, hk / 2, hl / 2) - second(k, l, hk, hl)) / 3.0;
      mj.ddg[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = v;
      mj.ddg[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = v;
    }
  return mj;
}

std::vector<double> gamma_from(const MetricJet& mj, const Mat& ginv) {
  const int d = mj.dim;
  std::vector<double> gamma(static_cast<std::size_t>(d * d * d), 0.0);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int l = 0; l < d; ++l)
          s += ginv(k, l) * (mj.dg[static_cast<std::size_t>(i)](j, l) + mj.dg[static_cast<std::size_t>(j)](i, l) -
                             mj.dg[static_cast<std::size_t>(l)](i, j));
        gamma[static_cast<std::size_t>((k * d + i) * d + j)] = 0.5 * s;
      }
  return gamma;
}

CurvatureData curvature_from(const MetricJet& mj, const Vec& p) {
  const int d = mj.dim;
  CurvatureData c;
  c.dim = d;
  c.point = p;
  c.metric = mj.g;
  check_metric(mj.g);
  c.metric_inv = mj.g.inverse();
  const Mat& ginv = c.metric_inv;
  c.gamma = gamma_from(mj, ginv);
  auto G = [&](int k, int i, int j) { return c.gamma[static_cast<std::size_t>((k * d + i) * d + j)]; };

  // d_m g^{kl} = -g^{ka} d_m g_ab g^{bl}
  std::vector<Mat> dginv(static_cast<std::size_t>(d));
  for (int m = 0; m < d; ++m) dginv[static_cast<std::size_t>(m)] = -ginv * mj.dg[static_cast<std::size_t>(m)] * ginv;

  // dgamma[m][k][i][j] = d_m Gamma^k_ij
  std::vector<double> dgamma(static_cast<std::size_t>(d * d * d * d), 0.0);
  for (int m = 0; m < d; ++m)
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double s = 0.0;
          for (int l = 0; l < d; ++l) {
            double S = mj.dg[static_cast<std::size_t>(i)](j, l) + mj.dg[static_cast<std::size_t>(j)](i, l) -
                       mj.dg[static_cast<std::size_t>(l)](i, j);
            double dS = mj.ddg[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)](j, l) +
                        mj.ddg[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)](i, l) -
                        mj.ddg[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)](i, j);
            s += dginv[static_cast<std::size_t>(m)](k, l) * S + ginv(k, l) * dS;
          }
          dgamma[static_cast<std::size_t>(((m * d + k) * d + i) * d + j)] = 0.5 * s;
        }
  auto dG = [&](int m, int k, int i, int j) { return dgamma[static_cast<std::size_t>(((m * d + k) * d + i) * d + j)]; };

  // R^l_ijk then lower the last index
  std::vector<double> up(static_cast<std::size_t>(d * d * d * d), 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = dG(i, l, j, k) - dG(j, l, i, k);
          for (int m = 0; m < d; ++m) s += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
          up[static_cast<std::size_t>(((i * d + j) * d + k) * d + l)] = s;
        }
  c.riemann.assign(static_cast<std::size_t>(d * d * d * d), 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0.0;
          for (int m = 0; m < d; ++m) s += mj.g(l, m) * up[static_cast<std::size_t>(((i * d + j) * d + k) * d + m)];
          c.riemann[static_cast<std::size_t>(((i * d + j) * d + k) * d + l)] = s;
        }
  return c;
}

}  // namespace

std::vector<double> christoffel(const ChartManifold& m, const Vec& p, Backend backend) {
  MetricJet mj = backend == Backend::jet ? m.metric_jet(p) : metric_jet_fd(m, p);
  check_metric(mj.g);
  return gamma_from(mj, mj.g.inverse());
}

CurvatureData curvature_at(const ChartManifold& m, const Vec& p, Backend backend) {
  MetricJet mj = backend == Backend::jet ? m.metric_jet(p) : metric_jet_fd(m, p);
  return curvature_from(mj, p);
}

double CurvatureData::form(const Vec& x, const Vec& y, const Vec& z, const Vec& w) const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < dim; ++j) {
      if (y(j) == 0.0) continue;
      double xy = x(i) * y(j);
      for (int k = 0; k < dim; ++k) {
        if (z(k) == 0.0) continue;
        double xyz = xy * z(k);
        for (int l = 0; l < dim; ++l) s += xyz * w(l) * R(i, j, k, l);
      }
    }
  }
  return s;
}

Vec CurvatureData::endomorphism(const Vec& x, const Vec& y, const Vec& z) const {
  Vec lowered(dim);
  for (int l = 0; l < dim; ++l) lowered(l) = form(x, y, z, Vec::Unit(dim, l));
  return metric_inv * lowered;
}

Vec CurvatureData::connection_term(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(dim);
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) out(k) += christoffel(k, i, j) * x(i) * y(j);
  return out;
}

double sectional_curvature(const CurvatureData& c, const Vec& x, const Vec& y) {
  double xx = inner(x, x, c.metric), yy = inner(y, y, c.metric), xy = inner(x, y, c.metric);
  double gram = xx * yy - xy * xy;
  if (gram < 1e-12) throw Error(ErrorCode::DegeneratePlane, "plane spanned by X and Y is degenerate");
  return c.form(x, y, y, x) / gram;
}

double ricci(const CurvatureData& c, const Vec& x, const Vec& y) {
  double s = 0.0;
  for (int i = 0; i < c.dim; ++i)
    for (int j = 0; j < c.dim; ++j) s += c.metric_inv(i, j) * c.form(Vec::Unit(c.dim, i), x, y, Vec::Unit(c.dim, j));
  return s;
}

double scalar_curvature(const CurvatureData& c) {
  double s = 0.0;
  for (int a = 0; a < c.dim; ++a)
    for (int b = 0; b < c.dim; ++b) s += c.metric_inv(a, b) * ricci(c, Vec::Unit(c.dim, a), Vec::Unit(c.dim, b));
  return s;
}

double symmetry_residual(const CurvatureData& c) {
  const int d = c.dim;
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double r = c.R(i, j, k, l);
          worst = std::max(worst, std::fabs(r + c.R(j, i, k, l)));
          worst = std::max(worst, std::fabs(r + c.R(i, j, l, k)));
          worst = std::max(worst, std::fabs(r - c.R(k, l, i, j)));
          worst = std::max(worst, std::fabs(r + c.R(j, k, i, l) + c.R(k, i, j, l)));
        }
  return worst;
}

const char* space_form_kind_name(SpaceFormKind kind) {
  switch (kind) {
    case SpaceFormKind::real: return "real";
    case SpaceFormKind::complex: return "complex";
    case SpaceFormKind::real_kahler: return "real_kahler";
    case SpaceFormKind::generalized_complex: return "generalized_complex";
    case SpaceFormKind::sasakian: return "sasakian";
    case SpaceFormKind::kenmotsu: return "kenmotsu";
    case SpaceFormKind::cosymplectic: return "cosymplectic";
    case SpaceFormKind::c_alpha: return "c_alpha";
    case SpaceFormKind::generalized_sasakian: return "generalized_sasakian";
  }
  return "real";
}

SpaceFormKind space_form_kind_from_name(const std::string& name) {
  for (SpaceFormKind k : {SpaceFormKind::real, SpaceFormKind::complex, SpaceFormKind::real_kahler,
                          SpaceFormKind::generalized_complex, SpaceFormKind::sasakian, SpaceFormKind::kenmotsu,
                          SpaceFormKind::cosymplectic, SpaceFormKind::c_alpha, SpaceFormKind::generalized_sasakian})
    if (name == space_form_kind_name(k)) return k;
  throw Error(ErrorCode::ConfigError, "unknown space form kind '" + name + "'");
}

bool SpaceFormSpec::is_contact() const {
  switch (kind) {
    case SpaceFormKind::sasakian:
    case SpaceFormKind::kenmotsu:
    case SpaceFormKind::cosymplectic:
    case SpaceFormKind::c_alpha:
    case SpaceFormKind::generalized_sasakian: return true;
    default: return false;
  }
}

SpaceFormSpec make_space_form(SpaceFormKind kind, double c, double alpha) {
  SpaceFormSpec s;
  s.kind = kind;
  s.c = c;
  s.alpha = alpha;
  switch (kind) {
    case SpaceFormKind::real: s.c1 = c; s.c2 = 0.0; break;
    case SpaceFormKind::complex: s.c1 = c / 4; s.c2 = c / 4; break;
    case SpaceFormKind::real_kahler: s.c1 = (c + 3 * alpha) / 4; s.c2 = (c - alpha) / 4; break;
    case SpaceFormKind::sasakian: s.c1 = (c + 3) / 4; s.c2 = s.c3 = (c - 1) / 4; break;
    case SpaceFormKind::kenmotsu: s.c1 = (c - 3) / 4; s.c2 = s.c3 = (c + 1) / 4; break;
    case SpaceFormKind::cosymplectic: s.c1 = c / 4; s.c2 = s.c3 = c / 4; break;
    case SpaceFormKind::c_alpha:
      s.c1 = (c + 3 * alpha * alpha) / 4;
      s.c2 = s.c3 = (c - alpha * alpha) / 4;
      break;
    case SpaceFormKind::generalized_complex:
    case SpaceFormKind::generalized_sasakian:
      throw Error(ErrorCode::BadParams, "generalized forms take explicit constants");
  }
  return s;
}

SpaceFormSpec generalized_complex_form(double c1, double c2) {
  SpaceFormSpec s;
  s.kind = SpaceFormKind::generalized_complex;
  s.c1 = c1;
  s.c2 = c2;
  return s;
}

SpaceFormSpec generalized_sasakian_form(double c1, double c2, double c3) {
  SpaceFormSpec s;
  s.kind = SpaceFormKind::generalized_sasakian;
  s.c1 = c1;
  s.c2 = c2;
  s.c3 = c3;
  return s;
}

StructureAt structure_at(const ChartManifold& m, const Vec& p) {
  StructureAt s;
  s.kind = m.structure().kind;
  if (s.kind == StructureKind::none) return s;
  s.tensor = m.structure_tensor(p);
  if (s.kind == StructureKind::contact) {
    s.xi = m.reeb(p);
    s.eta = m.contact_form(p);
  }
  return s;
}

double model_curvature(const SpaceFormSpec& spec, const Mat& g, const StructureAt& s, const Vec& y1,
                       const Vec& y2, const Vec& y3, const Vec& y4) {
  auto G = [&](const Vec& a, const Vec& b) { return inner(a, b, g); };
  double value = spec.c1 * (G(y2, y3) * G(y1, y4) - G(y1, y3) * G(y2, y4));
  if (spec.c2 != 0.0 || spec.c3 != 0.0) {
    if (s.kind == StructureKind::none)
      throw Error(ErrorCode::StructureMissing, "model with c2 or c3 needs a complex or contact structure");
    const Mat& J = s.tensor;
    Vec j1 = J * y1, j2 = J * y2, j3 = J * y3;
    value += spec.c2 * (G(y1, j3) * G(j2, y4) - G(y2, j3) * G(j1, y4) + 2.0 * G(y1, j2) * G(j3, y4));
    if (spec.c3 != 0.0) {
      if (s.kind != StructureKind::contact)
        throw Error(ErrorCode::StructureMissing, "model with c3 needs a contact structure");
      double e1 = s.eta.dot(y1), e2 = s.eta.dot(y2), e3 = s.eta.dot(y3), e4 = s.eta.dot(y4);
      value += spec.c3 * (e1 * e3 * G(y2, y4) - e2 * e3 * G(y1, y4) + G(y1, y3) * e2 * e4 - G(y2, y3) * e1 * e4);
    }
  }
  return value;
}

double conformance_check(const ChartManifold& m, const SpaceFormSpec& spec, const std::vector<Vec>& points,
                         int tuples_per_point, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = m.dim();
  const int k = std::min(4, d);
  double worst = 0.0;
  for (const Vec& p : points) {
    CurvatureData c = curvature_at(m, p);
    StructureAt s = structure_at(m, p);
    for (int t = 0; t < tuples_per_point; ++t) {
      std::vector<Vec> raw;
      for (int i = 0; i < k; ++i) {
        Vec v(d);
        for (int a = 0; a < d; ++a) v(a) = normal(rng);
        raw.push_back(v);
      }
      Frame f = gram_schmidt(raw, c.metric);
      // every index pattern over the orthonormal tuple, repeats included
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          for (int e = 0; e < k; ++e)
            for (int h = 0; h < k; ++h) {
              double chart = c.form(f[a], f[b], f[e], f[h]);
              double model = model_curvature(spec, c.metric, s, f[a], f[b], f[e], f[h]);
              worst = std::max(worst, std::fabs(chart - model));
            }
    }
  }
  return worst;
}

double validate_structure(const ChartManifold& m, const Vec& p) {
  const int d = m.dim();
  StructureAt s = structure_at(m, p);
  if (s.kind == StructureKind::none) throw Error(ErrorCode::StructureMissing, "no structure to validate");
  Mat g = m.metric(p);
  const Mat& J = s.tensor;
  Mat I = Mat::Identity(d, d);
  double worst = 0.0;
  if (s.kind == StructureKind::complex) {
    worst = std::max(worst, (J * J + I).cwiseAbs().maxCoeff());
    worst = std::max(worst, (J.transpose() * g * J - g).cwiseAbs().maxCoeff());
  } else {
    worst = std::max(worst, std::fabs(s.eta.dot(s.xi) - 1.0));
    worst = std::max(worst, (J * J + I - s.xi * s.eta.transpose()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (J.transpose() * g * J - (g - s.eta * s.eta.transpose())).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<Vec> sample_box(const Domain& d, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> out;
  const int n = static_cast<int>(d.lo.size());
  for (int i = 0; i < count; ++i) {
    Vec p(n);
    for (int a = 0; a < n; ++a)
      p(a) = d.lo[static_cast<std::size_t>(a)] + (d.hi[static_cast<std::size_t>(a)] - d.lo[static_cast<std::size_t>(a)]) * unit(rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace riemkit
