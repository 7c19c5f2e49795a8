#pragma once

#include "riemkit/expr.hpp"
#include "riemkit/tensor.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace riemkit {

// Axis-aligned coordinate box.
struct Domain {
  std::vector<double> lo;
  std::vector<double> hi;

  bool contains(const Vec& p) const;
  Vec center() const;
};

enum class StructureKind { none, complex, contact };

const char* structure_kind_name(StructureKind kind);

// Complex J or almost contact (phi, xi, eta). Tensor entries are row-major:
// (J X)^i = J[i][j] X^j.
struct Structure {
  StructureKind kind = StructureKind::none;
  std::vector<Expression> tensor;
  std::vector<Expression> xi;
  std::vector<Expression> eta;
};

struct MetricJet {
  int dim = 0;
  Mat g;
  std::vector<Mat> dg;                // dg[k](i,j) = d_k g_ij
  std::vector<std::vector<Mat>> ddg;  // ddg[k][l](i,j)
};

class ChartManifold {
 public:
  ChartManifold() = default;
  ChartManifold(std::string name, int dim, Domain domain, std::vector<Expression> metric,
                Structure structure = {});

  // Parses dim*dim metric entries (row-major) plus optional structure strings.
  static ChartManifold from_strings(std::string name, int dim, Domain domain,
                                    const std::vector<std::string>& metric);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const Domain& domain() const { return domain_; }
  const Structure& structure() const { return structure_; }
  void set_structure(Structure s) { structure_ = std::move(s); }
  const std::vector<Expression>& metric_expressions() const { return metric_; }

  Mat metric(const Vec& p) const;
  MetricJet metric_jet(const Vec& p) const;

  // J or phi at p; throws StructureMissing
  Mat structure_tensor(const Vec& p) const;
  Vec reeb(const Vec& p) const;
  Vec contact_form(const Vec& p) const;

 private:
  std::string name_;
  int dim_ = 0;
  Domain domain_;
  std::vector<Expression> metric_;
  Structure structure_;
};

enum class Backend { jet, finite_difference };

// Pointwise curvature data. Index layout: gamma(k,i,j) = Gamma^k_ij,
// riemann(i,j,k,l) = R(d_i,d_j,d_k,d_l) with
// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z and
// R(X,Y,Z,W) = g(R(X,Y)Z, W).
struct CurvatureData {
  int dim = 0;
  Vec point;
  Mat metric;
  Mat metric_inv;
  std::vector<double> gamma;
  std::vector<double> riemann;

  double christoffel(int k, int i, int j) const {
    return gamma[static_cast<std::size_t>((k * dim + i) * dim + j)];
  }
  double R(int i, int j, int k, int l) const {
    return riemann[static_cast<std::size_t>(((i * dim + j) * dim + k) * dim + l)];
  }
  double form(const Vec& x, const Vec& y, const Vec& z, const Vec& w) const;
  // R(X,Y)Z as a vector
  Vec endomorphism(const Vec& x, const Vec& y, const Vec& z) const;
  // Gamma(X, Y)^k = Gamma^k_ij X^i Y^j
  Vec connection_term(const Vec& x, const Vec& y) const;
};

// Throws SingularMetric when cond(g) > 1e12 or g is not positive definite.
void check_metric(const Mat& g);

std::vector<double> christoffel(const ChartManifold& m, const Vec& p, Backend backend = Backend::jet);
CurvatureData curvature_at(const ChartManifold& m, const Vec& p, Backend backend = Backend::jet);

// K(X,Y) = R(X,Y,Y,X) / (|X|^2|Y|^2 - g(X,Y)^2); DegeneratePlane below 1e-12.
double sectional_curvature(const CurvatureData& c, const Vec& x, const Vec& y);

double ricci(const CurvatureData& c, const Vec& x, const Vec& y);
double scalar_curvature(const CurvatureData& c);

// Largest violation of the algebraic symmetries and first Bianchi identity.
double symmetry_residual(const CurvatureData& c);

enum class SpaceFormKind {
  real,
  complex,
  real_kahler,
  generalized_complex,
  sasakian,
  kenmotsu,
  cosymplectic,
  c_alpha,
  generalized_sasakian,
};

const char* space_form_kind_name(SpaceFormKind kind);
SpaceFormKind space_form_kind_from_name(const std::string& name);

struct SpaceFormSpec {
  SpaceFormKind kind = SpaceFormKind::real;
  double c = 0.0;
  double alpha = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  bool is_contact() const;
};

// Fills c1, c2, c3 from the kind's constants table.
SpaceFormSpec make_space_form(SpaceFormKind kind, double c, double alpha = 0.0);
SpaceFormSpec generalized_complex_form(double c1, double c2);
SpaceFormSpec generalized_sasakian_form(double c1, double c2, double c3);

// Structure tensors at a point, as consumed by the model curvature.
struct StructureAt {
  StructureKind kind = StructureKind::none;
  Mat tensor;  // J or phi
  Vec xi;
  Vec eta;
};

StructureAt structure_at(const ChartManifold& m, const Vec& p);

// Model R(Y1,Y2,Y3,Y4) of a generalized complex or Sasakian space form.
double model_curvature(const SpaceFormSpec& spec, const Mat& g, const StructureAt& s, const Vec& y1,
                       const Vec& y2, const Vec& y3, const Vec& y4);

// Max over seeded random orthonormal tuples of |R_chart - R_model|.
double conformance_check(const ChartManifold& m, const SpaceFormSpec& spec,
                         const std::vector<Vec>& points, int tuples_per_point, std::uint64_t seed);

// Largest violation of the complex or almost contact metric identities at p.
double validate_structure(const ChartManifold& m, const Vec& p);

std::vector<Vec> sample_box(const Domain& d, int count, std::uint64_t seed);

}  // namespace riemkit
