// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/expr.hpp"

namespace weylab {

using PhaseVector = Eigen::VectorXd;
using PhaseMatrix = Eigen::MatrixXd;
using MultiIndex = std::array<int, kMaxDim>;

int order_of(const MultiIndex& a);
std::string index_string(const MultiIndex& a, int dimension);

// Scalar coefficient field on R^d with derivatives up to order two.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual int dimension() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual Jet2 jet(std::span<const double> x) const = 0;
  virtual bool is_constant() const { return false; }
  virtual std::string describe() const = 0;
  // Box [lo, hi]^d outside which the field refuses to evaluate, if any.
  virtual std::optional<std::pair<double, double>> domain() const { return std::nullopt; }
};

class ExprField final : public ScalarField {
 public:
  ExprField(Expr expr, int dimension);
  int dimension() const override { return dimension_; }
  double value(std::span<const double> x) const override { return expr_.value(x); }
  Jet2 jet(std::span<const double> x) const override { return expr_.jet(x); }
  bool is_constant() const override { return constant_; }
  std::string describe() const override { return expr_.to_string(); }
  const Expr& expr() const { return expr_; }

 private:
  Expr expr_;
  int dimension_;
  bool constant_;
};

// Tensor-product Catmull-Rom interpolant of samples on a uniform grid over [lo, hi]^d.
class GridField final : public ScalarField {
 public:
  GridField(int dimension, double lo, double hi, int points_per_axis, std::vector<double> values);
  static GridField sample(const ScalarField& f, double lo, double hi, int points_per_axis);
  int dimension() const override { return dimension_; }
  double value(std::span<const double> x) const override { return jet(x).v; }
  Jet2 jet(std::span<const double> x) const override;
  std::string describe() const override;
  std::optional<std::pair<double, double>> domain() const override { return {{lo_, hi_}}; }

 private:
  int dimension_;
  double lo_, hi_;
  int n_;
  double step_;
  std::vector<double> values_;
};

std::shared_ptr<const ScalarField> make_field(const Expr& e, int dimension);
std::shared_ptr<const ScalarField> make_constant_field(double c, int dimension);

struct SymbolTerm {
  MultiIndex nu{};
  MultiIndex nubar{};
  std::shared_ptr<const ScalarField> coefficient;
};

struct SymbolDerivatives {
  double value = 0.0;
  PhaseVector gradient;
  PhaseMatrix hessian;
};

// a(x, xi) = sum over terms of a_{nu,nubar}(x) xi^(nu+nubar).
class SymbolModel {
 public:
  SymbolModel(std::string name, int dimension, int order, std::vector<SymbolTerm> terms,
              double ellipticity_constant, double holder_exponent);

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  int phase_dimension() const { return 2 * dimension_; }
  int order() const { return order_; }
  double ellipticity_constant() const { return c0_; }
  double holder_exponent() const { return r0_; }
  const std::vector<SymbolTerm>& terms() const { return terms_; }

  double value(const PhaseVector& v) const;
  PhaseVector gradient(const PhaseVector& v) const;
  PhaseMatrix hessian(const PhaseVector& v) const;
  SymbolDerivatives derivatives(const PhaseVector& v) const;

  // Top-order part sum_{|nu|=|nubar|=m0} a(x) xi^(nu+nubar).
  double principal(std::span<const double> x, std::span<const double> xi) const;
  // min over xi of a(x, xi); closed form, requires order 1.
  double min_over_momentum(std::span<const double> x) const;
  // Coefficients c_k(x) of a(x, xi) = sum_k c_k xi^k; requires dimension 1.
  std::vector<double> momentum_polynomial(double x) const;

  SymbolModel with_terms(std::string name, std::vector<SymbolTerm> terms) const;

 private:
  void check_point(const PhaseVector& v) const;
  std::string name_;
  int dimension_;
  int order_;
  std::vector<SymbolTerm> terms_;
  double c0_;
  double r0_;
};

// Adds the transposed pair for every off-diagonal entry given only once.
std::vector<SymbolTerm> mirror_terms(std::vector<SymbolTerm> terms);

// Phase-space box {|x|_inf <= x_extent, |xi|_inf <= xi_extent}.
struct PhaseBox {
  int dimension = 1;
  double x_extent = 1.0;
  double xi_extent = 1.0;

  double lower(int k) const { return k < dimension ? -x_extent : -xi_extent; }
  double upper(int k) const { return k < dimension ? x_extent : xi_extent; }
  double width(int k) const { return upper(k) - lower(k); }
  double volume() const;
  bool contains(const PhaseVector& v, double slack = 0.0) const;
  // Map a point of [0,1)^{2d} into the box.
  PhaseVector map_unit(std::span<const double> u) const;
};

struct CriticalPointReport {
  PhaseVector location;
  double energy = 0.0;
  double gradient_norm = 0.0;
  std::vector<double> hessian_eigenvalues;
  int hessian_rank = 0;
  PhaseMatrix hessian;
  std::string error;
};

struct CriticalSearchOptions {
  std::size_t seeds = 10000;
  double dedup_radius = 1e-6;
  double gradient_tolerance = 1e-8;
  int max_iterations = 80;
};

double rank_tolerance(std::span<const double> eigenvalues);

CriticalPointReport classify_point(const SymbolModel& model, const PhaseVector& v);

std::vector<CriticalPointReport> find_critical_points(const SymbolModel& model,
                                                      const PhaseBox& box, double energy,
                                                      double window,
                                                      const CriticalSearchOptions& options = {});

struct HypothesisReport {
  bool confinement_ok = false;
  double boundary_minimum = 0.0;
  bool dimension_ok = false;
  bool rank_ok = false;
  bool rank_vacuous = false;
  bool theorem_applicable = false;
  std::vector<CriticalPointReport> points;
  std::vector<CriticalPointReport> rank_witnesses;
  std::string verdict;
  std::string coverage_caveat;
};

HypothesisReport check_theorem_hypotheses(const SymbolModel& model, const PhaseBox& box,
                                          double energy, double window,
                                          const CriticalSearchOptions& options = {});

struct EllipticityReport {
  bool ok = false;
  double min_ratio = 0.0;
  std::size_t samples = 0;
};

// Samples (x, xi) with |x|_inf <= x_extent and |xi| = 1.
EllipticityReport check_ellipticity(const SymbolModel& model, double x_extent,
                                    std::size_t samples = 10000);

// Minimum of the symbol over deterministic samples on the boundary of the box.
double boundary_minimum(const SymbolModel& model, const PhaseBox& box,
                        std::size_t samples = 10000);

struct BuiltinModel {
  SymbolModel model;
  PhaseBox box;
};

std::vector<std::string> builtin_model_names();
BuiltinModel builtin_model(const std::string& name);

}  // namespace weylab
