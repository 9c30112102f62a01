// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/fit.hpp"
#include "core/symbols.hpp"

namespace weylab {

struct MomentDefects {
  double mass = 0.0;            // integral of gamma minus one
  double first = 0.0;           // max |integral z_i gamma|
  double second = 0.0;          // max |integral z_i z_j gamma|
  double max() const;
};

struct KernelResolution {
  int radial_panels = 0;   // 0 selects the default for the dimension
  int radial_order = 0;
  int angular_points = 0;
};

// Radial kernel (c0 + c2 |z|^2) exp(-1 / (1 - |z|^2 / rho^2)) with unit mass and
// vanishing first and second moments, together with a quadrature rule over its support.
class MollifierKernel {
 public:
  MollifierKernel(int dimension, double support_radius, KernelResolution resolution = {});

  int dimension() const { return d_; }
  double support_radius() const { return rho_; }
  double c0() const { return c0_; }
  double c2() const { return c2_; }
  // Defects from adaptive radial quadrature.
  const MomentDefects& moment_defects() const { return defects_; }
  // Defects of the discrete rule used for convolution.
  const MomentDefects& rule_defects() const { return rule_defects_; }
  // Fourth radial moment integral |z|^4 gamma, which sets the leading error on quartics.
  double fourth_moment() const { return fourth_; }

  double value(std::span<const double> z) const;
  // Partial derivative of order |alpha| <= 4.
  double derivative(std::span<const double> z, const MultiIndex& alpha) const;
  // d^k/ds^k of the radial profile g(s), gamma(z) = g(|z|^2), for k <= 4.
  std::array<double, 5> profile_derivatives(double s) const;

  std::size_t node_count() const { return weights_.size(); }
  std::span<const double> node(std::size_t k) const {
    return {nodes_.data() + k * d_, static_cast<std::size_t>(d_)};
  }
  // Quadrature weights multiplied by the kernel derivative at each node.
  const std::vector<double>& weighted(const MultiIndex& alpha) const;

 private:
  int d_;
  double rho_;
  double c0_ = 0.0, c2_ = 0.0, fourth_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::map<MultiIndex, std::vector<double>> weighted_;
  MomentDefects defects_;
  MomentDefects rule_defects_;
};

std::shared_ptr<const MollifierKernel> build_mollifier(int dimension, double support_radius,
                                                       KernelResolution resolution = {});

// Admissible open interval for the smoothing exponent.
void check_smoothing_exponent(double delta0, double holder_exponent);

// a_h = a * gamma_{h^delta0}, evaluated by quadrature over the kernel support.
class RegularizedCoefficient final : public ScalarField {
 public:
  RegularizedCoefficient(std::shared_ptr<const ScalarField> base, double h, double delta0,
                         std::shared_ptr<const MollifierKernel> kernel);
  int dimension() const override { return base_->dimension(); }
  double value(std::span<const double> x) const override;
  Jet2 jet(std::span<const double> x) const override;
  bool is_constant() const override { return base_->is_constant(); }
  std::string describe() const override;
  double derivative(std::span<const double> x, const MultiIndex& alpha) const;

  double h() const { return h_; }
  double delta0() const { return delta0_; }
  double scale() const { return scale_; }
  const ScalarField& base() const { return *base_; }

 private:
  void base_samples(std::span<const double> x, std::vector<double>& out) const;
  std::shared_ptr<const ScalarField> base_;
  double h_, delta0_, scale_;
  std::shared_ptr<const MollifierKernel> kernel_;
};

std::shared_ptr<const ScalarField> regularize(std::shared_ptr<const ScalarField> a, double h,
                                              double delta0, double holder_exponent,
                                              std::shared_ptr<const MollifierKernel> kernel);

// Regularized symbol with every coefficient mollified at scale h^delta0, plus
// shift * (1 + |xi|^2)^m0 when shift is nonzero.
SymbolModel regularize_symbol(const SymbolModel& model, double h, double delta0,
                              std::shared_ptr<const MollifierKernel> kernel, double shift = 0.0);

// Terms of s * (1 + |xi|^2)^m as momentum monomials with constant coefficients.
std::vector<SymbolTerm> momentum_shift_terms(int dimension, int order, double s);

struct SmoothingSample {
  double h = 0.0;
  double sup_norm = 0.0;
};

struct SmoothingFit {
  MultiIndex alpha{};
  int derivative_order = 0;
  bool growth_target = false;  // |alpha| >= 3 measures |d^alpha a_h|
  bool exact_annihilation = false;
  double expected_slope = 0.0;
  std::vector<SmoothingSample> samples;
  LinearFit fit;
};

struct SmoothingFitOptions {
  double sample_lo = -1.0;
  double sample_hi = 1.0;
  std::size_t sample_count = 1000;
  double annihilation_threshold = 1e-9;
  // Points always included in the sample set, e.g. a known singular locus.
  std::vector<std::vector<double>> anchors;
};

SmoothingFit fit_smoothing_exponents(std::shared_ptr<const ScalarField> a, const MultiIndex& alpha,
                                     std::span<const double> h_grid, double delta0,
                                     double holder_exponent,
                                     std::shared_ptr<const MollifierKernel> kernel,
                                     const SmoothingFitOptions& options = {});

}  // namespace weylab
