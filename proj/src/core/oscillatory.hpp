// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "core/fit.hpp"
#include "core/symbols.hpp"

namespace weylab {

// Compactly supported amplitude b on phase space, supported in the ball B(center, radius).
struct Amplitude {
  std::function<double(const PhaseVector&)> value;
  PhaseVector center;
  double radius = 0.0;
  std::string description;
};

// exp(1 - 1/(1 - s^2)) in s = |v - center| / radius, equal to 1 at the center.
Amplitude bump_amplitude(const PhaseVector& center, double radius);

// base * (1 - chi(|grad a0| / threshold)) with chi = 1 on [0,1], 0 on [2, inf): vanishes where
// |grad a0| <= threshold.
Amplitude remove_critical_region(const SymbolModel& model, Amplitude base, double threshold);

struct OscillatoryResult {
  double t = 0.0;
  double h = 0.0;
  std::complex<double> value;
  double quadrature_error = 0.0;
  bool reliable = true;
  std::size_t nodes = 0;
  std::string amplitude_support;
};

// (2 pi h)^-d int exp(i t p(v) / h) b(v) dv by tensor Gauss-Legendre panels with at least
// 12 nodes per wavelength; the error is the difference to the result on half-width panels.
OscillatoryResult oscillatory_integral(const SymbolModel& model, const Amplitude& b, double t,
                                       double h, std::size_t node_budget = 50000000);

struct DecaySample {
  double h = 0.0;
  double t = 0.0;
  double modulus = 0.0;
  double quadrature_error = 0.0;
  bool used = true;
  double slope_so_far = 0.0;
};

struct DecayReport {
  double mu = 0.0;
  double delta0 = 0.0;
  double kappa = 0.0;
  double order = 0.0;         // m in the bound h^(n kappa - m)
  int n_max = 0;
  std::vector<DecaySample> samples;
  LinearFit fit;
  int orders_passed = 0;      // largest n <= n_max with slope >= n kappa - m
  bool decays = false;        // orders_passed == n_max
  std::vector<std::string> excluded;
};

// kappa = min(mu - delta0 - 1/2, (1 - mu)/2); t = h^(1 - mu).
double decay_kappa(double mu, double delta0);

DecayReport nonstationary_decay_check(const SymbolModel& model,
                                      const std::function<Amplitude(double h)>& amplitude,
                                      double mu, double delta0, int n_max,
                                      const std::vector<double>& h_grid, double order = 0.0,
                                      std::size_t node_budget = 50000000);

}  // namespace weylab
