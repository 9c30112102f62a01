// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace weylab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Cached Gauss-Legendre rule with n nodes.
const GaussRule& gauss_legendre(int n);

// Composite Gauss-Legendre on [a, b] with equal panels.
double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int panels, int order);

// Globally adaptive Gauss-Kronrod on [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tolerance, double* error_estimate = nullptr);

// Low-discrepancy points in [0,1)^dim.
std::vector<std::vector<double>> sobol_points(int dim, std::size_t count,
                                              std::size_t skip = 0);

}  // namespace weylab
