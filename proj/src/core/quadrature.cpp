// SPDX-License-Identifier: Apache-2.0
#include "core/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/sobol.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "core/error.hpp"

namespace weylab {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "Gauss rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    if (n == 1) {
      it = cache.emplace(n, GaussRule{{0.0}, {2.0}}).first;
    } else {
      it = cache.emplace(n, build_rule(n)).first;
    }
  }
  return it->second;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double panel = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      panel += rule.weights[k] * f(mid + 0.5 * width * rule.nodes[k]);
    }
    total += 0.5 * width * panel;
  }
  return total;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tolerance, double* error_estimate) {
  double err = 0.0;
  double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 15, tolerance, &err);
  if (error_estimate) *error_estimate = err;
  return value;
}

std::vector<std::vector<double>> sobol_points(int dim, std::size_t count, std::size_t skip) {
  if (dim < 1) throw Error(ErrorCode::invalid_argument, "Sobol dimension must be positive");
  boost::random::sobol engine(static_cast<std::size_t>(dim));
  engine.discard(skip * static_cast<std::size_t>(dim));
  const double scale = 1.0 / (static_cast<double>(engine.max()) + 1.0);
  std::vector<std::vector<double>> points(count, std::vector<double>(dim));
  for (auto& p : points) {
    for (auto& c : p) c = static_cast<double>(engine()) * scale;
  }
  return points;
}

}  // namespace weylab
