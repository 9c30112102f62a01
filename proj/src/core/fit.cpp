// SPDX-License-Identifier: Apache-2.0
#include "core/fit.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace weylab {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::dimension_mismatch, "fit: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::invalid_argument, "fit: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw Error(ErrorCode::degenerate, "fit: abscissae have zero variance");
  LinearFit fit;
  fit.n_points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    boost::math::students_t dist(static_cast<double>(n - 2));
    fit.ci_half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * fit.slope_stderr;
  } else {
    fit.slope_stderr = std::numeric_limits<double>::infinity();
    fit.ci_half_width = std::numeric_limits<double>::infinity();
  }
  return fit;
}

LinearFit log_log_fit(std::span<const double> x, std::span<const double> y,
                      std::vector<std::size_t>* excluded) {
  if (x.size() != y.size()) throw Error(ErrorCode::dimension_mismatch, "fit: length mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0) || !std::isfinite(y[i])) {
      if (excluded) excluded->push_back(i);
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares(lx, ly);
}

}  // namespace weylab
