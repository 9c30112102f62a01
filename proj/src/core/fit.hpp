// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace weylab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double ci_half_width = 0.0;  // 95% two-sided, Student t with n-2 dof
  int n_points = 0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// OLS of log(y) against log(x); entries with y <= 0 are excluded.
LinearFit log_log_fit(std::span<const double> x, std::span<const double> y,
                      std::vector<std::size_t>* excluded = nullptr);

}  // namespace weylab
