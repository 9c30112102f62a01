// SPDX-License-Identifier: Apache-2.0
#include "core/flow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace weylab {

namespace {

constexpr double kS15 = 3.872983346207417;  // sqrt(15)
const double kA[3][3] = {{5.0 / 36, 2.0 / 9 - kS15 / 15, 5.0 / 36 - kS15 / 30},
                         {5.0 / 36 + kS15 / 24, 2.0 / 9, 5.0 / 36 - kS15 / 24},
                         {5.0 / 36 + kS15 / 30, 2.0 / 9 + kS15 / 15, 5.0 / 36}};
const double kB[3] = {5.0 / 18, 4.0 / 9, 5.0 / 18};

PhaseMatrix symplectic_j(int n) {
  const int d = n / 2;
  PhaseMatrix J = PhaseMatrix::Zero(n, n);
  J.block(0, d, d, d).setIdentity();
  J.block(d, 0, d, d) = -PhaseMatrix::Identity(d, d);
  return J;
}

PhaseVector gauss_step(const SymbolModel& model, const PhaseMatrix& J, const PhaseVector& y,
                       double dt) {
  const int n = static_cast<int>(y.size());
  const PhaseVector f0 = J * model.gradient(y);
  Eigen::VectorXd K(3 * n);
  for (int i = 0; i < 3; ++i) K.segment(i * n, n) = f0;
  const PhaseMatrix Jf = J * model.hessian(y);
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(3 * n, 3 * n);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) M.block(i * n, j * n, n, n) -= dt * kA[i][j] * Jf;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const double scale = 1.0 + K.norm();
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::VectorXd R(3 * n);
    for (int i = 0; i < 3; ++i) {
      PhaseVector yi = y;
      for (int j = 0; j < 3; ++j) yi += dt * kA[i][j] * K.segment(j * n, n);
      R.segment(i * n, n) = K.segment(i * n, n) - J * model.gradient(yi);
    }
    const Eigen::VectorXd dK = lu.solve(R);
    K -= dK;
    if (!dK.allFinite()) break;
    if (dK.norm() <= 1e-15 * scale) break;
  }
  if (!K.allFinite()) throw Error(ErrorCode::numerical, "collocation stages diverged");
  PhaseVector out = y;
  for (int i = 0; i < 3; ++i) out += dt * kB[i] * K.segment(i * n, n);
  return out;
}

PhaseVector fixed_steps(const SymbolModel& model, const PhaseMatrix& J, PhaseVector y, double T,
                        std::size_t steps) {
  const double dt = T / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) y = gauss_step(model, J, y, dt);
  return y;
}

PhaseVector segment(const SymbolModel& model, const PhaseMatrix& J, const PhaseVector& y, double T,
                    double tol, std::size_t& steps_used) {
  if (T == 0.0) return y;
  std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(T) / 0.05)));
  PhaseVector coarse = fixed_steps(model, J, y, T, steps);
  steps_used += steps;
  for (int level = 0; level < 20; ++level) {
    steps *= 2;
    PhaseVector fine = fixed_steps(model, J, y, T, steps);
    steps_used += steps;
    if ((fine - coarse).norm() <= tol * (1.0 + fine.norm())) return fine;
    coarse = fine;
  }
  std::string where;
  for (int k = 0; k < coarse.size(); ++k) where += (k ? ", " : "") + std::to_string(coarse[k]);
  throw Error(ErrorCode::numerical, "flow step size collapsed; last state (" + where + ")");
}

}  // namespace

PhaseVector hamiltonian_field(const SymbolModel& model, const PhaseVector& v) {
  return symplectic_j(static_cast<int>(v.size())) * model.gradient(v);
}

FlowTrajectory integrate_flow(const SymbolModel& model, const PhaseVector& v0,
                              const std::vector<double>& times, double tol) {
  if (v0.size() != model.phase_dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "start point has wrong dimension");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be > 0");
  const PhaseMatrix J = symplectic_j(static_cast<int>(v0.size()));
  FlowTrajectory tr;
  tr.start = v0;
  tr.times = times;
  tr.states.assign(times.size(), v0);
  std::vector<std::size_t> order(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(times[a]) < std::abs(times[b]);
  });
  const double e0 = model.value(v0);
  for (int sign : {1, -1}) {
    PhaseVector y = v0;
    double t = 0.0;
    for (std::size_t idx : order) {
      const double target = times[idx];
      if (target == 0.0 || (target > 0) != (sign > 0)) continue;
      y = segment(model, J, y, target - t, tol, tr.integrator_steps);
      t = target;
      tr.states[idx] = y;
      tr.energy_drift = std::max(tr.energy_drift, std::abs(model.value(y) - e0));
    }
  }
  return tr;
}

PhaseVector flow_map(const SymbolModel& model, const PhaseVector& v0, double t, double tol) {
  return integrate_flow(model, v0, {t}, tol).states[0];
}

double flow_jacobian_determinant(const SymbolModel& model, const PhaseVector& v, double t,
                                 double step) {
  const int n = static_cast<int>(v.size());
  PhaseMatrix D(n, n);
  for (int k = 0; k < n; ++k) {
    PhaseVector a = v, b = v;
    a[k] += step;
    b[k] -= step;
    D.col(k) = (flow_map(model, a, t, 1e-13) - flow_map(model, b, t, 1e-13)) / (2.0 * step);
  }
  return D.determinant();
}

DisplacementReport check_displacement_bounds(const SymbolModel& a0, const SymbolModel& p,
                                             const PhaseBox& box, const std::vector<double>& t_grid,
                                             double cbar, double delta0, double h,
                                             const DisplacementOptions& options) {
  if (options.samples < 2) throw Error(ErrorCode::invalid_argument, "at least two samples are required");
  if (t_grid.empty()) throw Error(ErrorCode::invalid_argument, "empty time grid");
  const int n = a0.phase_dimension();
  DisplacementReport r;
  r.samples = options.samples;
  r.t_grid = t_grid;
  r.gradient_floor = cbar * std::pow(h, delta0);
  const PhaseMatrix J = symplectic_j(n);
  // Rejection sampling of the non-critical region.
  std::vector<PhaseVector> points;
  CounterStream rng(options.seed, 0xf10eULL);
  std::size_t tries = 0;
  while (points.size() < options.samples) {
    if (++tries > 1000000 * options.samples) {
      throw Error(ErrorCode::invalid_argument, "non-critical sampling region is empty");
    }
    PhaseVector v(n);
    for (int k = 0; k < n; ++k) v[k] = rng.uniform(box.lower(k), box.upper(k));
    const SymbolDerivatives d = a0.derivatives(v);
    if (std::abs(d.value - options.energy) <= options.window && d.gradient.norm() > r.gradient_floor) {
      points.push_back(v);
    }
  }
  struct Row {
    std::size_t sample;
    double t, disp, grad_term, taylor, grad_norm;
  };
  std::vector<Row> rows;
  for (std::size_t s = 0; s < points.size(); ++s) {
    const PhaseVector& v = points[s];
    const PhaseVector g = p.gradient(v);
    r.max_symbol_gradient_gap = std::max(r.max_symbol_gradient_gap, (g - a0.gradient(v)).norm());
    const FlowTrajectory tr = integrate_flow(p, v, t_grid);
    r.max_energy_drift = std::max(r.max_energy_drift, tr.energy_drift);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      const double t = t_grid[i];
      const PhaseVector delta = tr.states[i] - v;
      rows.push_back({s, t, delta.norm(), std::abs(t) * g.norm(), (delta - t * (J * g)).norm(), g.norm()});
    }
  }
  // Lower bound and empirical t0.
  double t_max = 0.0;
  for (double t : t_grid) t_max = std::max(t_max, std::abs(t));
  double first_failure = std::numeric_limits<double>::infinity();
  r.min_lower_ratio = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    if (row.t == 0.0) continue;
    const double ratio = row.disp / row.grad_term;
    r.min_lower_ratio = std::min(r.min_lower_ratio, ratio);
    if (row.disp < 0.5 * row.grad_term) {
      ++r.lower_violations;
      first_failure = std::min(first_failure, std::abs(row.t));
      if (r.witnesses.size() < 10) r.witnesses.push_back({points[row.sample], row.t, row.disp, row.grad_term});
    }
  }
  r.t0_empirical = 0.0;
  for (double t : t_grid) {
    if (std::abs(t) < first_failure) r.t0_empirical = std::max(r.t0_empirical, std::abs(t));
  }
  // Upper and Taylor constants: calibrate on the first half, check the second half.
  const std::size_t half = points.size() / 2;
  double c1 = 0.0, c2 = 0.0;
  for (const auto& row : rows) {
    if (row.t == 0.0) continue;
    const double q1 = row.disp / row.grad_term;
    const double q2 = row.taylor / (row.t * row.t * row.grad_norm);
    r.c1_observed = std::max(r.c1_observed, q1);
    r.c2_observed = std::max(r.c2_observed, q2);
    if (row.sample < half) {
      c1 = std::max(c1, q1);
      c2 = std::max(c2, q2);
    }
  }
  r.c1 = options.calibration_factor * c1;
  r.c2 = options.calibration_factor * c2;
  for (const auto& row : rows) {
    if (row.sample < half || row.t == 0.0) continue;
    if (row.disp > r.c1 * row.grad_term) ++r.upper_violations;
    if (row.taylor > r.c2 * row.t * row.t * row.grad_norm) ++r.taylor_violations;
  }
  // Group law, reversibility and volume preservation on a subset.
  const std::size_t m = std::min(options.invariant_samples, points.size());
  for (std::size_t s = 0; s < m; ++s) {
    const PhaseVector& v = points[s];
    const double t = rng.uniform(-0.5, 0.5) * t_max, u = rng.uniform(-0.5, 0.5) * t_max;
    const PhaseVector ts = flow_map(p, flow_map(p, v, u), t);
    r.max_group_defect = std::max(r.max_group_defect, (flow_map(p, v, t + u) - ts).norm());
    r.max_reversibility_defect =
        std::max(r.max_reversibility_defect, (flow_map(p, flow_map(p, v, t), -t) - v).norm());
    r.max_jacobian_defect =
        std::max(r.max_jacobian_defect, std::abs(flow_jacobian_determinant(p, v, t) - 1.0));
  }
  return r;
}

}  // namespace weylab
