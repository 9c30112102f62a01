// SPDX-License-Identifier: Apache-2.0
#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "core/directional.hpp"
#include "core/error.hpp"
#include "core/flow.hpp"
#include "core/mollify.hpp"
#include "core/oscillatory.hpp"
#include "core/polysub.hpp"
#include "core/smoothing.hpp"

namespace weylab {

namespace {

using Json = nlohmann::ordered_json;

const std::vector<double> kNearCriticalGrid{1e-1, 1e-2, 1e-3, 1e-4};
const std::vector<double> kDirectionalGrid{1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5};
constexpr double kDirectionalCbar = 1.5;
constexpr double kDecayMu = 0.95;
constexpr int kDecayOrders = 3;
constexpr int kSublevelDegree = 5;
constexpr double kGroupTolerance = 1e-7;
constexpr double kJacobianTolerance = 1e-4;

Json config_json(const ExperimentConfig& c) {
  Json j = Json::object();
  std::istringstream in(emit_config(c));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

// h whose log-value deviates most from a line of the expected slope through the centroid.
double slope_witness(const ExponentFit& fit, double expected) {
  double mean = 0.0;
  for (std::size_t i = 0; i < fit.h.size(); ++i)
    mean += std::log(fit.values[i]) - expected * std::log(fit.h[i]);
  mean /= static_cast<double>(fit.h.size());
  double worst = -1.0, witness = fit.h.front();
  for (std::size_t i = 0; i < fit.h.size(); ++i) {
    const double r = std::abs(std::log(fit.values[i]) - expected * std::log(fit.h[i]) - mean);
    if (r > worst) worst = r, witness = fit.h[i];
  }
  return witness;
}

CriterionResult slope_criterion(std::string id, std::string description, const SweepResult& sweep,
                                const std::string& quantity, const RecordQuantity& select,
                                double expected, double tolerance) {
  const auto covered = sweep.completed_h();
  const auto missing = sweep.missing_h();
  try {
    const ExponentFit fit = fit_exponent(sweep.records, quantity, select);
    const bool ok = std::abs(fit.slope - expected) <= tolerance;
    auto c = criterion_from_samples(std::move(id), std::move(description), covered, missing,
                                    ok ? std::nullopt : std::optional(slope_witness(fit, expected)),
                                    ok);
    c.details["fit"] = fit_to_json(fit);
    c.details["expected_slope"] = expected;
    c.details["tolerance"] = tolerance;
    return c;
  } catch (const Error& e) {
    auto c = criterion_from_samples(std::move(id), std::move(description), covered, missing,
                                    std::nullopt, true);
    c.status = Status::partial;
    c.details["fit_error"] = e.what();
    return c;
  }
}

CriterionResult bracketing_criterion(const SweepResult& sweep) {
  std::optional<double> witness;
  std::size_t violations = 0;
  Json rows = Json::array();
  for (const auto& r : sweep.records) {
    if (!r.ok) continue;
    const bool ok = r.count_plus <= r.count_raw && r.count_raw <= r.count_minus &&
                    r.count_plus >= 0 && r.count_raw >= 0;
    if (!ok) {
      ++violations;
      if (!witness) witness = r.h;
    }
    rows.push_back({{"h", r.h}, {"plus", r.count_plus}, {"raw", r.count_raw},
                    {"minus", r.count_minus}});
  }
  auto c = criterion_from_samples("bracketing", "count(plus) <= count(raw) <= count(minus) at every h",
                                  sweep.completed_h(), sweep.missing_h(), witness,
                                  violations == 0);
  c.details["violations"] = violations;
  c.details["counts"] = std::move(rows);
  return c;
}

SweepSettings sweep_settings(const ExperimentConfig& cfg) {
  SweepSettings s;
  s.energy = cfg.energy;
  s.epsilon = cfg.epsilon;
  s.extra_epsilons.clear();
  if (cfg.extra_epsilon > 0.0) s.extra_epsilons.push_back(cfg.extra_epsilon);
  s.delta0 = cfg.delta0;
  s.window = cfg.window;
  s.h_grid = resolve_h_grid(cfg);
  s.seed = cfg.seed;
  s.stencil_order = cfg.stencil_order;
  s.confinement_gap = cfg.confinement_gap;
  s.variant = cfg.variant;
  s.grid_points = cfg.grid_points;
  if (cfg.samples > 0) s.weyl_budget = cfg.samples;
  return s;
}

Json sweep_fit_tables(const SweepResult& sweep) {
  Json fits = Json::object();
  auto add = [&](const std::string& key, auto&& make) {
    try {
      fits[key] = fit_to_json(make());
    } catch (const Error& e) {
      fits[key] = {{"error", e.what()}};
    }
  };
  const RecordQuantity abs_rem = [](const SweepRecord& r) { return std::abs(r.remainder); };
  const RecordQuantity ratio = [](const SweepRecord& r) { return r.ratio; };
  const RecordQuantity rval = [](const SweepRecord& r) { return r.r_value; };
  add("abs_remainder", [&] { return fit_exponent(sweep.records, "|N - weyl|", abs_rem); });
  add("abs_remainder_log_corrected",
      [&] { return fit_log_corrected(sweep.records, "|N - weyl|", abs_rem); });
  add("ratio", [&] { return fit_exponent(sweep.records, "ratio", ratio); });
  add("ratio_log_corrected", [&] { return fit_log_corrected(sweep.records, "ratio", ratio); });
  add("R_value", [&] { return fit_exponent(sweep.records, "R_value", rval); });
  for (std::size_t i = 0; i < sweep.settings.extra_epsilons.size(); ++i) {
    const std::string tag = "ratio_eps" + csv_number(sweep.settings.extra_epsilons[i]);
    add(tag, [&] {
      return fit_exponent(sweep.records, tag,
                          [i](const SweepRecord& r) { return r.extra_ratio.at(i); });
    });
  }
  return fits;
}

double sup_ratio(const SweepResult& sweep, int extra = -1) {
  double m = 0.0;
  for (const auto& r : sweep.records)
    if (r.ok) m = std::max(m, extra < 0 ? r.ratio : r.extra_ratio.at(extra));
  return m;
}

std::optional<double> exact_sublevel_volume(const std::string& model, double energy) {
  if (energy <= 0.0) return 0.0;
  if (model == "harmonic") return std::numbers::pi * energy;
  if (model == "separable_harmonic_2d") return 0.5 * std::numbers::pi * std::numbers::pi * energy * energy;
  return std::nullopt;
}

ExperimentOutput weyl_sweep(const ExperimentConfig& cfg) {
  const auto bm = resolve_model(cfg);
  const auto sweep = run_h_sweep(bm.model, bm.box, sweep_settings(cfg));
  ExperimentOutput out;
  auto& v = out.verdict;
  const int d = bm.model.dimension();
  const RecordQuantity abs_rem = [](const SweepRecord& r) { return std::abs(r.remainder); };
  v.criteria.push_back(slope_criterion("remainder_exponent",
                                       "slope of |N - weyl| against h equals 1 - d within 0.2",
                                       sweep, "|N - weyl|", abs_rem, 1.0 - d, 0.2));
  if (const auto exact = exact_sublevel_volume(bm.model.name(), cfg.energy)) {
    const double dev = std::abs(sweep.weyl_volume.value - *exact);
    const double tol = 3.0 * sweep.weyl_volume.std_error;
    CriterionResult c;
    c.id = "weyl_volume";
    c.description = "c_E within three standard errors of the closed form";
    c.status = dev <= tol || (tol == 0.0 && dev <= 1e-9 * *exact) ? Status::pass : Status::fail;
    c.details = {{"estimate", sweep.weyl_volume.value},
                 {"std_error", sweep.weyl_volume.std_error},
                 {"exact", *exact},
                 {"deviation_in_std_errors",
                  sweep.weyl_volume.std_error > 0 ? dev / sweep.weyl_volume.std_error : 0.0}};
    v.criteria.push_back(std::move(c));
  }
  v.criteria.push_back(bracketing_criterion(sweep));
  v.tables["sweep"] = sweep_to_json(sweep);
  v.tables["fits"] = sweep_fit_tables(sweep);
  v.tables["C_epsilon"] = sup_ratio(sweep);
  out.files.push_back({"weyl_sweep.csv", sweep_csv(sweep)});
  out.files.push_back({"volumes.csv", volume_csv(sweep)});
  return out;
}

std::string near_critical_rows(const std::vector<NearCriticalEstimate>& est,
                               const std::vector<double>& grid, double energy) {
  std::ostringstream os;
  for (std::size_t i = 0; i < est.size(); ++i)
    os << "near_critical," << csv_number(energy) << ',' << csv_number(energy) << ','
       << csv_number(grid[i]) << ',' << csv_number(est[i].volume.value) << ','
       << csv_number(est[i].volume.std_error) << ',' << est[i].volume.sample_count << ','
       << est[i].volume.seed << '\n';
  return os.str();
}

ExperimentOutput critical_sweep(const ExperimentConfig& cfg) {
  const auto bm = resolve_model(cfg);
  const auto& model = bm.model;
  const auto sweep = run_h_sweep(model, bm.box, sweep_settings(cfg));
  ExperimentOutput out;
  auto& v = out.verdict;

  {
    CriterionResult c;
    c.id = "hypotheses";
    c.description = "confinement, d >= 2 and Hessian rank >= 2 at critical points in the window";
    c.status = sweep.in_theorem_scope ? Status::pass : Status::fail;
    c.details = {{"verdict", sweep.hypotheses.verdict},
                 {"critical_points", sweep.hypotheses.points.size()},
                 {"coverage_caveat", sweep.hypotheses.coverage_caveat}};
    v.criteria.push_back(std::move(c));
  }
  const RecordQuantity ratio = [](const SweepRecord& r) { return r.ratio; };
  auto rc = slope_criterion("ratio_bounded",
                            "slope of |N - weyl| h^d / R against h within 0.25 of 0", sweep,
                            "ratio", ratio, 0.0, 0.25);
  rc.details["C_epsilon"] = sup_ratio(sweep);
  try {
    rc.details["log_corrected_fit"] = fit_to_json(fit_log_corrected(sweep.records, "ratio", ratio));
  } catch (const Error& e) {
    rc.details["log_corrected_fit"] = {{"error", e.what()}};
  }
  for (std::size_t i = 0; i < sweep.settings.extra_epsilons.size(); ++i)
    rc.details["C_epsilon_eps" + csv_number(sweep.settings.extra_epsilons[i])] =
        sup_ratio(sweep, static_cast<int>(i));
  v.criteria.push_back(std::move(rc));
  v.criteria.push_back(bracketing_criterion(sweep));

  // Near-critical volume scaling.
  std::vector<NearCriticalEstimate> nc;
  std::vector<double> vols;
  NearCriticalOptions nopt;
  nopt.volume.seed = cfg.seed;
  for (double h : kNearCriticalGrid) {
    nc.push_back(near_critical_volume(model, bm.box, cfg.energy, cfg.window, h, cfg.delta0,
                                      cfg.cbar_upper, nopt));
    vols.push_back(nc.back().volume.value);
  }
  {
    const double threshold = 3.0 * cfg.delta0 - 0.15;
    const auto fit = fit_exponent(kNearCriticalGrid, vols, "near_critical_volume");
    const bool ok = fit.slope >= threshold;
    auto c = criterion_from_samples("near_critical_volume",
                                    "volume exponent of the thickened near-critical set >= 3 delta0 - 0.15 and > 1",
                                    kNearCriticalGrid, {},
                                    ok ? std::nullopt : std::optional(slope_witness(fit, threshold)),
                                    ok && fit.slope > 1.0);
    c.details["fit"] = fit_to_json(fit);
    c.details["threshold"] = threshold;
    Json rows = Json::array();
    for (std::size_t i = 0; i < nc.size(); ++i)
      rows.push_back({{"h", kNearCriticalGrid[i]},
                      {"volume", nc[i].volume.value},
                      {"std_error", nc[i].volume.std_error},
                      {"cloud_points", nc[i].cloud_points},
                      {"bounding_volume", nc[i].bounding_volume}});
    c.details["samples"] = std::move(rows);
    v.criteria.push_back(std::move(c));
  }

  // Directional slices at each rank >= 2 critical point in the window.
  Json frames = Json::array();
  std::string directional_csv = "center,direction,h,max_measure,bound,slope,expected\n";
  bool directional_ok = true;
  std::size_t frame_count = 0;
  for (const auto& p : sweep.hypotheses.points) {
    if (p.hessian_rank < 2) continue;
    const auto frame = build_direction_frame(model, p.location, cfg.seed);
    ++frame_count;
    Json fj;
    fj["center"] = std::vector<double>(p.location.data(), p.location.data() + p.location.size());
    fj["rows"] = {frame.rows[0], frame.rows[1]};
    fj["theta"] = {frame.theta[0], frame.theta[1]};
    fj["radius"] = frame.radius;
    fj["det_w"] = frame.det_w;
    std::array<double, 3> bounds{};
    Json sweeps = Json::array();
    std::ostringstream center;
    for (int i = 0; i < p.location.size(); ++i) center << (i ? " " : "") << csv_number(p.location[i]);
    for (int k = 1; k <= 3; ++k) {
      const auto ds = directional_sweep(model, frame, k, kDirectionalGrid, cfg.delta0,
                                        kDirectionalCbar, 100, cfg.seed, model.order());
      const bool ok = ds.violations == 0 && ds.fit.slope >= ds.expected_exponent - 0.05;
      directional_ok = directional_ok && ok;
      bounds[k - 1] = ds.constant * std::pow(kDirectionalGrid.front(), ds.expected_exponent);
      sweeps.push_back({{"direction", k},
                        {"slope", ds.fit.slope},
                        {"expected", ds.expected_exponent},
                        {"constant", ds.constant},
                        {"violations", ds.violations},
                        {"probes", ds.probes}});
      for (std::size_t i = 0; i < ds.h_grid.size(); ++i)
        directional_csv += center.str() + ',' + std::to_string(k) + ',' +
                           csv_number(ds.h_grid[i]) + ',' + csv_number(ds.max_measure[i]) + ',' +
                           csv_number(ds.constant * std::pow(ds.h_grid[i], ds.expected_exponent)) +
                           ',' + csv_number(ds.fit.slope) + ',' +
                           csv_number(ds.expected_exponent) + '\n';
    }
    const auto ball = ball_sublevel_volume(model, frame, kDirectionalGrid.front(), cfg.delta0,
                                           kDirectionalCbar, 200000, cfg.seed);
    const auto fub = fubini_bound(frame, bounds);
    const bool dominated = fub.product + 3.0 * ball.std_error >= ball.value;
    directional_ok = directional_ok && dominated;
    fj["sweeps"] = std::move(sweeps);
    fj["ball_volume"] = ball.value;
    fj["ball_volume_std_error"] = ball.std_error;
    fj["fubini_product_bound"] = fub.product;
    fj["single_direction_bound"] = fub.single;
    frames.push_back(std::move(fj));
  }
  {
    CriterionResult c;
    c.id = "directional_slices";
    c.description = "slice measures bounded by C h^rho_k with fitted slopes >= rho_k - 0.05, product bound dominating the ball volume";
    c.status = frame_count == 0 ? Status::partial : directional_ok ? Status::pass : Status::fail;
    c.covered_h = kDirectionalGrid;
    c.details = {{"cbar", kDirectionalCbar}, {"frames", std::move(frames)}};
    v.criteria.push_back(std::move(c));
  }

  v.tables["sweep"] = sweep_to_json(sweep);
  v.tables["fits"] = sweep_fit_tables(sweep);
  v.tables["C_epsilon"] = sup_ratio(sweep);
  out.files.push_back({"critical_sweep.csv", sweep_csv(sweep)});
  out.files.push_back({"volumes.csv", volume_csv(sweep) + near_critical_rows(nc, kNearCriticalGrid,
                                                                               cfg.energy)});
  out.files.push_back({"directional.csv", directional_csv});
  return out;
}

ExperimentOutput mollifier_rates(const ExperimentConfig& cfg) {
  const auto bm = resolve_model(cfg);
  const auto& model = bm.model;
  const int d = model.dimension();
  const double r0 = model.holder_exponent();
  const auto kernel = build_mollifier(d, 1.0);
  const auto hs = resolve_h_grid(cfg);
  ExperimentOutput out;
  auto& v = out.verdict;

  const double defect = std::max(kernel->moment_defects().max(), kernel->rule_defects().max());
  {
    CriterionResult c;
    c.id = "moment_defects";
    c.description = "kernel mass minus one and first and second moments below 1e-10";
    c.status = defect <= 1e-10 ? Status::pass : Status::fail;
    c.details = {{"radial_mass", kernel->moment_defects().mass},
                 {"radial_first", kernel->moment_defects().first},
                 {"radial_second", kernel->moment_defects().second},
                 {"rule_mass", kernel->rule_defects().mass},
                 {"rule_first", kernel->rule_defects().first},
                 {"rule_second", kernel->rule_defects().second},
                 {"nodes", kernel->node_count()}};
    v.criteria.push_back(std::move(c));
  }

  std::string csv = "coefficient,h,sup_norm,alpha,slope,ci_lo,ci_hi\n";
  SmoothingFitOptions opt;
  if (cfg.samples > 0) opt.sample_count = cfg.samples;
  opt.anchors = {std::vector<double>(d, 0.0)};
  int index = 0;
  for (const auto& term : model.terms()) {
    if (term.coefficient->is_constant()) continue;
    ++index;
    for (int order = 0; order <= 3; ++order) {
      MultiIndex alpha{};
      alpha[0] = order;
      const auto fit = fit_smoothing_exponents(term.coefficient, alpha, hs, cfg.delta0, r0,
                                               kernel, opt);
      const std::string label = index_string(alpha, d);
      CriterionResult c;
      c.id = "rate_c" + std::to_string(index) + "_alpha" + label;
      c.description = "sup-norm exponent for |alpha| = " + std::to_string(order) +
                      " within 0.2 of the expected rate";
      c.covered_h = hs;
      if (fit.exact_annihilation) {
        c.status = Status::pass;
        c.details["exact_annihilation"] = true;
      } else {
        const bool ok = std::abs(fit.fit.slope - fit.expected_slope) <= 0.2;
        c.status = ok ? Status::pass : Status::fail;
        if (!ok) {
          ExponentFit ef;
          for (const auto& s : fit.samples) ef.h.push_back(s.h), ef.values.push_back(s.sup_norm);
          c.witness_h = slope_witness(ef, fit.expected_slope);
        }
      }
      c.details["coefficient"] = term.coefficient->describe();
      c.details["slope"] = fit.fit.slope;
      c.details["ci_half_width"] = fit.fit.ci_half_width;
      c.details["expected_slope"] = fit.expected_slope;
      c.details["growth_target"] = fit.growth_target;
      v.criteria.push_back(std::move(c));
      for (const auto& s : fit.samples)
        csv += std::to_string(index) + ',' + csv_number(s.h) + ',' + csv_number(s.sup_norm) + ',' +
               label + ',' + csv_number(fit.fit.slope) + ',' +
               csv_number(fit.fit.slope - fit.fit.ci_half_width) + ',' +
               csv_number(fit.fit.slope + fit.fit.ci_half_width) + '\n';
    }
  }
  if (index == 0) {
    CriterionResult c;
    c.id = "rates";
    c.description = "model has no variable coefficient to smooth";
    c.status = Status::partial;
    v.criteria.push_back(std::move(c));
  }
  out.files.push_back({"mollifier.csv", csv});
  return out;
}

// Universal bound 4 (tau / (2 |lead|))^(1/m) on {|F| <= tau} over the real line.
double polya_bound(const std::vector<double>& coeffs, double tau) {
  const int m = static_cast<int>(coeffs.size()) - 1;
  return 4.0 * std::pow(tau / (2.0 * std::abs(coeffs.back())), 1.0 / m);
}

ExperimentOutput sublevel_lemma(const ExperimentConfig& cfg) {
  const auto hs = resolve_h_grid(cfg);
  const int trials = cfg.samples > 0 ? static_cast<int>(cfg.samples) : 200;
  const auto rep = verify_sublevel_lemma(cfg.seed, trials, kSublevelDegree, cfg.delta0, hs);
  ExperimentOutput out;
  auto& v = out.verdict;
  std::string csv = "trial,degree,h,tau,measure,bound,polya_bound,violated\n";
  std::size_t polya_violations = 0;
  std::optional<double> witness, polya_witness;
  for (const auto& tr : rep.trials) {
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double tau = std::pow(rep.c_scale * hs[i], rep.delta0);
      const double bound = rep.c_m[tr.degree - 1] * std::pow(hs[i], rep.delta0 / tr.degree);
      const double pb = polya_bound(tr.coefficients, tau);
      if (tr.measures[i] > pb * (1.0 + 1e-12)) {
        ++polya_violations;
        if (!polya_witness) polya_witness = hs[i];
      }
      if (tr.violated[i] && !witness) witness = hs[i];
      csv += std::to_string(tr.trial) + ',' + std::to_string(tr.degree) + ',' + csv_number(hs[i]) +
             ',' + csv_number(tau) + ',' + csv_number(tr.measures[i]) + ',' + csv_number(bound) +
             ',' + csv_number(pb) + ',' + (tr.violated[i] ? "1" : "0") + '\n';
    }
  }
  auto c = criterion_from_samples("calibrated_rate",
                                  "measure <= C_m h^(delta0/m) with C_m calibrated at the largest h",
                                  hs, {}, witness, rep.violations == 0);
  c.details["violations"] = rep.violations;
  c.details["trials"] = trials;
  c.details["C_m"] = rep.c_m;
  v.criteria.push_back(std::move(c));
  auto p = criterion_from_samples("polya_bound",
                                  "measure <= 4 (tau / (2 |leading coefficient|))^(1/m)", hs, {},
                                  polya_witness, polya_violations == 0);
  p.details["violations"] = polya_violations;
  v.criteria.push_back(std::move(p));
  out.files.push_back({"sublevel.csv", csv});
  return out;
}

ExperimentOutput flow_bounds(const ExperimentConfig& cfg) {
  const auto bm = resolve_model(cfg);
  const double h = resolve_h_grid(cfg).front();
  std::vector<double> tg;
  for (int i = -10; i <= 10; ++i) tg.push_back(cfg.t0 * i / 10.0);
  DisplacementOptions opt;
  opt.samples = cfg.samples > 0 ? cfg.samples : 100;
  opt.seed = cfg.seed;
  opt.energy = cfg.energy;
  opt.window = cfg.window;
  const auto r = check_displacement_bounds(bm.model, bm.model, bm.box, tg, cfg.cbar_lower,
                                           cfg.delta0, h, opt);
  ExperimentOutput out;
  auto& v = out.verdict;
  auto add = [&](std::string id, std::string desc, bool ok, Json details) {
    CriterionResult c;
    c.id = std::move(id);
    c.description = std::move(desc);
    c.status = ok ? Status::pass : Status::fail;
    c.covered_h = {h};
    if (!ok) c.witness_h = h;
    c.details = std::move(details);
    v.criteria.push_back(std::move(c));
  };
  add("lower_displacement", "|theta_t v - v| >= |t grad p| / 2 for |t| <= t0",
      r.lower_violations == 0,
      {{"violations", r.lower_violations}, {"min_ratio", r.min_lower_ratio},
       {"t0_empirical", r.t0_empirical}});
  add("upper_displacement", "|theta_t v - v| <= C1 |t grad p| with C1 fitted on half the samples",
      r.upper_violations == 0, {{"violations", r.upper_violations}, {"C1", r.c1},
                                {"C1_observed", r.c1_observed}});
  add("taylor_displacement", "|theta_t v - v - t J grad p| <= C2 t^2 |grad p| with C2 fitted",
      r.taylor_violations == 0, {{"violations", r.taylor_violations}, {"C2", r.c2},
                                 {"C2_observed", r.c2_observed}});
  add("group_law", "flow group law and reversibility within 1e-7",
      r.max_group_defect <= kGroupTolerance && r.max_reversibility_defect <= kGroupTolerance,
      {{"group_defect", r.max_group_defect},
       {"reversibility_defect", r.max_reversibility_defect}});
  add("symplectic_volume", "Jacobian determinant of the flow within 1e-4 of 1",
      r.max_jacobian_defect <= kJacobianTolerance,
      {{"jacobian_defect", r.max_jacobian_defect}, {"energy_drift", r.max_energy_drift}});

  std::string csv = "quantity,value\n";
  auto row = [&](const std::string& k, double x) { csv += k + ',' + csv_number(x) + '\n'; };
  row("h", h);
  row("t0", cfg.t0);
  row("samples", static_cast<double>(r.samples));
  row("gradient_floor", r.gradient_floor);
  row("lower_violations", static_cast<double>(r.lower_violations));
  row("upper_violations", static_cast<double>(r.upper_violations));
  row("taylor_violations", static_cast<double>(r.taylor_violations));
  row("C1", r.c1);
  row("C2", r.c2);
  row("C1_observed", r.c1_observed);
  row("C2_observed", r.c2_observed);
  row("min_lower_ratio", r.min_lower_ratio);
  row("t0_empirical", r.t0_empirical);
  row("max_energy_drift", r.max_energy_drift);
  row("max_group_defect", r.max_group_defect);
  row("max_reversibility_defect", r.max_reversibility_defect);
  row("max_jacobian_defect", r.max_jacobian_defect);
  row("max_symbol_gradient_gap", r.max_symbol_gradient_gap);
  out.files.push_back({"flow_bounds.csv", csv});
  return out;
}

std::string decay_csv(const DecayReport& r) {
  std::string csv = "h,t,|J|,slope_so_far\n";
  for (const auto& s : r.samples)
    csv += csv_number(s.h) + ',' + csv_number(s.t) + ',' + csv_number(s.modulus) + ',' +
           csv_number(s.slope_so_far) + '\n';
  return csv;
}

Json decay_json(const DecayReport& r) {
  Json rows = Json::array();
  for (const auto& s : r.samples)
    rows.push_back({{"h", s.h}, {"t", s.t}, {"modulus", s.modulus},
                    {"quadrature_error", s.quadrature_error}, {"used", s.used}});
  return {{"slope", r.fit.slope},
          {"n_points", r.fit.n_points},
          {"kappa", r.kappa},
          {"orders_passed", r.orders_passed},
          {"decays", r.decays},
          {"excluded", r.excluded},
          {"samples", std::move(rows)}};
}

ExperimentOutput oscillatory_decay(const ExperimentConfig& cfg) {
  const auto bm = resolve_model(cfg);
  const auto& model = bm.model;
  const int n = model.phase_dimension();
  const auto hs = resolve_h_grid(cfg);
  const double kappa = decay_kappa(kDecayMu, cfg.delta0);
  ExperimentOutput out;
  auto& v = out.verdict;

  PhaseVector off = PhaseVector::Zero(n);
  off[0] = bm.box.x_extent / 3.0;
  const double off_radius = 0.3;
  const auto off_amp = [&](double) { return bump_amplitude(off, off_radius); };
  const auto ro = nonstationary_decay_check(model, off_amp, kDecayMu, cfg.delta0, kDecayOrders, hs);
  {
    auto c = criterion_from_samples("off_critical_decay",
                                    "amplitude away from critical points decays with slope >= n kappa for n <= 3",
                                    hs, {}, std::nullopt, ro.decays);
    if (!ro.decays) c.witness_h = hs.back();
    c.details = decay_json(ro);
    c.details["center"] = std::vector<double>(off.data(), off.data() + n);
    c.details["radius"] = off_radius;
    v.criteria.push_back(std::move(c));
  }

  CriticalSearchOptions search;
  search.seeds = 2000;
  const auto crit = find_critical_points(model, bm.box, 0.0, 1e12, search);
  if (crit.empty()) {
    CriterionResult c;
    c.id = "critical_control";
    c.description = "no critical point found for the control amplitude";
    c.status = Status::partial;
    v.criteria.push_back(std::move(c));
  } else {
    const PhaseVector center = crit.front().location;
    const auto ctrl = [&](double) { return bump_amplitude(center, 0.5); };
    const auto rc = nonstationary_decay_check(model, ctrl, kDecayMu, cfg.delta0, kDecayOrders, hs);
    const bool no_decay = rc.orders_passed == 0;
    auto c = criterion_from_samples("critical_control",
                                    "amplitude containing a critical point shows no decay at rate kappa",
                                    hs, {}, std::nullopt, no_decay);
    if (!no_decay) c.witness_h = hs.back();
    c.details = decay_json(rc);
    c.details["center"] = std::vector<double>(center.data(), center.data() + n);
    v.criteria.push_back(std::move(c));
    out.files.push_back({"decay_control.csv", decay_csv(rc)});

    const auto hole = [&](double h) {
      return remove_critical_region(model, bump_amplitude(center, 0.5), std::pow(h, cfg.delta0));
    };
    const auto rh = nonstationary_decay_check(model, hole, kDecayMu, cfg.delta0, kDecayOrders, hs);
    v.tables["critical_region_removed"] = decay_json(rh);
    out.files.push_back({"decay_critical_removed.csv", decay_csv(rh)});
  }
  v.tables["mu"] = kDecayMu;
  v.tables["kappa"] = kappa;
  out.files.insert(out.files.begin(), {"decay_off_critical.csv", decay_csv(ro)});
  return out;
}

ExperimentOutput smoothed_counting(const ExperimentConfig& cfg) {
  const auto bm = resolve_model(cfg);
  const double e1 = cfg.energy - cfg.window, e2 = cfg.energy + cfg.window;
  const auto hs = resolve_h_grid(cfg);
  ExperimentOutput out;
  auto& v = out.verdict;
  std::string csv =
      "h,sharp,smoothed,difference,edge_count,edge_halfwidth,unit_mass,min_gamma_tilde,C_N,tail_slope\n";
  bool positive = true, mass_ok = true, gap_ok = true;
  std::optional<double> w_pos, w_mass, w_gap;
  Json rows = Json::array();
  constexpr int kDecayOrder = 4;
  for (double h : hs) {
    const MollifiedCounter counter(cfg.t0, h, e1, e2);
    double min_gamma = std::numeric_limits<double>::infinity();
    const int samples = 4001;
    for (int i = 0; i < samples; ++i) {
      const double lambda = e1 - 1.0 + (e2 - e1 + 2.0) * i / (samples - 1);
      min_gamma = std::min(min_gamma, counter.gamma_tilde(lambda));
    }
    const double margin = counter.edge_halfwidth(1e-12) + 10.0 * h;
    auto grid = confining_grid(bm.model, h, e2 + margin, cfg.confinement_gap, cfg.stencil_order);
    const auto op = assemble(bm.model, nullptr, h, cfg.delta0, grid, OperatorVariant::raw);
    const auto slice = eigenvalues_below(op, e2, margin);
    const auto gap = sharp_vs_smoothed_gap(slice, counter, kDecayOrder);
    const double diff = std::abs(gap.smoothed - gap.sharp);
    const double mass = counter.unit_mass();
    if (!(min_gamma >= 0.0)) positive = false, w_pos = w_pos.value_or(h);
    if (!(std::abs(mass - 1.0) <= 1e-8)) mass_ok = false, w_mass = w_mass.value_or(h);
    if (!(diff <= static_cast<double>(gap.edge_count))) gap_ok = false, w_gap = w_gap.value_or(h);
    csv += csv_number(h) + ',' + csv_number(gap.sharp) + ',' + csv_number(gap.smoothed) + ',' +
           csv_number(diff) + ',' + std::to_string(gap.edge_count) + ',' +
           csv_number(gap.edge_halfwidth) + ',' + csv_number(mass) + ',' +
           csv_number(min_gamma) + ',' + csv_number(gap.constant) + ',' +
           csv_number(gap.tail_fit.slope) + '\n';
    rows.push_back({{"h", h}, {"eigenvalues", gap.eigenvalues}, {"sharp", gap.sharp},
                    {"smoothed", gap.smoothed}, {"edge_count", gap.edge_count},
                    {"edge_halfwidth", gap.edge_halfwidth}, {"unit_mass", mass},
                    {"min_gamma_tilde", min_gamma}, {"C_N", gap.constant},
                    {"violations", gap.violations}, {"tail_slope", gap.tail_fit.slope},
                    {"spectrum_method", slice.method}, {"unknowns", grid.unknowns()}});
  }
  v.criteria.push_back(criterion_from_samples("gamma_tilde_nonnegative",
                                              "smoothed density nonnegative at all samples", hs,
                                              {}, w_pos, positive));
  v.criteria.push_back(criterion_from_samples("unit_mass", "smoothed density has unit mass within 1e-8",
                                              hs, {}, w_mass, mass_ok));
  v.criteria.push_back(criterion_from_samples(
      "edge_bound", "|smoothed - sharp| <= number of eigenvalues in the O(h) edge zones", hs, {},
      w_gap, gap_ok));
  v.tables["interval"] = {e1, e2};
  v.tables["t0"] = cfg.t0;
  v.tables["decay_order"] = kDecayOrder;
  v.tables["rows"] = std::move(rows);
  out.files.push_back({"smoothed_counting.csv", csv});
  return out;
}

}  // namespace

std::string ExperimentOutput::verdict_text() const { return verdict.to_json().dump(2) + "\n"; }

ExperimentOutput run_experiment(const std::string& name, const ExperimentConfig& config) {
  if (!is_experiment(name)) {
    std::string list;
    for (const auto& e : experiment_names()) list += (list.empty() ? "" : ", ") + e;
    throw Error(ErrorCode::unknown_experiment,
                "unknown experiment '" + name + "'; registered experiments: " + list);
  }
  const auto issues = validate_config(config, name);
  if (!issues.empty()) {
    std::string msg = "invalid configuration for " + name + ":";
    for (const auto& s : issues) msg += "\n  " + s;
    throw Error(ErrorCode::config, msg);
  }
  ExperimentOutput out;
  if (name == "weyl_sweep") out = weyl_sweep(config);
  else if (name == "critical_sweep") out = critical_sweep(config);
  else if (name == "mollifier_rates") out = mollifier_rates(config);
  else if (name == "sublevel_lemma") out = sublevel_lemma(config);
  else if (name == "flow_bounds") out = flow_bounds(config);
  else if (name == "oscillatory_decay") out = oscillatory_decay(config);
  else out = smoothed_counting(config);
  out.verdict.experiment = name;
  out.verdict.config = config_json(config);
  return out;
}

void write_outputs(const ExperimentOutput& output, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  };
  for (const auto& f : output.files) write(f.name, f.content);
  write("verdict.json", output.verdict_text());
}

}  // namespace weylab
