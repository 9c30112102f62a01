// SPDX-License-Identifier: Apache-2.0
#include "core/harness.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "core/error.hpp"
#include "core/mollify.hpp"

namespace weylab {

std::vector<double> geometric_h_grid(double h_max, double ratio, int count) {
  if (!(h_max > 0.0) || !(ratio > 1.0) || count < 0)
    throw Error(ErrorCode::invalid_argument, "h grid needs h_max > 0, ratio > 1, count >= 0");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(h_max * std::pow(ratio, -i));
  return out;
}

std::vector<double> log_spaced_grid(double h_max, double h_min, int count) {
  if (!(h_max > 0.0) || !(h_min > 0.0) || h_min > h_max || count < 1)
    throw Error(ErrorCode::invalid_argument, "h grid needs 0 < h_min <= h_max and count >= 1");
  if (count == 1) return {h_max};
  std::vector<double> out;
  const double a = std::log(h_max), b = std::log(h_min);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(a + (b - a) * i / (count - 1)));
  out.front() = h_max;
  out.back() = h_min;
  return out;
}

std::vector<double> SweepResult::completed_h() const {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.ok) out.push_back(r.h);
  return out;
}

std::vector<double> SweepResult::missing_h() const {
  std::vector<double> out;
  for (const auto& r : records)
    if (!r.ok) out.push_back(r.h);
  return out;
}

namespace {

std::string describe_fault(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e))
    return std::string(error_code_name(err->code())) + ": " + err->what();
  return std::string("exception: ") + e.what();
}

long long as_count(const SpectrumSlice& s) { return static_cast<long long>(s.count); }

}  // namespace

SweepResult run_h_sweep(const SymbolModel& model, const PhaseBox& box,
                        const SweepSettings& settings) {
  SweepResult out;
  out.model = model.name();
  out.dimension = model.dimension();
  out.settings = settings;
  const int d = model.dimension();
  const double energy = settings.energy;

  CriticalSearchOptions search;
  search.seeds = settings.critical_seeds;
  out.hypotheses = check_theorem_hypotheses(model, box, energy, settings.window, search);
  out.in_theorem_scope = out.hypotheses.theorem_applicable;
  out.scope_note = out.in_theorem_scope ? "within theorem scope: " + out.hypotheses.verdict
                                        : "sanity, outside theorem scope: " +
                                              out.hypotheses.verdict;

  std::string weyl_fault;
  try {
    VolumeOptions vo;
    vo.budget = settings.weyl_budget;
    vo.seed = settings.seed;
    out.weyl_volume = weyl_volume(model, box, energy, vo);
  } catch (const std::exception& e) {
    weyl_fault = "weyl volume " + describe_fault(e);
  }

  std::shared_ptr<const MollifierKernel> kernel;
  if (settings.bracket || settings.variant != OperatorVariant::raw) kernel = build_mollifier(d, 1.0);

  for (double h : settings.h_grid) {
    SweepRecord rec;
    rec.h = h;
    rec.energy = energy;
    try {
      if (!weyl_fault.empty()) throw Error(ErrorCode::incomplete, weyl_fault);
      OperatorGrid grid =
          confining_grid(model, h, energy, settings.confinement_gap, settings.stencil_order);
      if (settings.grid_points > 0)
        for (int k = 0; k < d; ++k) grid.points[k] = settings.grid_points;
      rec.unknowns = grid.unknowns();
      if (settings.bracket) {
        const auto ops = assemble_bracket(model, kernel, h, settings.delta0, grid);
        const auto raw = count_below(ops[0], energy);
        rec.count_raw = as_count(raw);
        rec.count_plus = as_count(count_below(ops[1], energy));
        rec.count_minus = as_count(count_below(ops[2], energy));
        rec.count_method = raw.method;
        rec.count = settings.variant == OperatorVariant::raw    ? as_count(raw)
                    : settings.variant == OperatorVariant::plus ? rec.count_plus
                                                                : rec.count_minus;
      } else {
        const auto op = assemble(model, kernel, h, settings.delta0, grid, settings.variant);
        const auto slice = count_below(op, energy);
        rec.count = as_count(slice);
        if (settings.variant == OperatorVariant::raw) rec.count_raw = rec.count;
        rec.count_method = slice.method;
      }
      const double scale = std::pow(2.0 * std::numbers::pi * h, -d);
      rec.weyl = scale * out.weyl_volume.value;
      rec.weyl_error = scale * out.weyl_volume.std_error;
      rec.remainder = static_cast<double>(rec.count) - rec.weyl;

      VolumeOptions so;
      so.budget = settings.shell_budget;
      so.seed = settings.seed;
      const auto rf = remainder_functional(model, box, energy, settings.epsilon, h, so);
      rec.r_value = rf.value;
      rec.r_error = rf.std_error;
      rec.shells = rf.shells;
      rec.ratio = std::abs(rec.remainder) * std::pow(h, d) / rec.r_value;
      for (double eps : settings.extra_epsilons) {
        const auto extra = remainder_functional(model, box, energy, eps, h, so);
        rec.extra_r.push_back(extra.value);
        rec.extra_ratio.push_back(std::abs(rec.remainder) * std::pow(h, d) / extra.value);
      }
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.fault = describe_fault(e);
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Slope and intercept from the exact normal equations on the given doubles.
std::pair<double, double> exact_normal_equations(const std::vector<double>& x,
                                                 const std::vector<double>& y) {
  Rational sx = 0, sy = 0, sxx = 0, sxy = 0;
  const Rational n = static_cast<long long>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Rational xi(x[i]), yi(y[i]);
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
  }
  const Rational det = n * sxx - sx * sx;
  if (det == 0) throw Error(ErrorCode::degenerate, "fit: abscissae have zero variance");
  const Rational slope = (n * sxy - sx * sy) / det;
  const Rational intercept = (sy - slope * sx) / n;
  return {static_cast<double>(slope), static_cast<double>(intercept)};
}

}  // namespace

ExponentFit fit_exponent(const std::vector<double>& h, const std::vector<double>& values,
                         const std::string& name) {
  if (h.size() != values.size())
    throw Error(ErrorCode::dimension_mismatch, "fit_exponent: length mismatch");
  ExponentFit fit;
  fit.quantity = name;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]) || !(h[i] > 0.0)) {
      fit.excluded_h.push_back(h[i]);
      continue;
    }
    fit.h.push_back(h[i]);
    fit.values.push_back(values[i]);
    lx.push_back(std::log(h[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 4)
    throw Error(ErrorCode::incomplete, "fit_exponent(" + name + "): " +
                                           std::to_string(lx.size()) +
                                           " usable points, at least 4 required");
  const LinearFit ols = least_squares(lx, ly);
  const auto [slope, intercept] = exact_normal_equations(lx, ly);
  fit.slope = slope;
  fit.intercept = intercept;
  fit.slope_stderr = ols.slope_stderr;
  fit.ci_half_width = ols.ci_half_width;
  fit.n_points = static_cast<int>(lx.size());
  return fit;
}

ExponentFit fit_exponent(const std::vector<SweepRecord>& records, const std::string& name,
                         const RecordQuantity& quantity) {
  std::vector<double> h, v;
  for (const auto& r : records) {
    if (!r.ok) continue;
    h.push_back(r.h);
    v.push_back(quantity(r));
  }
  return fit_exponent(h, v, name);
}

ExponentFit fit_log_corrected(const std::vector<SweepRecord>& records, const std::string& name,
                              const RecordQuantity& quantity) {
  return fit_exponent(records, name + " / log(1/h)", [&](const SweepRecord& r) {
    return r.h < 1.0 ? quantity(r) / std::log(1.0 / r.h) : 0.0;
  });
}

const char* status_name(Status s) {
  switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::partial: return "PARTIAL";
  }
  return "FAIL";
}

Status VerdictDocument::overall() const {
  if (criteria.empty()) return Status::partial;
  bool partial = false;
  for (const auto& c : criteria) {
    if (c.status == Status::fail) return Status::fail;
    if (c.status == Status::partial) partial = true;
  }
  return partial ? Status::partial : Status::pass;
}

namespace {

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json number_list(const std::vector<double>& v) {
  auto out = nlohmann::ordered_json::array();
  for (double x : v) out.push_back(number_or_null(x));
  return out;
}

}  // namespace

nlohmann::ordered_json VerdictDocument::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kVerdictSchemaVersion;
  j["experiment"] = experiment;
  j["status"] = status_name(overall());
  j["exit_status"] = exit_status(*this);
  j["scope_statement"] = kFiniteScopeStatement;
  auto list = nlohmann::ordered_json::array();
  for (const auto& c : criteria) {
    nlohmann::ordered_json e;
    e["id"] = c.id;
    e["description"] = c.description;
    e["status"] = status_name(c.status);
    e["witness_h"] = c.witness_h ? nlohmann::ordered_json(*c.witness_h) : nlohmann::ordered_json(nullptr);
    e["covered_h"] = number_list(c.covered_h);
    e["missing_h"] = number_list(c.missing_h);
    e["details"] = c.details;
    list.push_back(std::move(e));
  }
  j["criteria"] = std::move(list);
  j["config"] = config;
  j["tables"] = tables;
  return j;
}

CriterionResult criterion_from_samples(std::string id, std::string description,
                                       const std::vector<double>& covered,
                                       const std::vector<double>& missing,
                                       std::optional<double> witness, bool passed) {
  CriterionResult c;
  c.id = std::move(id);
  c.description = std::move(description);
  c.covered_h = covered;
  c.missing_h = missing;
  c.witness_h = witness;
  if (!passed) c.status = Status::fail;
  else if (!missing.empty() || covered.empty()) c.status = Status::partial;
  else c.status = Status::pass;
  return c;
}

int exit_status(const VerdictDocument& doc) { return doc.overall() == Status::pass ? 0 : 1; }

nlohmann::ordered_json fit_to_json(const ExponentFit& fit) {
  nlohmann::ordered_json j;
  j["quantity"] = fit.quantity;
  j["slope"] = number_or_null(fit.slope);
  j["intercept"] = number_or_null(fit.intercept);
  j["ci_half_width"] = number_or_null(fit.ci_half_width);
  j["slope_stderr"] = number_or_null(fit.slope_stderr);
  j["n_points"] = fit.n_points;
  j["h"] = number_list(fit.h);
  j["values"] = number_list(fit.values);
  j["excluded_h"] = number_list(fit.excluded_h);
  return j;
}

nlohmann::ordered_json sweep_to_json(const SweepResult& sweep) {
  nlohmann::ordered_json j;
  j["model"] = sweep.model;
  j["dimension"] = sweep.dimension;
  j["energy"] = sweep.settings.energy;
  j["epsilon"] = sweep.settings.epsilon;
  j["extra_epsilons"] = number_list(sweep.settings.extra_epsilons);
  j["seed"] = sweep.settings.seed;
  j["stencil_order"] = sweep.settings.stencil_order;
  j["in_theorem_scope"] = sweep.in_theorem_scope;
  j["scope_note"] = sweep.scope_note;
  nlohmann::ordered_json hyp;
  hyp["verdict"] = sweep.hypotheses.verdict;
  hyp["confinement_ok"] = sweep.hypotheses.confinement_ok;
  hyp["boundary_minimum"] = sweep.hypotheses.boundary_minimum;
  hyp["dimension_ok"] = sweep.hypotheses.dimension_ok;
  hyp["rank_ok"] = sweep.hypotheses.rank_ok;
  hyp["rank_vacuous"] = sweep.hypotheses.rank_vacuous;
  hyp["critical_points"] = sweep.hypotheses.points.size();
  auto pts = nlohmann::ordered_json::array();
  for (const auto& p : sweep.hypotheses.points) {
    nlohmann::ordered_json e;
    e["location"] = std::vector<double>(p.location.data(), p.location.data() + p.location.size());
    e["energy"] = p.energy;
    e["hessian_rank"] = p.hessian_rank;
    pts.push_back(std::move(e));
  }
  hyp["points"] = std::move(pts);
  hyp["coverage_caveat"] = sweep.hypotheses.coverage_caveat;
  j["hypotheses"] = std::move(hyp);
  j["c_E"] = sweep.weyl_volume.value;
  j["c_E_std_error"] = sweep.weyl_volume.std_error;
  j["c_E_method"] = volume_method_name(sweep.weyl_volume.method);
  j["c_E_samples"] = sweep.weyl_volume.sample_count;
  j["h_grid"] = number_list(sweep.settings.h_grid);
  j["completed_h"] = number_list(sweep.completed_h());
  j["missing_h"] = number_list(sweep.missing_h());
  auto faults = nlohmann::ordered_json::array();
  for (const auto& r : sweep.records)
    if (!r.ok) faults.push_back({{"h", r.h}, {"fault", r.fault}});
  j["faults"] = std::move(faults);
  return j;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string csv_count(long long v) { return v < 0 ? "" : std::to_string(v); }

std::string csv_text(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "h,E,N,N_raw,N_plus,N_minus,unknowns,weyl,weyl_std_error,remainder,R_value,R_std_error,ratio";
  for (double eps : sweep.settings.extra_epsilons)
    os << ",R_value_eps" << csv_number(eps) << ",ratio_eps" << csv_number(eps);
  os << ",status\n";
  for (const auto& r : sweep.records) {
    os << csv_number(r.h) << ',' << csv_number(r.energy) << ',';
    if (r.ok) {
      os << r.count << ',' << csv_count(r.count_raw) << ',' << csv_count(r.count_plus) << ',' << csv_count(r.count_minus) << ','
         << r.unknowns << ',' << csv_number(r.weyl) << ',' << csv_number(r.weyl_error) << ','
         << csv_number(r.remainder) << ',' << csv_number(r.r_value) << ','
         << csv_number(r.r_error) << ',' << csv_number(r.ratio);
      for (std::size_t i = 0; i < r.extra_r.size(); ++i)
        os << ',' << csv_number(r.extra_r[i]) << ',' << csv_number(r.extra_ratio[i]);
      os << ",ok\n";
    } else {
      os << ",,,,,,,,,,";
      for (std::size_t i = 0; i < sweep.settings.extra_epsilons.size(); ++i) os << ",,";
      os << ',' << csv_text(r.fault) << '\n';
    }
  }
  return os.str();
}

std::string volume_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "quantity,E,E',h,value,std_error,samples,seed\n";
  const auto& w = sweep.weyl_volume;
  const double e = sweep.settings.energy;
  os << "c_E," << csv_number(e) << ',' << csv_number(e) << ",," << csv_number(w.value) << ','
     << csv_number(w.std_error) << ',' << w.sample_count << ',' << w.seed << '\n';
  for (const auto& r : sweep.records) {
    if (!r.ok) continue;
    for (const auto& s : r.shells)
      os << "shell," << csv_number(e) << ',' << csv_number(s.energy) << ',' << csv_number(r.h)
         << ',' << csv_number(s.volume.value) << ',' << csv_number(s.volume.std_error) << ','
         << s.volume.sample_count << ',' << s.volume.seed << '\n';
    os << "remainder_functional," << csv_number(e) << ',' << csv_number(e) << ','
       << csv_number(r.h) << ',' << csv_number(r.r_value) << ',' << csv_number(r.r_error) << ','
       << r.shells.size() << ',' << sweep.settings.seed << '\n';
  }
  return os.str();
}

}  // namespace weylab
