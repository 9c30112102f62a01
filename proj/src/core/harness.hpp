// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/fit.hpp"
#include "core/operator.hpp"
#include "core/phasevol.hpp"
#include "core/symbols.hpp"

namespace weylab {

// h_max, h_max / ratio, ... with count points.
std::vector<double> geometric_h_grid(double h_max, double ratio, int count);
// count points from h_max down to h_min, equally spaced in log h.
std::vector<double> log_spaced_grid(double h_max, double h_min, int count);

struct SweepSettings {
  double energy = 1.0;
  double epsilon = 0.1;
  std::vector<double> extra_epsilons{0.05};
  double delta0 = 0.45;
  double window = 0.5;             // energy window for the critical point search
  std::vector<double> h_grid;
  std::uint64_t seed = 1;
  int stencil_order = 4;
  double confinement_gap = 2.0;
  bool bracket = true;             // also count the plus and minus variants
  OperatorVariant variant = OperatorVariant::raw;
  int grid_points = 0;             // nonzero fixes the points per axis instead of the h rule
  std::size_t weyl_budget = std::size_t{1} << 24;
  std::size_t shell_budget = std::size_t{1} << 18;
  std::size_t critical_seeds = 4000;
};

struct SweepRecord {
  double h = 0.0;
  double energy = 0.0;
  bool ok = false;
  std::string fault;               // error code and message when the sample aborted
  long long count = 0;             // N for the configured variant
  long long count_raw = -1;        // -1 when not computed
  long long count_plus = -1;       // -1 when not computed
  long long count_minus = -1;
  std::size_t unknowns = 0;
  std::string count_method;
  double weyl = 0.0;               // (2 pi h)^-d c_E
  double weyl_error = 0.0;
  double remainder = 0.0;          // N - weyl
  double r_value = 0.0;            // R at the primary epsilon
  double r_error = 0.0;
  double ratio = 0.0;              // |remainder| h^d / R
  std::vector<double> extra_r;     // R at the extra epsilons
  std::vector<double> extra_ratio;
  std::vector<ShellSample> shells; // primary-epsilon shell grid
};

struct SweepResult {
  std::string model;
  int dimension = 0;
  SweepSettings settings;
  HypothesisReport hypotheses;
  bool in_theorem_scope = false;
  std::string scope_note;
  VolumeEstimate weyl_volume;      // c_E, shared by every h
  std::vector<SweepRecord> records;

  std::vector<double> completed_h() const;
  std::vector<double> missing_h() const;
};

// Per-h faults are recorded in the record and never abort the sweep.
SweepResult run_h_sweep(const SymbolModel& model, const PhaseBox& box,
                        const SweepSettings& settings);

struct ExponentFit {
  std::string quantity;
  std::vector<double> h;
  std::vector<double> values;
  std::vector<double> excluded_h;  // nonpositive quantity
  double slope = 0.0;
  double intercept = 0.0;
  double ci_half_width = 0.0;
  double slope_stderr = 0.0;
  int n_points = 0;
};

using RecordQuantity = std::function<double(const SweepRecord&)>;

// OLS of log quantity against log h over successful records; needs at least four usable points.
// The normal equations are solved in exact rational arithmetic.
ExponentFit fit_exponent(const std::vector<SweepRecord>& records, const std::string& name,
                         const RecordQuantity& quantity);
ExponentFit fit_exponent(const std::vector<double>& h, const std::vector<double>& values,
                         const std::string& name);

// Fit of quantity / log(1/h) against h.
ExponentFit fit_log_corrected(const std::vector<SweepRecord>& records, const std::string& name,
                              const RecordQuantity& quantity);

enum class Status { pass, fail, partial };
const char* status_name(Status s);

struct CriterionResult {
  std::string id;
  std::string description;
  Status status = Status::fail;
  std::optional<double> witness_h;     // first h at which the check failed
  std::vector<double> covered_h;
  std::vector<double> missing_h;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

inline constexpr int kVerdictSchemaVersion = 1;
inline constexpr const char* kFiniteScopeStatement =
    "Asymptotic statements concern h -> 0 and cannot be reproduced literally; the Weyl-law "
    "and critical-energy remainder checks are finite-h property surrogates over the sampled "
    "h range.";

struct VerdictDocument {
  std::string experiment;
  std::vector<CriterionResult> criteria;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json tables = nlohmann::ordered_json::object();

  Status overall() const;
  nlohmann::ordered_json to_json() const;
};

// Criterion from a predicate over completed h samples; PARTIAL when samples are missing.
CriterionResult criterion_from_samples(std::string id, std::string description,
                                       const std::vector<double>& covered,
                                       const std::vector<double>& missing,
                                       std::optional<double> witness, bool passed);

// 0 when every criterion passes, 1 otherwise.
int exit_status(const VerdictDocument& doc);

nlohmann::ordered_json sweep_to_json(const SweepResult& sweep);
nlohmann::ordered_json fit_to_json(const ExponentFit& fit);

// CSV helpers with fixed formatting, so identical inputs give identical bytes.
std::string csv_number(double v);
std::string sweep_csv(const SweepResult& sweep);
// Rows (quantity, E, E', h, value, std_error, samples, seed).
std::string volume_csv(const SweepResult& sweep);

}  // namespace weylab
