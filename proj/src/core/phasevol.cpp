// SPDX-License-Identifier: Apache-2.0
#include "core/phasevol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <unordered_map>

#include "core/error.hpp"
#include "core/polysub.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"

namespace weylab {

const char* volume_method_name(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::monte_carlo: return "monte_carlo";
    case VolumeMethod::tensor_grid: return "tensor_grid";
    case VolumeMethod::exact_1d: return "exact_1d";
  }
  return "unknown";
}

namespace {

constexpr int kMaxPhase = 2 * kMaxDim;

struct Cell {
  std::array<double, kMaxPhase> lo{};
  int level = 0;
};

// Adaptive cover of a phase-space region by axis-aligned cells of the box.
class CellCover {
 public:
  using Predicate = std::function<bool(const PhaseVector& center, double radius,
                                       const SymbolDerivatives& d)>;

  CellCover(const SymbolModel& model, const PhaseBox& box, const Predicate& keep, int base,
            double target_width, std::size_t max_cells = 8000000)
      : box_(box), n_(2 * box.dimension), base_(base) {
    std::vector<Cell> current;
    std::size_t total = 1;
    for (int k = 0; k < n_; ++k) total *= static_cast<std::size_t>(base);
    for (std::size_t flat = 0; flat < total; ++flat) {
      Cell c;
      std::size_t r = flat;
      for (int k = 0; k < n_; ++k) {
        c.lo[k] = box.lower(k) + box.width(k) / base * static_cast<double>(r % base);
        r /= base;
      }
      current.push_back(c);
    }
    int level = 0;
    while (!current.empty()) {
      std::vector<Cell> next;
      const bool last = max_width(level) <= target_width;
      for (const auto& c : current) {
        PhaseVector center(n_);
        double r2 = 0.0;
        for (int k = 0; k < n_; ++k) {
          const double w = width(k, c.level);
          center[k] = c.lo[k] + 0.5 * w;
          r2 += 0.25 * w * w;
        }
        SymbolDerivatives d;
        try {
          d = model.derivatives(center);
        } catch (const Error&) {
          cells_.push_back(c);  // keep cells where evaluation is unavailable
          continue;
        }
        if (!keep(center, std::sqrt(r2), d)) continue;
        if (last || next.size() >= max_cells) {
          cells_.push_back(c);
          continue;
        }
        for (int child = 0; child < (1 << n_); ++child) {
          Cell s;
          s.level = c.level + 1;
          for (int k = 0; k < n_; ++k) {
            s.lo[k] = c.lo[k] + ((child >> k) & 1) * width(k, s.level);
          }
          next.push_back(s);
        }
      }
      current = std::move(next);
      ++level;
    }
    cumulative_.reserve(cells_.size());
    double acc = 0.0;
    for (const auto& c : cells_) {
      acc += cell_volume(c.level);
      cumulative_.push_back(acc);
    }
    volume_ = acc;
  }

  double width(int k, int level) const { return box_.width(k) / (base_ * std::ldexp(1.0, level)); }
  double max_width(int level) const {
    double w = 0.0;
    for (int k = 0; k < n_; ++k) w = std::max(w, width(k, level));
    return w;
  }
  double cell_volume(int level) const {
    double v = 1.0;
    for (int k = 0; k < n_; ++k) v *= width(k, level);
    return v;
  }
  std::size_t size() const { return cells_.size(); }
  double volume() const { return volume_; }
  const std::vector<Cell>& cells() const { return cells_; }

  // Uniform point in the union of cells from n_+1 unit draws.
  PhaseVector draw(CounterStream& rng) const {
    const double u = rng.uniform() * volume_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t idx = std::min<std::size_t>(it - cumulative_.begin(), cells_.size() - 1);
    const Cell& c = cells_[idx];
    PhaseVector v(n_);
    for (int k = 0; k < n_; ++k) v[k] = c.lo[k] + width(k, c.level) * rng.uniform();
    return v;
  }

  bool contains(const PhaseVector& v) const {
    // Linear scan is avoided by a per-level hash.
    if (index_.empty()) build_index();
    for (const auto& [level, map] : index_) {
      std::uint64_t key = 0;
      bool inside = true;
      for (int k = 0; k < n_; ++k) {
        const double q = std::floor((v[k] - box_.lower(k)) / width(k, level));
        if (q < 0) inside = false;
        key = key * 1000003ULL + static_cast<std::uint64_t>(std::max(0.0, q));
      }
      if (inside && map.count(key)) return true;
    }
    return false;
  }

 private:
  void build_index() const {
    for (const auto& c : cells_) {
      std::uint64_t key = 0;
      for (int k = 0; k < n_; ++k) {
        const double q = std::round((c.lo[k] - box_.lower(k)) / width(k, c.level));
        key = key * 1000003ULL + static_cast<std::uint64_t>(q);
      }
      index_[c.level].emplace(key, 1);
    }
  }

  PhaseBox box_;
  int n_;
  int base_;
  std::vector<Cell> cells_;
  std::vector<double> cumulative_;
  double volume_ = 0.0;
  mutable std::unordered_map<int, std::unordered_map<std::uint64_t, char>> index_;
};

double curvature_bound(const SymbolDerivatives& d) { return 2.0 * d.hessian.norm() + 1.0; }

bool near_boundary(const PhaseBox& box, const PhaseVector& v, double margin) {
  for (int k = 0; k < v.size(); ++k) {
    const double m = margin * box.width(k);
    if (v[k] < box.lower(k) + m || v[k] > box.upper(k) - m) return true;
  }
  return false;
}

[[noreturn]] void containment_fault(const PhaseVector& v, double energy) {
  std::string where;
  char buf[32];
  for (int k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s%.4g", k ? ", " : "", v[k]);
    where += buf;
  }
  std::snprintf(buf, sizeof buf, "%.6g", energy);
  throw Error(ErrorCode::containment,
              "sublevel set at energy " + std::string(buf) +
                  " reaches within the containment margin of the phase box at (" + where +
                  "); enlarge the box");
}

VolumeEstimate batch_estimate(const std::vector<double>& sums, const std::vector<std::size_t>& counts,
                              double scale) {
  const std::size_t B = sums.size();
  std::vector<double> means(B);
  double mean = 0.0;
  std::size_t total = 0;
  for (std::size_t b = 0; b < B; ++b) {
    means[b] = counts[b] ? scale * sums[b] / static_cast<double>(counts[b]) : 0.0;
    mean += means[b];
    total += counts[b];
  }
  mean /= static_cast<double>(B);
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(B - 1);
  VolumeEstimate e;
  e.value = mean;
  e.std_error = std::sqrt(var / static_cast<double>(B));
  e.sample_count = total;
  e.method = VolumeMethod::monte_carlo;
  return e;
}

// Measure of {xi in [-X, X] : p(xi) < E} for a one-dimensional symbol at fixed x.
double inner_measure_1d(const std::vector<double>& c, double energy, double xi_extent,
                        double* max_abs_xi) {
  std::vector<double> p = c;
  p[0] -= energy;
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
  std::vector<double> cuts{-xi_extent, xi_extent};
  if (p.size() == 3) {
    const double a = p[2], b = p[1], cc = p[0];
    const double disc = b * b - 4.0 * a * cc;
    if (disc > 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
      const double r1 = q / a, r2 = cc / q;
      for (double r : {r1, r2}) {
        if (r > -xi_extent && r < xi_extent) cuts.push_back(r);
      }
    }
  } else if (p.size() >= 2) {
    for (double r : real_roots(p, -xi_extent, xi_extent)) cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= a) continue;
    if (poly_eval(p, 0.5 * (a + b)) < 0.0) {
      total += b - a;
      if (max_abs_xi) *max_abs_xi = std::max({*max_abs_xi, std::abs(a), std::abs(b)});
    }
  }
  return total;
}

VolumeEstimate weyl_volume_1d(const SymbolModel& model, const PhaseBox& box, double energy,
                              const VolumeOptions& options) {
  const double X = box.x_extent, Xi = box.xi_extent;
  auto inner = [&](double x, double* reach) {
    return inner_measure_1d(model.momentum_polynomial(x), energy, Xi, reach);
  };
  // Containment scan and turning-point bracketing.
  const int scan = 2001;
  std::vector<double> breaks{-X};
  bool prev = false;
  double reach = 0.0;
  for (int i = 0; i < scan; ++i) {
    const double x = -X + 2.0 * X * i / (scan - 1);
    double r = 0.0;
    const bool occupied = inner(x, &r) > 0.0;
    if (occupied) {
      reach = std::max(reach, r);
      if (std::abs(x) > X * (1.0 - 2.0 * options.containment_margin)) {
        PhaseVector v(2);
        v << x, 0.0;
        containment_fault(v, energy);
      }
    }
    if (i > 0 && occupied != prev) {
      double a = -X + 2.0 * X * (i - 1) / (scan - 1), b = x;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b);
        if ((inner(m, nullptr) > 0.0) == prev) a = m;
        else b = m;
      }
      breaks.push_back(0.5 * (a + b));
    }
    prev = occupied;
  }
  if (reach > Xi * (1.0 - 2.0 * options.containment_margin)) {
    PhaseVector v(2);
    v << 0.0, reach;
    containment_fault(v, energy);
  }
  breaks.push_back(X);
  VolumeEstimate e;
  e.method = VolumeMethod::tensor_grid;
  e.seed = options.seed;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] <= breaks[i]) continue;
    double err = 0.0;
    // Substitution x = a + (b-a) (1 - cos(pi t))/2 removes square-root endpoint behaviour.
    const double a = breaks[i], b = breaks[i + 1];
    e.value += integrate_adaptive(
        [&](double t) {
          const double x = a + (b - a) * 0.5 * (1.0 - std::cos(3.141592653589793 * t));
          const double jac = (b - a) * 0.5 * 3.141592653589793 * std::sin(3.141592653589793 * t);
          return inner(x, nullptr) * jac;
        },
        0.0, 1.0, 1e-11, &err);
    e.std_error += err;
    e.sample_count += 1;
  }
  return e;
}

}  // namespace

VolumeEstimate weyl_volume(const SymbolModel& model, const PhaseBox& box, double energy,
                           const VolumeOptions& options) {
  if (box.dimension != model.dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "phase box dimension differs from the model");
  }
  if (options.batches < 32) throw Error(ErrorCode::invalid_argument, "at least 32 batches are required");
  if (model.dimension() == 1) return weyl_volume_1d(model, box, energy, options);
  const int n = model.phase_dimension();
  const std::size_t per_batch = std::max<std::size_t>(1, options.budget / options.batches);
  // Jittered stratification: k^n strata per batch, one point each.
  int k = std::max(1, static_cast<int>(std::floor(std::pow(static_cast<double>(per_batch), 1.0 / n))));
  std::size_t strata = 1;
  for (int i = 0; i < n; ++i) strata *= static_cast<std::size_t>(k);
  std::vector<double> sums(options.batches, 0.0);
  std::vector<std::size_t> counts(options.batches, 0);
  PhaseVector v(n);
  for (int b = 0; b < options.batches; ++b) {
    for (std::size_t s = 0; s < strata; ++s) {
      std::size_t r = s;
      for (int i = 0; i < n; ++i) {
        const double u = unit_draw(options.seed, static_cast<std::uint64_t>(b), s * n + i);
        v[i] = box.lower(i) + box.width(i) * (static_cast<double>(r % k) + u) / k;
        r /= k;
      }
      if (model.value(v) < energy) {
        if (near_boundary(box, v, options.containment_margin)) containment_fault(v, energy);
        sums[b] += 1.0;
      }
      counts[b] += 1;
    }
  }
  VolumeEstimate e = batch_estimate(sums, counts, box.volume());
  e.seed = options.seed;
  return e;
}

ShellSampler::ShellSampler(const SymbolModel& model, const PhaseBox& box, double e_lo, double e_hi,
                           const VolumeOptions& options)
    : e_lo_(e_lo), e_hi_(e_hi), options_(options), batches_(options.batches) {
  if (!(e_hi >= e_lo)) throw Error(ErrorCode::invalid_argument, "empty energy band");
  if (options.batches < 32) throw Error(ErrorCode::invalid_argument, "at least 32 batches are required");
  const int n = model.phase_dimension();
  double max_width = 0.0;
  for (int k = 0; k < n; ++k) max_width = std::max(max_width, box.width(k));
  const double target = std::max(2.0 * (e_hi - e_lo), max_width / 64.0);
  CellCover cover(
      model, box,
      [&](const PhaseVector&, double r, const SymbolDerivatives& d) {
        const double gap = d.value < e_lo ? e_lo - d.value : (d.value > e_hi ? d.value - e_hi : 0.0);
        return gap <= d.gradient.norm() * r + 0.5 * curvature_bound(d) * r * r;
      },
      8, target);
  cell_count_ = cover.size();
  cover_volume_ = cover.volume();
  const double box_volume = box.volume();
  const double mix = cover.size() > 0 ? 0.8 : 0.0;
  const std::size_t total = options.budget;
  energies_.reserve(total);
  weights_.reserve(total);
  batch_.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const int b = static_cast<int>(i % static_cast<std::size_t>(batches_));
    CounterStream rng(options.seed, 0x5e11ULL + i);
    PhaseVector v(n);
    if (rng.uniform() < mix) {
      v = cover.draw(rng);
    } else {
      for (int k = 0; k < n; ++k) v[k] = box.lower(k) + box.width(k) * rng.uniform();
    }
    const double q = (1.0 - mix) / box_volume + (mix > 0.0 && cover.contains(v) ? mix / cover_volume_ : 0.0);
    const double a = model.value(v);
    if (a >= e_lo && a <= e_hi && near_boundary(box, v, options.containment_margin)) {
      containment_fault(v, a);
    }
    energies_.push_back(a);
    weights_.push_back(1.0 / q);
    batch_.push_back(b);
  }
}

VolumeEstimate ShellSampler::estimate(double e_prime, double width) const {
  if (e_prime - width < e_lo_ - 1e-12 || e_prime + width > e_hi_ + 1e-12) {
    throw Error(ErrorCode::invalid_argument, "shell lies outside the sampler's energy band");
  }
  std::vector<double> sums(batches_, 0.0);
  std::vector<std::size_t> counts(batches_, 0);
  for (std::size_t i = 0; i < energies_.size(); ++i) {
    counts[batch_[i]] += 1;
    if (std::abs(energies_[i] - e_prime) <= width) sums[batch_[i]] += weights_[i];
  }
  VolumeEstimate e = batch_estimate(sums, counts, 1.0);
  e.seed = options_.seed;
  return e;
}

VolumeEstimate shell_volume(const SymbolModel& model, const PhaseBox& box, double e_prime, double h,
                            const VolumeOptions& options) {
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "shell width must be > 0");
  if (model.dimension() == 1) {
    const VolumeEstimate hi = weyl_volume(model, box, e_prime + h, options);
    const VolumeEstimate lo = weyl_volume(model, box, e_prime - h, options);
    VolumeEstimate e = hi;
    e.value = std::max(0.0, hi.value - lo.value);
    e.std_error = hi.std_error + lo.std_error;
    e.sample_count = hi.sample_count + lo.sample_count;
    return e;
  }
  ShellSampler sampler(model, box, e_prime - h, e_prime + h, options);
  return sampler.estimate(e_prime, h);
}

RemainderFunctional remainder_functional(const SymbolModel& model, const PhaseBox& box,
                                         double energy, double epsilon, double h,
                                         const VolumeOptions& options) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be > 0");
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "h must be > 0");
  RemainderFunctional r;
  r.energy = energy;
  r.epsilon = epsilon;
  r.h = h;
  const double half = std::pow(h, 1.0 - epsilon);
  const std::size_t n = static_cast<std::size_t>(std::ceil(4.0 * std::pow(h, -epsilon))) + 1;
  r.grid_size = n;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = energy - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (model.dimension() == 1) {
    for (double e : grid) r.shells.push_back({e, shell_volume(model, box, e, h, options)});
  } else {
    ShellSampler sampler(model, box, energy - half - h, energy + half + h, options);
    for (double e : grid) r.shells.push_back({e, sampler.estimate(e, h)});
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.shells.size(); ++i) {
    if (r.shells[i].volume.value > r.shells[best].volume.value) best = i;
  }
  r.argmax_energy = r.shells[best].energy;
  r.value = h + r.shells[best].volume.value;
  r.std_error = r.shells[best].volume.std_error;
  return r;
}

NearCriticalEstimate near_critical_volume(const SymbolModel& model, const PhaseBox& box,
                                          double energy, double window, double h, double delta0,
                                          double cbar, const NearCriticalOptions& options) {
  if (!(cbar > 1.0)) throw Error(ErrorCode::config, "near-critical constant Cbar must exceed 1");
  if (!(h > 0.0) || !(window > 0.0)) throw Error(ErrorCode::invalid_argument, "h and c must be > 0");
  const int n = model.phase_dimension();
  NearCriticalEstimate out;
  out.radius = std::pow(h, delta0);
  out.gradient_bound = cbar * out.radius;
  out.volume.seed = options.volume.seed;
  const double s = out.radius, g = out.gradient_bound;
  auto inner = [&](const PhaseVector& v, const SymbolDerivatives& d) {
    (void)v;
    return d.gradient.norm() <= g && std::abs(d.value - energy) <= window;
  };
  CellCover cover(
      model, box,
      [&](const PhaseVector&, double r, const SymbolDerivatives& d) {
        const double L = curvature_bound(d);
        const double gn = d.gradient.norm();
        return gn - L * r * (1.0 + r) <= g &&
               std::abs(d.value - energy) - gn * r - 0.5 * L * r * r <= window;
      },
      8, 0.5 * s);
  std::vector<PhaseVector> cloud;
  if (cover.size() > 0) {
    const std::size_t max_tries = options.cloud_size * 50;
    for (std::size_t t = 0; t < max_tries && cloud.size() < options.cloud_size; ++t) {
      CounterStream rng(options.volume.seed, 0xc10dULL + t);
      PhaseVector v = cover.draw(rng);
      SymbolDerivatives d = model.derivatives(v);
      if (inner(v, d)) cloud.push_back(v);
    }
  }
  out.cloud_points = cloud.size();
  if (cloud.empty()) {
    out.volume.method = VolumeMethod::monte_carlo;
    return out;
  }
  // Bounding box of the dilated cloud, clipped to the phase box.
  std::vector<double> lo(n, std::numeric_limits<double>::infinity()), hi(n, -lo[0]);
  for (const auto& p : cloud) {
    for (int k = 0; k < n; ++k) lo[k] = std::min(lo[k], p[k] - s), hi[k] = std::max(hi[k], p[k] + s);
  }
  double bvol = 1.0;
  for (int k = 0; k < n; ++k) {
    lo[k] = std::max(lo[k], box.lower(k));
    hi[k] = std::min(hi[k], box.upper(k));
    bvol *= hi[k] - lo[k];
  }
  out.bounding_volume = bvol;
  // Spatial hash with cell size s.
  auto key_of = [&](const std::array<long, kMaxPhase>& q) {
    std::uint64_t key = 1469598103934665603ULL;
    for (int k = 0; k < n; ++k) key = (key ^ static_cast<std::uint64_t>(q[k] + (1L << 20))) * 1099511628211ULL;
    return key;
  };
  std::unordered_map<std::uint64_t, std::vector<int>> grid;
  auto cell_of = [&](const PhaseVector& v) {
    std::array<long, kMaxPhase> q{};
    for (int k = 0; k < n; ++k) q[k] = static_cast<long>(std::floor((v[k] - lo[k]) / s));
    return q;
  };
  for (std::size_t i = 0; i < cloud.size(); ++i) grid[key_of(cell_of(cloud[i]))].push_back(static_cast<int>(i));
  int neighbours = 1;
  for (int k = 0; k < n; ++k) neighbours *= 3;
  const double s2 = s * s;
  auto close = [&](const PhaseVector& v) {
    const auto q = cell_of(v);
    for (int m = 0; m < neighbours; ++m) {
      std::array<long, kMaxPhase> r = q;
      int t = m;
      for (int k = 0; k < n; ++k) {
        r[k] += (t % 3) - 1;
        t /= 3;
      }
      auto it = grid.find(key_of(r));
      if (it == grid.end()) continue;
      for (int idx : it->second) {
        if ((cloud[idx] - v).squaredNorm() < s2) return true;
      }
    }
    return false;
  };
  const int B = options.volume.batches;
  std::vector<double> sums(B, 0.0);
  std::vector<std::size_t> counts(B, 0);
  PhaseVector v(n);
  for (std::size_t i = 0; i < options.volume.budget; ++i) {
    const int b = static_cast<int>(i % static_cast<std::size_t>(B));
    for (int k = 0; k < n; ++k) {
      v[k] = lo[k] + (hi[k] - lo[k]) * unit_draw(options.volume.seed, 0xd11aULL + i, k);
    }
    counts[b] += 1;
    if (close(v)) sums[b] += 1.0;
  }
  out.volume = batch_estimate(sums, counts, bvol);
  out.volume.seed = options.volume.seed;
  return out;
}

}  // namespace weylab
