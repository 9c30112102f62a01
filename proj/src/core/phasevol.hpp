// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/symbols.hpp"

namespace weylab {

enum class VolumeMethod { monte_carlo, tensor_grid, exact_1d };
const char* volume_method_name(VolumeMethod m);

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  VolumeMethod method = VolumeMethod::monte_carlo;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
};

struct VolumeOptions {
  std::size_t budget = std::size_t{1} << 20;
  std::uint64_t seed = 1;
  int batches = 32;
  double containment_margin = 0.02;  // fraction of the box width
};

// vol{a0 < E} inside the phase box.
VolumeEstimate weyl_volume(const SymbolModel& model, const PhaseBox& box, double energy,
                           const VolumeOptions& options = {});

// Importance sampler for shells {|a0 - E'| <= w} with E' +/- w inside [e_lo, e_hi].
// Proposals mix 80% uniform over a cell cover of the energy band with 20% uniform over the box.
class ShellSampler {
 public:
  ShellSampler(const SymbolModel& model, const PhaseBox& box, double e_lo, double e_hi,
               const VolumeOptions& options = {});
  VolumeEstimate estimate(double e_prime, double width) const;
  std::size_t cell_count() const { return cell_count_; }
  double cover_volume() const { return cover_volume_; }

 private:
  double e_lo_, e_hi_;
  VolumeOptions options_;
  std::size_t cell_count_ = 0;
  double cover_volume_ = 0.0;
  int batches_ = 0;
  std::vector<double> energies_;
  std::vector<double> weights_;
  std::vector<int> batch_;
};

// vol{|a0 - E'| <= h}.
VolumeEstimate shell_volume(const SymbolModel& model, const PhaseBox& box, double e_prime,
                            double h, const VolumeOptions& options = {});

struct ShellSample {
  double energy = 0.0;
  VolumeEstimate volume;
};

struct RemainderFunctional {
  double energy = 0.0;
  double epsilon = 0.0;
  double h = 0.0;
  double value = 0.0;  // h + max shell volume
  double std_error = 0.0;
  double argmax_energy = 0.0;
  std::size_t grid_size = 0;
  std::vector<ShellSample> shells;
};

// h + sup over a uniform E'-grid on [E - h^(1-eps), E + h^(1-eps)] with spacing <= h/2.
RemainderFunctional remainder_functional(const SymbolModel& model, const PhaseBox& box,
                                         double energy, double epsilon, double h,
                                         const VolumeOptions& options = {});

struct NearCriticalOptions {
  VolumeOptions volume{std::size_t{1} << 18, 1, 32, 0.02};
  std::size_t cloud_size = 20000;
};

struct NearCriticalEstimate {
  VolumeEstimate volume;
  double radius = 0.0;            // h^delta0
  double gradient_bound = 0.0;    // Cbar h^delta0
  std::size_t cloud_points = 0;
  double bounding_volume = 0.0;
};

// Volume of the h^delta0-neighbourhood (inside the box) of
// {|grad a0| <= Cbar h^delta0, |a0 - E| <= c}.
NearCriticalEstimate near_critical_volume(const SymbolModel& model, const PhaseBox& box,
                                          double energy, double window, double h, double delta0,
                                          double cbar, const NearCriticalOptions& options = {});

}  // namespace weylab
