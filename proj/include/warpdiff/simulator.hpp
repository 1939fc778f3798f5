#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "warpdiff/types.hpp"

namespace warpdiff {

/// Synthetic corpus model: each cell is workload * speed perturbed by
/// multiplicative lognormal noise. The per-runtime speeds realize the
/// systematic performance gaps an oracle ratio is supposed to capture.
struct SimProfile {
  std::uint64_t seed = 0;
  std::vector<double> runtime_speeds;   // k >= 2, all > 0
  std::vector<double> case_workloads;   // n >= 1, all > 0
  double noise_sigma = 0.0;

  void validate() const;
  bool operator==(const SimProfile&) const = default;
};

struct InjectedAnomaly {
  std::size_t case_index = 0;
  std::size_t runtime_index = 0;
  double factor = 0.0;  // must be > 1
};

/// values[i][j] = workload_i * speed_j * exp(sigma * z_ij). The generator is
/// counter-based (splitmix64 keyed by seed and cell index, Box-Muller), so a
/// given (seed, profile) always produces the same matrix and rows could be
/// generated in any order.
TimingMatrix generate(const SimProfile& profile);

/// Multiplies exactly one cell by the anomaly factor.
TimingMatrix inject(TimingMatrix m, const InjectedAnomaly& anomaly);

/// Splits a total-time matrix into init/load/exec matrices using fixed
/// per-runtime stage fractions (each row of `fractions` sums to 1).
std::map<Stage, TimingMatrix> split_stages(
    const TimingMatrix& total,
    const std::vector<std::array<double, 3>>& fractions);

/// Profile with speeds and workloads drawn log-uniformly from the seed:
/// speeds in [0.5, 30] (AOT-vs-interpreter scale gaps), workloads in
/// [0.01, 10]. Used by the CLI when no explicit profile is given.
SimProfile default_profile(std::uint64_t seed, std::size_t n_cases,
                           std::size_t k_runtimes, double noise_sigma);

namespace simrng {

/// splitmix64 step; the only PRNG used anywhere in the simulator.
std::uint64_t next(std::uint64_t& state);

/// Uniform in (0, 1) from 53 high bits.
double to_unit(std::uint64_t bits);

/// Standard normal via Box-Muller from a stream keyed by (seed, counter).
double gaussian(std::uint64_t seed, std::uint64_t counter);

}  // namespace simrng

}  // namespace warpdiff
