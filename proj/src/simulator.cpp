#include "warpdiff/simulator.hpp"

#include <cmath>
#include <cstdio>

namespace warpdiff {

namespace simrng {

std::uint64_t next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double to_unit(std::uint64_t bits) {
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

double gaussian(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (counter + 1));
  double u1 = to_unit(next(state));
  double u2 = to_unit(next(state));
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

namespace {

double log_uniform(std::uint64_t seed, std::uint64_t counter, double lo, double hi) {
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (counter + 1));
  double u = to_unit(next(state));
  return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
}

}  // namespace

}  // namespace simrng

void SimProfile::validate() const {
  if (runtime_speeds.size() < 2) {
    raise(errc::too_few_runtimes, "simulation needs at least 2 runtime speeds");
  }
  if (case_workloads.empty()) {
    raise(errc::validation_error, "simulation needs at least 1 case workload");
  }
  for (double s : runtime_speeds) {
    if (!std::isfinite(s) || !(s > 0.0)) {
      raise(errc::non_positive_entry, "runtime speeds must be finite and > 0");
    }
  }
  for (double w : case_workloads) {
    if (!std::isfinite(w) || !(w > 0.0)) {
      raise(errc::non_positive_entry, "case workloads must be finite and > 0");
    }
  }
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
    raise(errc::validation_error, "noise_sigma must be finite and >= 0");
  }
}

namespace {

std::string padded_id(const char* prefix, std::size_t index, std::size_t count) {
  std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  if (width < 4) width = 4;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, int(width), index);
  return buf;
}

// Counter namespaces keep cell noise, derived speeds and derived workloads on
// disjoint streams.
constexpr std::uint64_t kCellTag = std::uint64_t(1) << 56;
constexpr std::uint64_t kSpeedTag = std::uint64_t(2) << 56;
constexpr std::uint64_t kWorkloadTag = std::uint64_t(3) << 56;

}  // namespace

TimingMatrix generate(const SimProfile& profile) {
  profile.validate();
  const std::size_t n = profile.case_workloads.size();
  const std::size_t k = profile.runtime_speeds.size();

  TimingMatrix m;
  m.stage = Stage::total;
  m.case_ids.reserve(n);
  m.runtime_ids.reserve(k);
  for (std::size_t i = 0; i < n; ++i) m.case_ids.push_back(padded_id("case", i, n));
  for (std::size_t j = 0; j < k; ++j) m.runtime_ids.push_back(padded_id("rt", j, k));

  m.values.resize(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double value = profile.case_workloads[i] * profile.runtime_speeds[j];
      if (profile.noise_sigma > 0.0) {
        double z = simrng::gaussian(profile.seed, kCellTag | (i * k + j));
        value *= std::exp(profile.noise_sigma * z);
      }
      m.values[i * k + j] = value;
    }
  }
  return m;
}

TimingMatrix inject(TimingMatrix m, const InjectedAnomaly& anomaly) {
  if (!(anomaly.factor > 1.0) || !std::isfinite(anomaly.factor)) {
    raise(errc::validation_error,
          "anomaly factor must be > 1, got " + std::to_string(anomaly.factor));
  }
  if (anomaly.case_index >= m.n_cases() || anomaly.runtime_index >= m.n_runtimes()) {
    raise(errc::index_out_of_range,
          "anomaly cell (" + std::to_string(anomaly.case_index) + ", " +
              std::to_string(anomaly.runtime_index) + ") outside " +
              std::to_string(m.n_cases()) + "x" + std::to_string(m.n_runtimes()));
  }
  m.at(anomaly.case_index, anomaly.runtime_index) *= anomaly.factor;
  return m;
}

std::map<Stage, TimingMatrix> split_stages(
    const TimingMatrix& total,
    const std::vector<std::array<double, 3>>& fractions) {
  if (fractions.size() != total.n_runtimes()) {
    raise(errc::dimension_mismatch, "need one stage-fraction triple per runtime");
  }
  for (const auto& f : fractions) {
    double sum = f[0] + f[1] + f[2];
    if (f[0] < 0 || f[1] < 0 || f[2] < 0 || std::abs(sum - 1.0) > 1e-9) {
      raise(errc::validation_error, "stage fractions must be non-negative and sum to 1");
    }
  }

  std::map<Stage, TimingMatrix> out;
  const Stage stages[3] = {Stage::init, Stage::load, Stage::exec};
  for (int s = 0; s < 3; ++s) {
    TimingMatrix part = total;
    part.stage = stages[s];
    for (std::size_t i = 0; i < total.n_cases(); ++i) {
      for (std::size_t j = 0; j < total.n_runtimes(); ++j) {
        part.at(i, j) = total.at(i, j) * fractions[j][s];
      }
    }
    out.emplace(stages[s], std::move(part));
  }
  return out;
}

SimProfile default_profile(std::uint64_t seed, std::size_t n_cases,
                           std::size_t k_runtimes, double noise_sigma) {
  SimProfile profile;
  profile.seed = seed;
  profile.noise_sigma = noise_sigma;
  profile.runtime_speeds.reserve(k_runtimes);
  profile.case_workloads.reserve(n_cases);
  for (std::size_t j = 0; j < k_runtimes; ++j) {
    profile.runtime_speeds.push_back(
        simrng::log_uniform(seed, kSpeedTag | j, 0.5, 30.0));
  }
  for (std::size_t i = 0; i < n_cases; ++i) {
    profile.case_workloads.push_back(
        simrng::log_uniform(seed, kWorkloadTag | i, 0.01, 10.0));
  }
  return profile;
}

}  // namespace warpdiff
