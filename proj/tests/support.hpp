// Shared test utilities: independent numerical oracles, deterministic random
// draws, and filesystem fixtures. Everything here is deliberately separate
// from the library's own code paths so it can act as ground truth.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <sys/stat.h>
#include <vector>

#include "warpdiff/analysis.hpp"

namespace testsupport {

// ----------------------------------------------------------------- random --

// mt19937_64 output is pinned by the standard; mapping bits to doubles by
// hand keeps draws identical across library implementations.
inline double uniform01(std::mt19937_64& gen) {
  return double(gen() >> 11) * 0x1.0p-53;
}

inline double log_uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::exp(std::log(lo) + uniform01(gen) * (std::log(hi) - std::log(lo)));
}

inline std::vector<double> log_uniform_vector(std::mt19937_64& gen, std::size_t k,
                                              double lo, double hi) {
  std::vector<double> v(k);
  for (double& x : v) x = log_uniform(gen, lo, hi);
  return v;
}

// ------------------------------------------------- 1-D minimization oracle --

// Distance between the re-normalized vector (raw with dimension j replaced by
// x) and the oracle, computed directly from the definition.
inline double renormalized_distance(std::span<const double> raw, std::size_t j,
                                    double x, const warpdiff::OracleVector& oracle) {
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double v = i == j ? x : raw[i];
    norm_sq += v * v;
  }
  double norm = std::sqrt(norm_sq);
  double dist_sq = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double v = (i == j ? x : raw[i]) / norm;
    double d = v - oracle.components[i];
    dist_sq += d * d;
  }
  return std::sqrt(dist_sq);
}

// The adjustment objective can be flat to within double (and even long
// double) resolution over an x-range far wider than the tolerance the search
// is asked to certify: shallow minima can sit at x* up to ~1e6 * ||raw||
// where the basin's depth falls below representable differences. The search
// oracle therefore evaluates in quad precision, where the flat width
// collapses by ~sqrt(eps_quad / eps_double) ~ 1e-9.
#if defined(__GNUC__) && defined(__x86_64__) && __has_include(<quadmath.h>)
#include <quadmath.h>
using SearchReal = __float128;
inline SearchReal search_sqrt(SearchReal x) { return sqrtq(x); }
inline SearchReal search_exp(SearchReal x) { return expq(x); }
inline SearchReal search_log(SearchReal x) { return logq(x); }
#else
using SearchReal = long double;
inline SearchReal search_sqrt(SearchReal x) { return std::sqrt(x); }
inline SearchReal search_exp(SearchReal x) { return std::exp(x); }
inline SearchReal search_log(SearchReal x) { return std::log(x); }
#endif

inline SearchReal renormalized_distance_hp(std::span<const double> raw, std::size_t j,
                                           SearchReal x,
                                           const warpdiff::OracleVector& oracle) {
  SearchReal norm_sq = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    SearchReal v = i == j ? x : static_cast<SearchReal>(raw[i]);
    norm_sq += v * v;
  }
  SearchReal norm = search_sqrt(norm_sq);
  SearchReal dist_sq = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    SearchReal v = (i == j ? x : static_cast<SearchReal>(raw[i])) / norm;
    SearchReal d = v - static_cast<SearchReal>(oracle.components[i]);
    dist_sq += d * d;
  }
  return search_sqrt(dist_sq);
}

// Golden-section search over [lo, hi]; assumes a unimodal objective.
template <typename F>
SearchReal golden_section_minimize(const F& f, SearchReal lo, SearchReal hi,
                                   int iterations = 260) {
  const SearchReal inv_phi = (search_sqrt(SearchReal(5)) - 1) / 2;
  SearchReal a = lo, b = hi;
  SearchReal c = b - inv_phi * (b - a);
  SearchReal d = a + inv_phi * (b - a);
  SearchReal fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2;
}

// Brute-force minimizer of the per-dimension adjustment objective, using
// only objective evaluations (independent of the closed form). Searches in
// log-space starting from the (0, 10*||raw||] bracket, doubling the upper
// bound while the objective still descends at the edge so the bracket always
// contains the minimum.
inline double brute_force_replacement(std::span<const double> raw, std::size_t j,
                                      const warpdiff::OracleVector& oracle) {
  double norm = 0.0;
  for (double v : raw) norm += v * v;
  norm = std::sqrt(norm);

  auto objective = [&](SearchReal t) {
    return renormalized_distance_hp(raw, j, search_exp(t), oracle);
  };

  SearchReal log_norm = search_log(static_cast<SearchReal>(norm));
  SearchReal lo = log_norm + search_log(SearchReal(1e-12));
  SearchReal hi = log_norm + search_log(SearchReal(10));
  const SearchReal probe_step = SearchReal(1) / 1024;
  for (int expand = 0; expand < 200; ++expand) {
    if (objective(hi - probe_step) > objective(hi)) {
      hi += search_log(SearchReal(2));  // still descending at the edge
    } else {
      break;
    }
  }
  return double(search_exp(golden_section_minimize(objective, lo, hi)));
}

// 1e5-point grid minimizer over a fixed bracket, as a second, cruder oracle.
inline double grid_replacement(std::span<const double> raw, std::size_t j,
                               const warpdiff::OracleVector& oracle,
                               std::size_t points = 100000) {
  double norm = 0.0;
  for (double v : raw) norm += v * v;
  norm = std::sqrt(norm);

  double best_x = norm;
  double best_f = renormalized_distance(raw, j, best_x, oracle);
  for (std::size_t i = 1; i <= points; ++i) {
    double x = 10.0 * norm * double(i) / double(points);
    double f = renormalized_distance(raw, j, x, oracle);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  return best_x;
}

inline double angle_between(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  double cosine = dot / (std::sqrt(na) * std::sqrt(nb));
  if (cosine > 1.0) cosine = 1.0;
  if (cosine < -1.0) cosine = -1.0;
  return std::acos(cosine);
}

// ------------------------------------------------------------- filesystem --

class TempDir {
public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "warpdiff_test_XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (::mkdtemp(buf.data()) == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

inline void write_script(const std::filesystem::path& path, const std::string& body) {
  write_file(path, body);
  ::chmod(path.c_str(), 0755);
}

}  // namespace testsupport
