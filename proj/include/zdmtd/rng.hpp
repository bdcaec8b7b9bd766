#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace zdmtd {

// SplitMix64 over a 64-bit counter. A stream is keyed by (seed, stream id);
// distinct ids give independent-looking sequences, so parallel work can take
// one stream per task and replay identically regardless of scheduling.
// Floating-point samplers are implemented here rather than taken from <random>
// because the standard distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0) : state_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  uint64_t next_u64() { return mix(state_ += 0x9e3779b97f4a7c15ULL); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n >= 1, by rejection.
  uint64_t below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do x = next_u64();
    while (x >= limit);
    return x % n;
  }

  double normal() {
    // Box-Muller; u1 kept away from 0.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double exponential() { return -std::log(1.0 - uniform()); }

  // Marsaglia-Tsang, with the shape < 1 boost.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = 1.0 - uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(1.0 - u + 1e-300) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  std::vector<double> dirichlet(const std::vector<double>& conc) {
    std::vector<double> out(conc.size());
    double s = 0.0;
    for (size_t i = 0; i < conc.size(); ++i) s += out[i] = gamma(conc[i]);
    if (!(s > 0.0)) {
      // All gammas underflowed (tiny concentrations): fall back to a vertex.
      std::fill(out.begin(), out.end(), 0.0);
      out[below(out.size())] = 1.0;
      return out;
    }
    for (double& v : out) v /= s;
    return out;
  }

  // Uniform on the simplex (Dirichlet(1, ..., 1)).
  std::vector<double> simplex(int n) {
    std::vector<double> out(n);
    double s = 0.0;
    for (double& v : out) s += v = exponential();
    for (double& v : out) v /= s;
    return out;
  }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

}  // namespace zdmtd
