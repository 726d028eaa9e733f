#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace vrths {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Deterministic random stream. mt19937_64 is bit-exact per the standard, and
// all distributions here are explicit inverse-transform / Box-Muller over it,
// so a given seed produces the same sequence on every platform and toolchain.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  // Independent child stream; adding streams at new indices never perturbs
  // existing ones.
  static RandomStream substream(std::uint64_t master, std::uint64_t index) {
    return RandomStream(detail::splitmix64(master ^ detail::splitmix64(index + 1)));
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second deviate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Lognormal with arithmetic mean `mean` and coefficient of variation `cov`:
  // sigma^2 = ln(1 + cov^2), mu = ln(mean) - sigma^2/2. cov = 0 degenerates to
  // the mean without consuming randomness.
  double lognormal_mean_cov(double mean, double cov) {
    if (cov == 0.0) return mean;
    const double s2 = std::log1p(cov * cov);
    return std::exp(std::log(mean) - 0.5 * s2 + std::sqrt(s2) * normal());
  }

  // Inverse-CDF Weibull draw.
  double weibull(double shape, double scale) {
    return scale * std::pow(-std::log1p(-uniform()), 1.0 / shape);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace vrths
