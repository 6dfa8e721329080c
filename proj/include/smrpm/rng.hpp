#ifndef SMRPM_RNG_HPP_
#define SMRPM_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace smrpm {

// Random number stream for one chain.  Every sampler takes an explicit Rng&;
// nothing in the library touches a global generator, so identical seeds give
// identical chains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double normal(double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }

  // Gamma(shape, rate): density proportional to x^{shape-1} e^{-rate x}.
  double gamma(double shape, double rate) {
    return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
  }

  double inv_gamma(double shape, double rate) { return 1.0 / gamma(shape, rate); }

  double beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
  }

  bool bernoulli(double p) { return uniform() < p; }

  double exponential(double rate) {
    return std::exponential_distribution<double>(rate)(engine_);
  }

  // Draws an index proportional to non-negative, not necessarily normalized
  // weights.  Throws std::invalid_argument if all weights vanish.
  std::size_t categorical(std::span<const double> weights);

  std::uint64_t integer() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed, e.g. for parallel chains.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace smrpm

#endif  // SMRPM_RNG_HPP_
