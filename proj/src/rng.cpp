#include "smrpm/rng.hpp"

#include <stdexcept>

namespace smrpm {

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("categorical: negative weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("categorical: all weights zero");
  double u = uniform() * total;
  for (std::size_t idx = 0; idx + 1 < weights.size(); ++idx) {
    u -= weights[idx];
    if (u < 0.0) return idx;
  }
  return weights.size() - 1;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over seed + odd multiple of the stream id.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace smrpm
