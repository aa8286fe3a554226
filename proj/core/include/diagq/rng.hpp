#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace diagq {

/// In-place Fisher-Yates shuffle with explicit draws, so the permutation for a
/// given seed does not depend on the standard library's std::shuffle details.
template <class T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace diagq
