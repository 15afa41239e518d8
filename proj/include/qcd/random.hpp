#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qcd {

using Rng = std::mt19937_64;

/// Derives an independent 64-bit stream seed from a user seed and a fixed
/// label (FNV-1a of the label mixed through SplitMix64). Streams with
/// different labels never share state, so adding a consumer does not shift
/// the draws seen by another.
std::uint64_t split_seed(std::uint64_t seed, std::string_view label);

inline Rng make_stream(std::uint64_t seed, std::string_view label) {
  return Rng(split_seed(seed, label));
}

}  // namespace qcd
