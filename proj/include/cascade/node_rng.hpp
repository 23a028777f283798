#pragma once

#include <cstdint>
#include <utility>

namespace cascade {

// Counter-based randomness for tree nodes. Each node is keyed by
// (seed, level) with the word value as the counter, hashed through
// Threefry-2x64 (20 rounds). Pure function of its inputs, so node draws can
// be made lazily, in any order, on any thread, and always reproduce.

struct U64x2 {
  std::uint64_t v0 = 0;
  std::uint64_t v1 = 0;
};

U64x2 threefry2x64(U64x2 ctr, U64x2 key);

// Uniform draw in the open interval (0,1) from the node hash.
double node_uniform(U64x2 hash);

// Inverse standard normal CDF. Rational approximation polished with two
// Halley steps against erfc, giving errors far below 1e-9 everywhere.
double standard_normal_quantile(double p);

}  // namespace cascade
