#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sparsenet {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives a child seed from a master seed and a list of coordinates
/// (trial index, layer count, ...). The master seed is mixed first, then
/// each coordinate is folded in with h = splitmix64(h ^ (c + golden)), so
/// the coordinates' order matters and distinct coordinate tuples give
/// distinct seeds with overwhelming probability.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace sparsenet
