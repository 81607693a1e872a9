#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace csc {

using Rng = std::mt19937_64;

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Derives a child seed from a parent seed and a stage name. Every random
/// stage draws from its own named stream, so adding or reordering stages
/// never perturbs the others.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view name,
                                           std::uint64_t index = 0) noexcept {
  return detail::splitmix64(detail::splitmix64(parent ^ detail::fnv1a(name)) + index);
}

inline Rng make_rng(std::uint64_t parent, std::string_view name, std::uint64_t index = 0) {
  return Rng(derive_seed(parent, name, index));
}

}  // namespace csc
