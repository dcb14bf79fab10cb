#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bslab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a of a stream label.
constexpr std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed splitting: every random stream is identified by (master seed,
/// stream label, replica index).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index) {
  return mix64(mix64(master ^ label_hash(label)) + mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t master, std::string_view label, std::uint64_t index) {
  return Rng(derive_seed(master, label, index));
}

/// Counter-based uniform in (0, 1): a pure function of its arguments, so a
/// stream can be read lazily from any position.
constexpr double counter_uniform(std::uint64_t key, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = mix64(key ^ mix64(a * 0xd6e8feb86659fd93ULL + mix64(b)));
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace bslab
