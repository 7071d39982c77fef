#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace kgen {

// Field elements are plain machine words; the owning context gives them
// meaning.
using Word = std::uint64_t;
using u128 = unsigned __int128;

// Periods reach |F| = 2^64 for GF(2^64), one past the range of a word.
using Period = unsigned __int128;

// Construction-time randomness (graphs, seeds drawn from entropy). Emitted
// streams never consume it.
using Entropy = std::mt19937_64;

// Derives an independent construction stream from a base seed and a stream
// label, so parallel workers can be seeded deterministically.
inline Entropy split_entropy(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Entropy(seq);
}

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A brute-force routine was asked to run beyond its enumeration budget.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No parameter combination satisfies the request.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_string(u128 value);
u128 parse_u128(const std::string& text);

constexpr bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

constexpr int log2_exact(std::uint64_t x) {
  int r = 0;
  while ((std::uint64_t{1} << r) < x) ++r;
  return r;
}

constexpr std::uint64_t next_power_of_two(std::uint64_t x) {
  std::uint64_t r = 1;
  while (r < x) r <<= 1;
  return r;
}

}  // namespace kgen
