#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kgen/common.hpp"

#if defined(__PCLMUL__)
#include <wmmintrin.h>
#define KGEN_HAVE_PCLMUL 1
#else
#define KGEN_HAVE_PCLMUL 0
#endif

namespace kgen {

// ---------------------------------------------------------------------------
// Carryless (F_2[X]) multiplication of two 64-bit words.

u128 clmul_portable(Word a, Word b);

#if KGEN_HAVE_PCLMUL
inline u128 clmul_hardware(Word a, Word b) {
  const __m128i r = _mm_clmulepi64_si128(_mm_cvtsi64_si128(static_cast<long long>(a)),
                                         _mm_cvtsi64_si128(static_cast<long long>(b)), 0x00);
  u128 out;
  _mm_storeu_si128(reinterpret_cast<__m128i*>(&out), r);
  return out;
}
#endif

constexpr bool clmul_hardware_available() { return KGEN_HAVE_PCLMUL != 0; }

inline u128 carryless_mul(Word a, Word b) {
#if KGEN_HAVE_PCLMUL
  return clmul_hardware(a, b);
#else
  return clmul_portable(a, b);
#endif
}

bool is_irreducible_gf2(const std::vector<int>& exponents);

// ---------------------------------------------------------------------------
// GF(2^w), 1 <= w <= 64, reduction by a polynomial of weight <= 5.

class Gf2w {
 public:
  static constexpr int kMaxWeight = 5;

  // Uses the built-in reduction polynomial for w.
  explicit Gf2w(int w);
  // `exponents` lists the set bits of g, e.g. {4, 1, 0} for x^4 + x + 1.
  Gf2w(int w, std::vector<int> exponents);

  int width() const { return w_; }
  Word mask() const { return mask_; }
  std::vector<int> exponents() const;

  Word zero() const { return 0; }
  Word one() const { return 1; }
  Word max_element() const { return mask_; }
  bool contains(Word a) const { return (a & ~mask_) == 0; }
  Word element_at(std::uint64_t index) const { return index; }

  Word add(Word a, Word b) const { return a ^ b; }
  Word sub(Word a, Word b) const { return a ^ b; }
  Word neg(Word a) const { return a; }
  Word mul(Word a, Word b) const { return reduce(carryless_mul(a, b)); }
  Word pow(Word a, std::uint64_t e) const;
  Word inv(Word a) const;

  // z mod g for deg z < 2w. Barrett-style: q = M(M(z) * g'), r = L(z) + L(g* * q)
  // where g' = floor(x^2w / g). For sparse g with deg(g - x^w) < w/2, g' = g and
  // without hardware clmul both products collapse to a handful of shifts.
  Word reduce(u128 z) const {
    const Word hi = w_ == 64 ? static_cast<Word>(z >> 64) : static_cast<Word>(z >> w_);
    const Word lo = static_cast<Word>(z) & mask_;
    const bool shifts = sparse_ && !clmul_hardware_available();
    const u128 t = shifts ? shift_xor(hi) : carryless_mul(hi, mu_tail_);
    const Word q = hi ^ static_cast<Word>(t >> w_);
    const u128 u = shifts ? shift_xor(q) : carryless_mul(q, tail_);
    return (lo ^ static_cast<Word>(u)) & mask_;
  }

  std::string spec() const;
  friend bool operator==(const Gf2w& a, const Gf2w& b) { return a.w_ == b.w_ && a.tail_ == b.tail_; }

  template <class Rng>
  Word random(Rng& rng) const {
    return static_cast<Word>(rng()) & mask_;
  }

 private:
  u128 shift_xor(Word x) const {
    u128 r = 0;
    for (int i = 0; i < tail_count_; ++i) r ^= static_cast<u128>(x) << tail_exps_[i];
    return r;
  }
  Gf2w() = default;
  // Skips the irreducibility check; used by that check itself.
  static Gf2w unchecked(const std::vector<int>& exponents);
  friend bool is_irreducible_gf2(const std::vector<int>& exponents);
  void init(std::vector<int> exponents);

  int w_ = 0;
  Word mask_ = 0;
  Word tail_ = 0;     // g - x^w
  Word mu_tail_ = 0;  // floor(x^2w / g) - x^w
  bool sparse_ = false;
  std::array<int, kMaxWeight> tail_exps_{};
  int tail_count_ = 0;
};

// The reduction polynomial used by Gf2w(w): fixed low-weight choices for
// w in {4, 8, 16, 32, 64}, otherwise the lexicographically first irreducible
// trinomial, falling back to pentanomials.
std::vector<int> default_reduction_polynomial(int w);

// Irreducibility over F_2 of the polynomial with the given set exponents.
// Trial division for degree <= 16, Rabin's test above.
bool is_irreducible_gf2(const std::vector<int>& exponents);

// Shared Gf2w(w) instance, built once per width.
const Gf2w& binary_field(int w);

// ---------------------------------------------------------------------------
// GF(p), p prime, 2 <= p < 2^63. Products are reduced with a precomputed
// reciprocal mu = floor(2^(2s) / p), s = bit length of p.

class Gfp {
 public:
  explicit Gfp(Word p);

  Word modulus() const { return p_; }
  Word zero() const { return 0; }
  Word one() const { return 1; }
  Word max_element() const { return p_ - 1; }
  bool contains(Word a) const { return a < p_; }
  Word element_at(std::uint64_t index) const { return index; }

  Word add(Word a, Word b) const {
    const Word s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Word sub(Word a, Word b) const { return a >= b ? a - b : a + (p_ - b); }
  Word neg(Word a) const { return a == 0 ? 0 : p_ - a; }
  Word mul(Word a, Word b) const { return reduce(static_cast<u128>(a) * b); }
  Word pow(Word a, std::uint64_t e) const;
  Word inv(Word a) const;

  // x mod p for x < 2^(2s); no division instruction.
  Word reduce(u128 x) const {
    const Word top = static_cast<Word>(x >> (bits_ - 1));
    const u128 q = (static_cast<u128>(top) * mu_) >> (bits_ + 1);
    u128 r = x - q * p_;
    if (r >= p_) r -= p_;
    if (r >= p_) r -= p_;
    return static_cast<Word>(r);
  }

  std::string spec() const;
  friend bool operator==(const Gfp& a, const Gfp& b) { return a.p_ == b.p_; }

  template <class Rng>
  Word random(Rng& rng) const {
    // Rejection sampling over the smallest covering power of two.
    const Word m = bits_ >= 64 ? ~Word{0} : (Word{1} << bits_) - 1;
    for (;;) {
      const Word v = static_cast<Word>(rng()) & m;
      if (v < p_) return v;
    }
  }

 private:
  Word p_ = 0;
  int bits_ = 0;
  Word mu_ = 0;
};

// ---------------------------------------------------------------------------

template <class F>
concept FiniteField = requires(const F& f, Word a, Word b, std::uint64_t e) {
  { f.add(a, b) } -> std::same_as<Word>;
  { f.sub(a, b) } -> std::same_as<Word>;
  { f.mul(a, b) } -> std::same_as<Word>;
  { f.zero() } -> std::same_as<Word>;
  { f.one() } -> std::same_as<Word>;
  { f.contains(a) } -> std::same_as<bool>;
  { f.max_element() } -> std::same_as<Word>;
  { f.element_at(e) } -> std::same_as<Word>;
};

// Square-and-multiply; a^0 = 1.
template <FiniteField F>
Word field_pow(const F& f, Word a, std::uint64_t e) {
  Word result = f.one();
  while (e != 0) {
    if (e & 1) result = f.mul(result, a);
    a = f.mul(a, a);
    e >>= 1;
  }
  return result;
}

// |F| as a 128-bit count.
template <FiniteField F>
Period field_size(const F& f) {
  return static_cast<Period>(f.max_element()) + 1;
}

// ---------------------------------------------------------------------------
// Number theory helpers for GF(p).

bool is_prime(std::uint64_t n);
// Distinct prime factors in increasing order.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

// Las Vegas search for a generator of GF(p)^*. `factors` must be the complete
// set of distinct primes dividing p - 1; anything else is InvalidArgument.
Word find_primitive_element(const Gfp& field, std::span<const std::uint64_t> factors, Entropy& rng);
Word find_primitive_element(const Gfp& field);

std::uint64_t multiplicative_order(const Gfp& field, Word a);

// ---------------------------------------------------------------------------
// Runtime field selection ("gf2w:64", "gfp:257").

struct FieldSpec {
  enum class Kind { gf2w, gfp };
  Kind kind = Kind::gf2w;
  int width = 64;  // gf2w
  Word prime = 0;  // gfp

  static FieldSpec parse(const std::string& text);
  static FieldSpec binary(int w) { return {Kind::gf2w, w, 0}; }
  static FieldSpec prime_field(Word p) { return {Kind::gfp, 0, p}; }

  std::string to_string() const;
  // Serialized width of one element in bytes.
  std::size_t element_bytes() const;
  Word max_element() const;
  // Hex digits per element in seed and stream text.
  std::size_t hex_digits() const { return 2 * element_bytes(); }
  bool is_binary() const { return kind == Kind::gf2w; }
  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

// Little-endian fixed-width element encoding.
void write_element(std::ostream& out, Word value, std::size_t bytes);
Word read_element(std::istream& in, std::size_t bytes);

}  // namespace kgen
