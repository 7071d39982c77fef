#include "kgen/field.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>

namespace kgen {

std::string to_string(u128 value) {
  if (value == 0) return "0";
  std::string digits;
  while (value != 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

u128 parse_u128(const std::string& text) {
  if (text.empty()) throw InvalidArgument("empty integer");
  u128 v = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw InvalidArgument("not an integer: " + text);
    const u128 next = v * 10 + static_cast<unsigned>(ch - '0');
    if (next / 10 != v) throw InvalidArgument("integer out of range: " + text);
    v = next;
  }
  return v;
}

u128 clmul_portable(Word a, Word b) {
  u128 r = 0;
  const u128 wide = a;
  while (b != 0) {
    const int i = std::countr_zero(b);
    r ^= wide << i;
    b &= b - 1;
  }
  return r;
}

namespace {

int degree(u128 v) {
  if (v == 0) return -1;
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 127 - std::countl_zero(hi);
  return 63 - std::countl_zero(static_cast<std::uint64_t>(v));
}

u128 poly_mod(u128 a, u128 m) {
  const int dm = degree(m);
  for (int da = degree(a); da >= dm; da = degree(a)) a ^= m << (da - dm);
  return a;
}

u128 poly_div(u128 a, u128 m) {
  const int dm = degree(m);
  u128 q = 0;
  for (int da = degree(a); da >= dm; da = degree(a)) {
    q |= static_cast<u128>(1) << (da - dm);
    a ^= m << (da - dm);
  }
  return q;
}

u128 poly_gcd(u128 a, u128 b) {
  while (b != 0) {
    const u128 r = poly_mod(a, b);
    a = b;
    b = r;
  }
  return a;
}

u128 exponents_to_poly(const std::vector<int>& exps) {
  u128 g = 0;
  for (int e : exps) g |= static_cast<u128>(1) << e;
  return g;
}

// x^(2^i) mod g via repeated squaring inside the field built from g.
Word frobenius_power_of_x(const Gf2w& f, int i) {
  Word x = 2;
  for (int j = 0; j < i; ++j) x = f.mul(x, x);
  return x;
}

}  // namespace

bool is_irreducible_gf2(const std::vector<int>& exponents) {
  if (exponents.empty()) return false;
  const u128 g = exponents_to_poly(exponents);
  const int n = degree(g);
  if (n < 1 || n > 64) return false;
  if (n == 1) return true;
  if ((g & 1) == 0) return false;
  if (n <= 16) {
    for (u128 t = 2; degree(t) <= n / 2; ++t) {
      if (poly_mod(g, t) == 0) return false;
    }
    return true;
  }
  // Rabin: x^(2^n) = x mod g, and gcd(x^(2^(n/r)) - x, g) = 1 for primes r | n.
  const Gf2w probe = Gf2w::unchecked(exponents);  // reduction is valid for any g of this shape
  if (frobenius_power_of_x(probe, n) != 2) return false;
  for (std::uint64_t r : prime_factors(static_cast<std::uint64_t>(n))) {
    const Word h = frobenius_power_of_x(probe, n / static_cast<int>(r)) ^ 2;
    if (degree(poly_gcd(g, h)) != 0) return false;
  }
  return true;
}

std::vector<int> default_reduction_polynomial(int w) {
  switch (w) {
    case 4: return {4, 1, 0};
    case 8: return {8, 4, 3, 1, 0};
    case 16: return {16, 5, 3, 1, 0};
    case 32: return {32, 7, 3, 2, 0};
    case 64: return {64, 4, 3, 1, 0};
    default: break;
  }
  if (w == 1) return {1, 0};
  if (w < 1 || w > 64) throw InvalidArgument("GF(2^w) width must be in [1, 64]");
  for (int a = 1; a < w; ++a) {
    std::vector<int> g{w, a, 0};
    if (is_irreducible_gf2(g)) return g;
  }
  for (int a = 3; a < w; ++a)
    for (int b = 2; b < a; ++b)
      for (int c = 1; c < b; ++c) {
        std::vector<int> g{w, a, b, c, 0};
        if (is_irreducible_gf2(g)) return g;
      }
  throw InvalidArgument("no irreducible pentanomial of degree " + std::to_string(w));
}

Gf2w::Gf2w(int w) : Gf2w(w, default_reduction_polynomial(w)) {}

Gf2w::Gf2w(int w, std::vector<int> exponents) {
  std::sort(exponents.begin(), exponents.end(), std::greater<>());
  exponents.erase(std::unique(exponents.begin(), exponents.end()), exponents.end());
  if (w < 1 || w > 64) throw InvalidArgument("GF(2^w) width must be in [1, 64]");
  if (exponents.empty() || exponents.front() != w || exponents.back() != 0)
    throw InvalidArgument("reduction polynomial must have degree w and constant term 1");
  if (exponents.size() > static_cast<std::size_t>(kMaxWeight))
    throw InvalidArgument("reduction polynomial weight exceeds 5");
  init(exponents);
  if (!is_irreducible_gf2(exponents)) throw InvalidArgument("reduction polynomial is reducible");
}

Gf2w Gf2w::unchecked(const std::vector<int>& exponents) {
  Gf2w f;
  std::vector<int> sorted = exponents;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  f.init(sorted);
  return f;
}

void Gf2w::init(std::vector<int> exponents) {
  w_ = exponents.front();
  mask_ = w_ == 64 ? ~Word{0} : (Word{1} << w_) - 1;
  tail_ = 0;
  tail_count_ = 0;
  for (std::size_t i = 1; i < exponents.size(); ++i) {
    tail_ |= Word{1} << exponents[i];
    tail_exps_[static_cast<std::size_t>(tail_count_++)] = exponents[i];
  }
  // floor(x^2w / g) = x^w + floor(tail * x^w / g).
  const u128 g = (static_cast<u128>(1) << w_) | tail_;
  mu_tail_ = static_cast<Word>(poly_div(static_cast<u128>(tail_) << w_, g));
  sparse_ = mu_tail_ == tail_;
}

std::vector<int> Gf2w::exponents() const {
  std::vector<int> out{w_};
  out.insert(out.end(), tail_exps_.begin(), tail_exps_.begin() + tail_count_);
  return out;
}

Word Gf2w::pow(Word a, std::uint64_t e) const { return field_pow(*this, a, e); }

Word Gf2w::inv(Word a) const {
  if (a == 0) throw InvalidArgument("zero has no inverse");
  // |F^*| = 2^w - 1, so a^-1 = a^(2^w - 2).
  return field_pow(*this, a, mask_ - 1);
}

std::string Gf2w::spec() const { return "gf2w:" + std::to_string(w_); }

const Gf2w& binary_field(int w) {
  if (w < 1 || w > 64) throw InvalidArgument("GF(2^w) width must be in [1, 64]");
  static std::mutex lock;
  static std::array<std::unique_ptr<Gf2w>, 65> cache;
  std::lock_guard<std::mutex> guard(lock);
  auto& slot = cache[static_cast<std::size_t>(w)];
  if (!slot) slot = std::make_unique<Gf2w>(w);
  return *slot;
}

// ---------------------------------------------------------------------------

Gfp::Gfp(Word p) : p_(p) {
  if (p < 2 || p >= (Word{1} << 63)) throw InvalidArgument("GF(p) modulus must satisfy 2 <= p < 2^63");
  if (!is_prime(p)) throw InvalidArgument("GF(p) modulus is not prime: " + std::to_string(p));
  bits_ = std::bit_width(p);
  mu_ = static_cast<Word>((static_cast<u128>(1) << (2 * bits_)) / p);
}

Word Gfp::pow(Word a, std::uint64_t e) const { return field_pow(*this, a, e); }

Word Gfp::inv(Word a) const {
  if (a == 0) throw InvalidArgument("zero has no inverse");
  return field_pow(*this, a, p_ - 2);
}

std::string Gfp::spec() const { return "gfp:" + std::to_string(p_); }

// ---------------------------------------------------------------------------

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % n);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t n) {
  std::uint64_t r = 1 % n;
  a %= n;
  while (e != 0) {
    if (e & 1) r = mulmod(r, a, n);
    a = mulmod(a, a, n);
    e >>= 1;
  }
  return r;
}

// Brent's variant of Pollard's rho; n must be composite and odd.
std::uint64_t pollard_rho(std::uint64_t n) {
  for (std::uint64_t c = 1;; ++c) {
    std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
    const std::uint64_t m = 128;
    std::uint64_t r = 1;
    auto f = [&](std::uint64_t v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
    if (n % p == 0) {
      out.push_back(p);
      factor_into(n / p, out);
      return;
    }
  }
  const std::uint64_t d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are deterministic for all n < 2^64.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (n == 0) throw InvalidArgument("cannot factor zero");
  factor_into(n, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Word find_primitive_element(const Gfp& field, std::span<const std::uint64_t> factors, Entropy& rng) {
  const Word p = field.modulus();
  // The supplied primes must account for all of p - 1.
  std::uint64_t rest = p - 1;
  for (std::uint64_t q : factors) {
    if (q < 2 || !is_prime(q) || rest % q != 0)
      throw InvalidArgument("factorization does not match p - 1");
    while (rest % q == 0) rest /= q;
  }
  if (rest != 1) throw InvalidArgument("factorization of p - 1 is incomplete");
  if (p == 2) return 1;
  for (;;) {
    const Word candidate = 1 + field.random(rng) % (p - 1);
    bool primitive = true;
    for (std::uint64_t q : factors) {
      if (field.pow(candidate, (p - 1) / q) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) return candidate;
  }
}

Word find_primitive_element(const Gfp& field) {
  Entropy rng(field.modulus());
  const auto factors = prime_factors(field.modulus() - 1 == 0 ? 1 : field.modulus() - 1);
  return find_primitive_element(field, factors, rng);
}

std::uint64_t multiplicative_order(const Gfp& field, Word a) {
  if (a == 0) throw InvalidArgument("zero has no multiplicative order");
  std::uint64_t order = field.modulus() - 1;
  for (std::uint64_t q : prime_factors(order == 0 ? 1 : order)) {
    while (order % q == 0 && field.pow(a, order / q) == 1) order /= q;
  }
  return order;
}

// ---------------------------------------------------------------------------

FieldSpec FieldSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidArgument("field spec must be gf2w:<w> or gfp:<p>: " + text);
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  const u128 value = parse_u128(arg);
  if (kind == "gf2w") {
    if (value < 1 || value > 64) throw InvalidArgument("gf2w width must be in [1, 64]");
    return binary(static_cast<int>(value));
  }
  if (kind == "gfp") {
    if (value < 2 || value >= (static_cast<u128>(1) << 63))
      throw InvalidArgument("gfp modulus must satisfy 2 <= p < 2^63");
    if (!is_prime(static_cast<std::uint64_t>(value))) throw InvalidArgument("gfp modulus is not prime: " + arg);
    return prime_field(static_cast<Word>(value));
  }
  throw InvalidArgument("unknown field kind: " + kind);
}

std::string FieldSpec::to_string() const {
  return kind == Kind::gf2w ? "gf2w:" + std::to_string(width) : "gfp:" + std::to_string(prime);
}

std::size_t FieldSpec::element_bytes() const {
  const int bits = kind == Kind::gf2w ? width : std::max(1, static_cast<int>(std::bit_width(prime - 1)));
  return static_cast<std::size_t>((bits + 7) / 8);
}

Word FieldSpec::max_element() const {
  if (kind == Kind::gfp) return prime - 1;
  return width == 64 ? ~Word{0} : (Word{1} << width) - 1;
}

void write_element(std::ostream& out, Word value, std::size_t bytes) {
  char buf[8];
  for (std::size_t i = 0; i < bytes; ++i) buf[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(buf, static_cast<std::streamsize>(bytes));
}

Word read_element(std::istream& in, std::size_t bytes) {
  unsigned char buf[8] = {};
  in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(bytes));
  if (in.gcount() != static_cast<std::streamsize>(bytes)) throw InvalidArgument("truncated element");
  Word v = 0;
  for (std::size_t i = 0; i < bytes; ++i) v |= static_cast<Word>(buf[i]) << (8 * i);
  return v;
}

}  // namespace kgen
