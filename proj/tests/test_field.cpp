#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kgen/field.hpp"
#include "oracles.hpp"

using namespace kgen;

namespace {

Word brute_order(Word a, Word p) {
  Word x = a % p;
  for (Word e = 1; e < p; ++e) {
    if (x == 1) return e;
    x = oracle::mod_mul(x, a, p);
  }
  return 0;
}

bool irreducible_by_division(const std::vector<int>& exps) {
  const u128 g = oracle::poly_from(exps);
  const int w = exps.front();
  for (u128 d = 2; d < (static_cast<u128>(1) << (w / 2 + 1)); ++d) {
    if (oracle::degree(d) >= 1 && oracle::degree(d) <= w / 2 && oracle::poly_mod(g, d) == 0) return false;
  }
  return true;
}

}  // namespace

TEST(Clmul, SmallCases) {
  EXPECT_EQ(clmul_portable(0b11, 0b11), u128{0b101});
  EXPECT_EQ(clmul_portable(0b1011, 0b110), oracle::clmul(0b1011, 0b110));
  EXPECT_EQ(clmul_portable(0b1011, 0b110), u128{0b111010});
  EXPECT_EQ(clmul_portable(12345, 1), u128{12345});
  EXPECT_EQ(clmul_portable(12345, 0), u128{0});
}

TEST(Clmul, PortableMatchesOracle) {
  Entropy rng(11);
  for (int i = 0; i < 20000; ++i) {
    Word a = rng(), b = rng();
    ASSERT_EQ(clmul_portable(a, b), oracle::clmul(a, b));
    ASSERT_EQ(carryless_mul(a, b), oracle::clmul(a, b));
  }
  ASSERT_EQ(clmul_portable(~Word{0}, ~Word{0}), oracle::clmul(~Word{0}, ~Word{0}));
}

#if KGEN_HAVE_PCLMUL
TEST(Clmul, HardwareMatchesPortable) {
  Entropy rng(12);
  for (int i = 0; i < 100000; ++i) {
    Word a = rng(), b = rng();
    ASSERT_EQ(clmul_hardware(a, b), clmul_portable(a, b));
  }
}
#endif

TEST(Gf2w, AddIsXor) {
  Gf2w f(4);
  EXPECT_EQ(f.add(0b1010, 0b0110), 0b1100u);
  EXPECT_EQ(f.add(7, 0), 7u);
  EXPECT_EQ(f.add(9, 9), 0u);
}

TEST(Gf2w, ReduceExamples) {
  Gf2w f(4, {4, 1, 0});
  EXPECT_EQ(f.reduce(0b10000), 0b0011u);
  EXPECT_EQ(f.reduce(clmul_portable(0b0010, 0b0010)), 0b0100u);
  for (Word z = 0; z < 16; ++z) EXPECT_EQ(f.reduce(z), z);
}

TEST(Gf2w, FullTableW4) {
  Gf2w f(4, {4, 1, 0});
  const u128 g = oracle::poly_from({4, 1, 0});
  for (Word a = 0; a < 16; ++a) {
    for (Word b = 0; b < 16; ++b) {
      ASSERT_EQ(f.mul(a, b), oracle::gf2_mul(a, b, g)) << a << "*" << b;
      ASSERT_EQ(f.mul(a, b), oracle::gf2_mul_shift(a, b, 4, 0b0011));
    }
  }
}

TEST(Gf2w, EveryWidthMatchesOracle) {
  Entropy rng(13);
  for (int w = 1; w <= 64; ++w) {
    const auto exps = default_reduction_polynomial(w);
    ASSERT_EQ(exps.front(), w);
    Gf2w f(w);
    EXPECT_EQ(f.exponents(), exps);
    const u128 g = oracle::poly_from(exps);
    const Word tail = static_cast<Word>(g ^ (static_cast<u128>(1) << w));
    for (int i = 0; i < 2000; ++i) {
      Word a = f.random(rng), b = f.random(rng);
      ASSERT_EQ(f.mul(a, b), oracle::gf2_mul(a, b, g)) << "w=" << w;
      ASSERT_EQ(f.mul(a, b), oracle::gf2_mul_shift(a, b, w, tail)) << "w=" << w;
    }
  }
}

TEST(Gf2w, DenseReductionPolynomial) {
  // Not sparse: exercises the carryless Barrett path.
  std::vector<int> exps{8, 4, 3, 1, 0};
  ASSERT_TRUE(is_irreducible_gf2(exps));
  Gf2w f(8, exps);
  const u128 g = oracle::poly_from(exps);
  for (Word a = 0; a < 256; ++a) {
    for (Word b = 0; b < 256; ++b) ASSERT_EQ(f.mul(a, b), oracle::gf2_mul(a, b, g));
  }
  std::vector<int> e64{64, 33, 30, 1, 0};
  if (is_irreducible_gf2(e64)) {
    Gf2w h(64, e64);
    Entropy rng(5);
    for (int i = 0; i < 5000; ++i) {
      Word a = rng(), b = rng();
      ASSERT_EQ(h.mul(a, b), oracle::gf2_mul(a, b, oracle::poly_from(e64)));
    }
  }
}

TEST(Gf2w, IrreducibilityAgreesWithDivision) {
  for (int w = 2; w <= 12; ++w) {
    for (int a = 1; a < w; ++a) {
      std::vector<int> tri{w, a, 0};
      EXPECT_EQ(is_irreducible_gf2(tri), irreducible_by_division(tri)) << w << "," << a;
    }
  }
  EXPECT_FALSE(is_irreducible_gf2({64, 2, 0}));  // x^64+x^2+1 = (x^32+x+1)^2
  EXPECT_TRUE(is_irreducible_gf2({64, 4, 3, 1, 0}));
}

TEST(Gf2w, RejectsReducible) {
  EXPECT_THROW(Gf2w(4, {4, 2, 0}), InvalidArgument);
  EXPECT_THROW(Gf2w(0), InvalidArgument);
  EXPECT_THROW(Gf2w(65), InvalidArgument);
}

TEST(Gf2w, FieldAxioms) {
  Entropy rng(14);
  for (int w : {1, 2, 3, 7, 8, 13, 32, 63, 64}) {
    Gf2w f(w);
    for (int i = 0; i < 500; ++i) {
      Word a = f.random(rng), b = f.random(rng), c = f.random(rng);
      ASSERT_EQ(f.mul(a, b), f.mul(b, a));
      ASSERT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
      ASSERT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
      ASSERT_EQ(f.mul(a, 1), a);
      ASSERT_EQ(f.mul(a, 0), 0u);
      if (a != 0) {
        ASSERT_EQ(f.mul(a, f.inv(a)), 1u);
      }
      ASSERT_EQ(f.pow(a, 0), 1u);
      ASSERT_EQ(f.pow(a, 1), a);
      ASSERT_EQ(f.pow(a, 3), f.mul(a, f.mul(a, a)));
      ASSERT_TRUE(f.contains(f.mul(a, b)));
    }
    EXPECT_THROW(f.inv(0), InvalidArgument);
  }
}

TEST(Gf2w, Gf4AllInverses) {
  Gf2w f(2);
  EXPECT_EQ(f.inv(1), 1u);
  EXPECT_EQ(f.mul(2, f.inv(2)), 1u);
  EXPECT_EQ(f.mul(3, f.inv(3)), 1u);
}

TEST(Gfp, SmallExamples) {
  Gfp f(7);
  EXPECT_EQ(f.mul(3, 5), 1u);
  EXPECT_EQ(f.mul(6, 1), 6u);
  EXPECT_EQ(f.add(4, 5), 2u);
  EXPECT_EQ(f.sub(2, 5), 4u);
  EXPECT_EQ(field_pow(Gfp(5), 2, 4), 1u);
  EXPECT_EQ(field_pow(Gfp(5), 3, 0), 1u);
  EXPECT_EQ(field_pow(Gfp(5), 3, 1), 3u);
}

TEST(Gfp, BarrettMatchesWideModulo) {
  const std::vector<Word> primes{2, 3, 5, 257, 65537, 2305843009213693951ull, 1152921513196781569ull,
                                 9223372036854775783ull, 4294967291ull, 4611686018427387847ull};
  Entropy rng(15);
  for (Word p : primes) {
    if (!is_prime(p)) continue;
    Gfp f(p);
    const int n = p == 2305843009213693951ull ? 1000000 : 20000;
    for (int i = 0; i < n; ++i) {
      Word a = f.random(rng), b = f.random(rng);
      ASSERT_EQ(f.mul(a, b), oracle::mod_mul(a, b, p)) << p;
    }
    const Word top = p - 1;
    ASSERT_EQ(f.mul(top, top), oracle::mod_mul(top, top, p));
  }
}

TEST(Gfp, ReduceFullRange) {
  Entropy rng(16);
  const Word p = 2305843009213693951ull;
  Gfp f(p);
  for (int i = 0; i < 100000; ++i) {
    const u128 x = static_cast<u128>(f.random(rng)) * f.random(rng);
    ASSERT_EQ(f.reduce(x), static_cast<Word>(x % p));
  }
}

TEST(Gfp, Inverse) {
  Entropy rng(17);
  for (Word p : {Word{2}, Word{3}, Word{13}, Word{1000003}, Word{9223372036854775783ull}}) {
    Gfp f(p);
    for (int i = 0; i < 200; ++i) {
      Word a = f.random(rng);
      if (a == 0) continue;
      ASSERT_EQ(f.mul(a, f.inv(a)), 1u);
    }
    EXPECT_THROW(f.inv(0), InvalidArgument);
  }
}

TEST(Gfp, RejectsNonPrimes) {
  EXPECT_THROW(Gfp(1), InvalidArgument);
  EXPECT_THROW(Gfp(9), InvalidArgument);
  EXPECT_THROW(Gfp(Word{1} << 63), InvalidArgument);
}

TEST(NumberTheory, IsPrimeMatchesTrialDivision) {
  auto slow = [](std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  };
  for (std::uint64_t n = 0; n < 20000; ++n) ASSERT_EQ(is_prime(n), slow(n)) << n;
  EXPECT_TRUE(is_prime(2305843009213693951ull));
  EXPECT_FALSE(is_prime(3215031751ull));  // strong pseudoprime to bases 2,3,5,7
  EXPECT_TRUE(is_prime(18446744073709551557ull));
}

TEST(NumberTheory, PrimeFactors) {
  EXPECT_EQ(prime_factors(12), (std::vector<std::uint64_t>{2, 3}));
  EXPECT_EQ(prime_factors(256), (std::vector<std::uint64_t>{2}));
  Entropy rng(18);
  for (int i = 0; i < 200; ++i) {
    std::uint64_t n = rng() >> (rng() % 60);
    if (n < 2) continue;
    auto fs = prime_factors(n);
    std::uint64_t rest = n;
    for (auto q : fs) {
      ASSERT_TRUE(is_prime(q));
      ASSERT_EQ(rest % q, 0u);
      while (rest % q == 0) rest /= q;
    }
    ASSERT_EQ(rest, 1u) << n;
  }
}

TEST(NumberTheory, PrimitiveElements) {
  Entropy rng(19);
  std::vector<std::uint64_t> f5{2};
  Word g5 = find_primitive_element(Gfp(5), f5, rng);
  EXPECT_TRUE(g5 == 2 || g5 == 3);
  std::vector<std::uint64_t> f7{2, 3};
  Word g7 = find_primitive_element(Gfp(7), f7, rng);
  EXPECT_TRUE(g7 == 3 || g7 == 5);
  EXPECT_EQ(find_primitive_element(Gfp(3)), 2u);
  std::vector<std::uint64_t> wrong{3};
  EXPECT_THROW(find_primitive_element(Gfp(7), wrong, rng), InvalidArgument);

  for (Word p : {Word{11}, Word{13}, Word{257}, Word{7919}}) {
    Gfp f(p);
    Word g = find_primitive_element(f);
    EXPECT_EQ(brute_order(g, p), p - 1);
    for (Word a = 1; a < std::min<Word>(p, 60); ++a) EXPECT_EQ(multiplicative_order(f, a), brute_order(a, p));
  }
  Gfp big(1152921513196781569ull);
  Word g = find_primitive_element(big);
  EXPECT_EQ(multiplicative_order(big, g), 1152921513196781568ull);
}

TEST(FieldSpec, ParseAndPrint) {
  auto b = FieldSpec::parse("gf2w:64");
  EXPECT_TRUE(b.is_binary());
  EXPECT_EQ(b.width, 64);
  EXPECT_EQ(b.to_string(), "gf2w:64");
  EXPECT_EQ(b.element_bytes(), 8u);
  auto p = FieldSpec::parse("gfp:257");
  EXPECT_FALSE(p.is_binary());
  EXPECT_EQ(p.prime, 257u);
  EXPECT_EQ(p.to_string(), "gfp:257");
  EXPECT_EQ(p.element_bytes(), 2u);
  EXPECT_EQ(p.max_element(), 256u);
  EXPECT_EQ(FieldSpec::parse("gf2w:4").max_element(), 15u);
  EXPECT_EQ(FieldSpec::parse("gf2w:4").element_bytes(), 1u);
  for (const char* bad : {"gfp:8", "gf2w:0", "gf2w:65", "gf3:5", "", "gfp:", "gfp:x"})
    EXPECT_THROW(FieldSpec::parse(bad), InvalidArgument) << bad;
}

TEST(FieldSpec, ElementRoundTrip) {
  std::stringstream s;
  write_element(s, 0x0102030405060708ull, 8);
  write_element(s, 0xabcd, 2);
  EXPECT_EQ(s.str().substr(0, 2), std::string("\x08\x07", 2));
  EXPECT_EQ(read_element(s, 8), 0x0102030405060708ull);
  EXPECT_EQ(read_element(s, 2), 0xabcdu);
}
