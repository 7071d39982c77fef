#include <gtest/gtest.h>

#include <set>

#include "kgen/additive_fft.hpp"
#include "kgen/generator.hpp"
#include "oracles.hpp"

using namespace kgen;

namespace {

using Adj = std::vector<std::vector<std::uint32_t>>;

std::vector<Word> drain(Generator& g, std::size_t n) {
  std::vector<Word> out;
  while (out.size() < n) {
    auto x = g.emit();
    if (!x) break;
    out.push_back(*x);
  }
  return out;
}

std::vector<Word> stream(const GeneratorPlan& plan, const std::vector<Word>& seed, std::size_t n) {
  auto g = init(plan, seed);
  return drain(*g, n);
}

// Block b of a composed stream from the base values, by dense matrix-vector
// products level after level.
std::vector<Word> composed_oracle(const GeneratorPlan& plan, const std::vector<Word>& seed, std::size_t blocks) {
  const auto& d = plan.descriptor;
  const std::uint64_t m0 = plan.graphs.front()->m();
  auto base = stream(*plan.base, seed, blocks * m0);
  const bool binary = d.field.is_binary();
  const Word mask = d.field.max_element();
  auto add = [&](Word a, Word b) {
    return binary ? a ^ b : static_cast<Word>((static_cast<u128>(a) + b) % d.field.prime);
  };
  std::vector<Word> out;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<Word> x(base.begin() + static_cast<std::ptrdiff_t>(b * m0),
                        base.begin() + static_cast<std::ptrdiff_t>((b + 1) * m0));
    if (binary)
      for (auto& v : x) v &= mask;
    for (const auto& gp : plan.graphs) {
      auto rows = oracle::dense_rows(*gp);
      std::vector<Word> y(rows.size(), 0);
      for (std::size_t v = 0; v < rows.size(); ++v)
        for (std::size_t u = 0; u < rows[v].size(); ++u)
          if (rows[v][u]) y[v] = add(y[v], x[u]);
      x = std::move(y);
    }
    out.insert(out.end(), x.begin(), x.end());
  }
  return out;
}

}  // namespace

TEST(Kind, Names) {
  for (auto k : {GeneratorKind::horner, GeneratorKind::fft_batch, GeneratorKind::expander, GeneratorKind::cascade})
    EXPECT_EQ(parse_kind(to_string(k)), k);
  EXPECT_EQ(parse_kind("fft"), GeneratorKind::fft_batch);
  EXPECT_THROW(parse_kind("mt"), InvalidArgument);
}

TEST(Horner, Gf7FirstOutputs) {
  auto plan = make_horner_plan(FieldSpec::prime_field(7), 3);
  EXPECT_EQ(stream(plan, {1, 2, 3}, 3), (std::vector<Word>{1, 6, 3}));
  EXPECT_EQ(stream(plan, {1, 2, 3}, 100), (std::vector<Word>{1, 6, 3, 6, 1, 2, 2}));
}

TEST(Horner, ConstantAndPeriod) {
  auto plan = make_horner_plan(FieldSpec::binary(8), 1);
  auto s = stream(plan, {0x3c}, 1000);
  EXPECT_EQ(s, std::vector<Word>(256, 0x3c));
  auto g = init(plan, std::vector<Word>{1});
  std::vector<Word> buf(300);
  EXPECT_EQ(g->emit_batch(buf), 256u);
  EXPECT_EQ(g->remaining(), 0u);
  EXPECT_FALSE(g->emit().has_value());
}

TEST(Horner, MatchesOracleGf2_64) {
  auto plan = make_horner_plan(FieldSpec::binary(64), 5);
  Entropy rng(61);
  auto seed = random_seed(plan, rng);
  auto s = stream(plan, seed, 50);
  const u128 g = oracle::poly_from(default_reduction_polynomial(64));
  for (Word x = 0; x < 50; ++x) {
    ASSERT_EQ(s[x], oracle::eval_by_powers(seed, x, [&](Word a, Word b) { return oracle::gf2_mul(a, b, g); },
                                           [](Word a, Word b) { return a ^ b; }));
  }
}

TEST(Init, ValidatesSeed) {
  auto plan = make_horner_plan(FieldSpec::prime_field(7), 3);
  EXPECT_THROW(init(plan, std::vector<Word>{1, 2}), InvalidArgument);
  EXPECT_THROW(init(plan, std::vector<Word>{1, 2, 7}), InvalidArgument);
  auto b = make_horner_plan(FieldSpec::binary(4), 2);
  EXPECT_THROW(init(b, std::vector<Word>{1, 16}), InvalidArgument);
  EXPECT_THROW(make_horner_plan(FieldSpec::prime_field(3), 4), InvalidArgument);
  EXPECT_THROW(make_horner_plan(FieldSpec::prime_field(3), 0), InvalidArgument);
}

TEST(FftBatch, PrimeDivisibility) {
  EXPECT_NO_THROW(make_fft_batch_plan(FieldSpec::prime_field(257), 16));
  EXPECT_THROW(make_fft_batch_plan(FieldSpec::prime_field(257), 10), InvalidArgument);
  EXPECT_THROW(make_fft_batch_plan(FieldSpec::prime_field(13), 8), InvalidArgument);
}

TEST(FftBatch, Gf257FollowsCosets) {
  auto plan = make_fft_batch_plan(FieldSpec::prime_field(257), 16);
  EXPECT_EQ(plan.descriptor.period, 256u);
  Entropy rng(62);
  auto seed = random_seed(plan, rng);
  auto s = stream(plan, seed, 1000);
  ASSERT_EQ(s.size(), 256u);
  Gfp f(257);
  Polynomial<Gfp> h(f, seed);
  const Word w = plan.omega;
  const Word root = oracle::mod_pow(w, 16, 257);
  std::set<Word> points;
  for (std::size_t j = 0; j < 16; ++j) {
    for (std::size_t r = 0; r < 16; ++r) {
      const Word x = oracle::mod_mul(oracle::mod_pow(w, j, 257), oracle::mod_pow(root, r, 257), 257);
      points.insert(x);
      ASSERT_EQ(s[j * 16 + r], horner_eval(h, x)) << j << "," << r;
    }
  }
  EXPECT_EQ(points.size(), 256u);
}

TEST(FftBatch, Gf2_64FirstBatch) {
  auto plan = make_fft_batch_plan(FieldSpec::binary(64), 4096);
  Entropy rng(63);
  auto seed = random_seed(plan, rng);
  auto s = stream(plan, seed, 4096 * 2);
  Polynomial<Gf2w> h(Gf2w(64), seed);
  std::vector<Word> pts(8192);
  for (Word i = 0; i < 8192; ++i) pts[i] = i;  // cosets 0 and gray(1) = 1
  EXPECT_EQ(s, naive_multipoint(h, std::span<const Word>(pts)));
}

TEST(FftBatch, BinaryStreamIsPermutedHorner) {
  // Over GF(2^8) with k = 5 (batch 8), the batches walk gray-code cosets;
  // position j*8 + i is h at (gray(j) << 3) ^ i.
  auto plan = make_fft_batch_plan(FieldSpec::binary(8), 5);
  EXPECT_EQ(plan.descriptor.batch, 8u);
  Entropy rng(64);
  auto seed = random_seed(plan, rng);
  auto s = stream(plan, seed, 1000);
  ASSERT_EQ(s.size(), 256u);
  auto horner = stream(make_horner_plan(FieldSpec::binary(8), 5), seed, 256);
  for (Word j = 0; j < 32; ++j)
    for (Word i = 0; i < 8; ++i) ASSERT_EQ(s[j * 8 + i], horner[((j ^ (j >> 1)) << 3) ^ i]);
}

TEST(Emit, BatchEqualsSingles) {
  Entropy rng(65);
  std::vector<GeneratorPlan> plans{make_horner_plan(FieldSpec::binary(16), 7), make_fft_batch_plan(FieldSpec::binary(16), 7),
                                   make_fft_batch_plan(FieldSpec::prime_field(257), 8),
                                   build_expander_plan(FieldSpec::binary(16), 4, 4, 64, 4, GeneratorKind::fft_batch, rng)};
  for (const auto& plan : plans) {
    auto seed = random_seed(plan, rng);
    auto a = init(plan, seed);
    auto b = init(plan, seed);
    std::vector<Word> got;
    for (std::size_t chunk : {1, 3, 7, 64, 255, 1000}) {
      std::vector<Word> buf(chunk);
      std::size_t n = b->emit_batch(buf);
      got.insert(got.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n));
    }
    auto single = drain(*a, got.size());
    EXPECT_EQ(single, got) << to_string(plan.descriptor.kind);
    EXPECT_EQ(a->emitted(), b->emitted());
  }
}

TEST(Emit, Deterministic) {
  Entropy rng(66);
  auto plan = build_expander_plan(FieldSpec::binary(64), 8, 4, 256, 4, GeneratorKind::fft_batch, rng);
  auto seed = random_seed(plan, rng);
  EXPECT_EQ(stream(plan, seed, 5000), stream(plan, seed, 5000));
}

TEST(Expander, IdentityGraphPassesThrough) {
  const FieldSpec f = FieldSpec::binary(8);
  std::vector<BipartiteGraph> gs;
  Adj adj(16);
  for (std::uint32_t v = 0; v < 16; ++v) adj[v] = {v};
  gs.emplace_back(1, 16, 1, adj);
  auto base = make_horner_plan(f, 3);
  auto plan = make_composed_plan(f, 3, gs, base);
  EXPECT_EQ(plan.descriptor.kind, GeneratorKind::expander);
  std::vector<Word> seed{5, 7, 9};
  EXPECT_EQ(stream(plan, seed, 300), stream(base, seed, 300));
}

TEST(Expander, MatrixVectorOracle) {
  Entropy rng(67);
  for (auto field : {FieldSpec::binary(16), FieldSpec::binary(64), FieldSpec::prime_field(257)}) {
    auto plan = build_expander_plan(field, 2, 4, 32, 3, GeneratorKind::horner, rng);
    auto seed = random_seed(plan, rng);
    auto expect = composed_oracle(plan, seed, 3);
    EXPECT_EQ(stream(plan, seed, expect.size()), expect) << field.to_string();
  }
}

TEST(Expander, TruncatedInnerField) {
  Entropy rng(68);
  auto plan = build_expander_plan(FieldSpec::binary(4), 2, 4, 64, 4, GeneratorKind::horner, rng, FieldSpec::binary(8));
  EXPECT_EQ(plan.descriptor.seed_field, FieldSpec::binary(8));
  EXPECT_EQ(plan.descriptor.period, 1024u);
  auto seed = random_seed(plan, rng);
  auto s = stream(plan, seed, 5000);
  ASSERT_EQ(s.size(), 1024u);
  for (Word x : s) ASSERT_LT(x, 16u);
  EXPECT_EQ(s, composed_oracle(plan, seed, 4));
}

TEST(Expander, PeriodAndDelta) {
  Entropy rng(69);
  auto plan = build_expander_plan(FieldSpec::binary(16), 8, 16, 1024, 8, GeneratorKind::fft_batch, rng);
  EXPECT_EQ(plan.descriptor.period, Period{16} << 16);
  EXPECT_EQ(plan.descriptor.log10_delta, rank_failure_bound(16, 1024, 8, 8).log10_delta);
  auto p = build_expander_plan(FieldSpec::prime_field(65537), 4, 8, 256, 4, GeneratorKind::fft_batch, rng);
  EXPECT_EQ(p.descriptor.period, Period{8} * 65536);
  EXPECT_EQ(p.descriptor.log10_delta, unique_failure_bound(8, 256, 4, 4).log10_delta);
  auto h = build_expander_plan(FieldSpec::prime_field(257), 2, 2, 256, 2, GeneratorKind::horner, rng);
  // 257 base values: one full block of 256, the last value is dropped.
  EXPECT_EQ(h.descriptor.period, 512u);
  auto seed = random_seed(h, rng);
  EXPECT_EQ(stream(h, seed, 1000).size(), 512u);
}

TEST(Expander, RejectsMismatches) {
  Entropy rng(70);
  EXPECT_THROW(build_expander_plan(FieldSpec::binary(8), 4, 4, 512, 4, GeneratorKind::horner, rng), InvalidArgument);
  std::vector<BipartiteGraph> gs{sample_graph(2, 16, 2, rng)};
  EXPECT_THROW(make_composed_plan(FieldSpec::binary(8), 4, gs, make_horner_plan(FieldSpec::binary(8), 7)),
               InvalidArgument);
  EXPECT_THROW(make_composed_plan(FieldSpec::binary(8), 2, gs, make_horner_plan(FieldSpec::binary(4), 4)),
               InvalidArgument);
  EXPECT_THROW(make_composed_plan(FieldSpec::prime_field(17), 2, gs, make_horner_plan(FieldSpec::binary(8), 4)),
               InvalidArgument);
  std::vector<BipartiteGraph> broken{sample_graph(2, 16, 2, rng), sample_graph(2, 16, 2, rng)};
  EXPECT_THROW(make_composed_plan(FieldSpec::binary(8), 2, broken, make_horner_plan(FieldSpec::binary(8), 8)),
               InvalidArgument);
}

TEST(Cascade, DepthZeroIsBase) {
  Entropy rng(71);
  auto plan = build_cascade_plan(FieldSpec::binary(16), 4, 4, 2, 0, GeneratorKind::fft_batch, rng);
  EXPECT_EQ(plan.descriptor.kind, GeneratorKind::fft_batch);
  EXPECT_EQ(plan.descriptor.k, 4u);
}

TEST(Cascade, DepthOneMatchesExpander) {
  Entropy rng(72);
  const FieldSpec f = FieldSpec::binary(16);
  std::vector<BipartiteGraph> gs{sample_graph(4, 64, 4, rng)};
  auto e = make_composed_plan(f, 4, gs, make_fft_batch_plan(f, 16));
  auto c = make_composed_plan(f, 4, gs, make_fft_batch_plan(f, 16), GeneratorKind::cascade);
  EXPECT_EQ(c.descriptor.kind, GeneratorKind::cascade);
  auto seed = random_seed(e, rng);
  EXPECT_EQ(stream(e, seed, 3000), stream(c, seed, 3000));
  EXPECT_EQ(e.descriptor.log10_delta, c.descriptor.log10_delta);
}

TEST(Cascade, TwoLevelsMatchOracle) {
  Entropy rng(73);
  for (auto field : {FieldSpec::binary(16), FieldSpec::prime_field(257)}) {
    auto plan = build_cascade_plan(field, 2, 2, 2, 2, GeneratorKind::fft_batch, rng);
    ASSERT_EQ(plan.descriptor.levels, 2);
    ASSERT_EQ(plan.graphs[0]->m(), 8u);
    ASSERT_EQ(plan.graphs[1]->m(), 16u);
    EXPECT_EQ(plan.descriptor.base_k, 8u);
    auto seed = random_seed(plan, rng);
    auto expect = composed_oracle(plan, seed, 5);
    EXPECT_EQ(stream(plan, seed, expect.size()), expect) << field.to_string();
    EXPECT_EQ(plan.descriptor.period, plan.graphs.back()->left_size() * (plan.base->descriptor.period / 8));
  }
}

TEST(Cascade, DeltaSumsLevels) {
  Entropy rng(74);
  auto plan = build_cascade_plan(FieldSpec::binary(64), 4, 16, 8, 2, GeneratorKind::fft_batch, rng, 1u << 12);
  const double a = rank_failure_bound(16, 1u << 12, 8, 32).log10_raw;
  const double b = rank_failure_bound(16, 1u << 16, 8, 4).log10_raw;
  EXPECT_NEAR(plan.descriptor.log10_delta, std::min(0.0, std::log10(std::pow(10.0, a) + std::pow(10.0, b))), 1e-9);
}

TEST(Descriptor, Header) {
  Entropy rng(75);
  auto plan = build_expander_plan(FieldSpec::binary(64), 8, 4, 256, 4, GeneratorKind::fft_batch, rng);
  auto h = plan.descriptor.header();
  std::vector<std::string> keys;
  for (auto& [k, v] : h) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"kind", "field", "k", "period", "log10_delta", "seed_field", "seed_length", "c",
                                            "m", "d", "levels", "base_kind", "base_k"}));
  EXPECT_EQ(h[3].second, "73786976294838206464");  // 4 * 2^64
  EXPECT_EQ(make_horner_plan(FieldSpec::binary(4), 2).descriptor.header()[4].second, "-inf");
}
