#include "kgen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "kgen/additive_fft.hpp"
#include "kgen/coset_dft.hpp"

namespace kgen {

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::horner: return "horner";
    case GeneratorKind::fft_batch: return "fft-batch";
    case GeneratorKind::expander: return "expander";
    case GeneratorKind::cascade: return "cascade";
  }
  return "?";
}

GeneratorKind parse_kind(const std::string& text) {
  if (text == "horner") return GeneratorKind::horner;
  if (text == "fft-batch" || text == "fft") return GeneratorKind::fft_batch;
  if (text == "expander") return GeneratorKind::expander;
  if (text == "cascade") return GeneratorKind::cascade;
  throw InvalidArgument("unknown generator kind '" + text + "'");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string format_log10(double x) {
  if (x == kNegInf) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

// log10(10^a + 10^b)
double log10_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return std::min(0.0, hi + std::log10(1.0 + std::pow(10.0, lo - hi)));
}

bool is_composed(GeneratorKind k) { return k == GeneratorKind::expander || k == GeneratorKind::cascade; }

Period checked_mul(Period a, Period b) {
  if (a != 0 && b > (~Period{0}) / a) throw InvalidArgument("period overflows 128 bits");
  return a * b;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> GeneratorDescriptor::header() const {
  std::vector<std::pair<std::string, std::string>> h;
  h.emplace_back("kind", to_string(kind));
  h.emplace_back("field", field.to_string());
  h.emplace_back("k", std::to_string(k));
  h.emplace_back("period", to_string(period));
  h.emplace_back("log10_delta", format_log10(log10_delta));
  h.emplace_back("seed_field", seed_field.to_string());
  h.emplace_back("seed_length", std::to_string(seed_length));
  if (kind == GeneratorKind::fft_batch) h.emplace_back("batch", std::to_string(batch));
  if (is_composed(kind)) {
    h.emplace_back("c", std::to_string(c));
    h.emplace_back("m", std::to_string(m));
    h.emplace_back("d", std::to_string(d));
    h.emplace_back("levels", std::to_string(levels));
    h.emplace_back("base_kind", to_string(base_kind));
    h.emplace_back("base_k", std::to_string(base_k));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Plans

GeneratorPlan make_horner_plan(const FieldSpec& field, std::uint64_t k) {
  if (k == 0) throw InvalidArgument("k must be positive");
  const Period size = static_cast<Period>(field.max_element()) + 1;
  if (static_cast<Period>(k) > size) throw InvalidArgument("k exceeds the field size");
  GeneratorPlan plan;
  auto& d = plan.descriptor;
  d.kind = GeneratorKind::horner;
  d.field = field;
  d.seed_field = field;
  d.k = k;
  d.period = size;
  d.log10_delta = kNegInf;
  d.seed_length = k;
  return plan;
}

GeneratorPlan make_fft_batch_plan(const FieldSpec& field, std::uint64_t k) {
  if (k == 0) throw InvalidArgument("k must be positive");
  GeneratorPlan plan;
  auto& d = plan.descriptor;
  d.kind = GeneratorKind::fft_batch;
  d.field = field;
  d.seed_field = field;
  d.k = k;
  d.log10_delta = kNegInf;
  d.seed_length = k;
  if (field.is_binary()) {
    const std::uint64_t batch = next_power_of_two(k);
    if (log2_exact(batch) > field.width) throw InvalidArgument("k exceeds the field size");
    if (batch > (std::uint64_t{1} << 32)) throw InvalidArgument("batch too large");
    d.batch = batch;
    d.period = Period{1} << field.width;
  } else {
    const Gfp f(field.prime);
    if (!is_power_of_two(k)) throw InvalidArgument("fft-batch over GF(p) needs k a power of two");
    if ((field.prime - 1) % k != 0) throw InvalidArgument("fft-batch over GF(p) needs k to divide p - 1");
    d.batch = k;
    d.period = field.prime - 1;
    plan.omega = find_primitive_element(f);
  }
  return plan;
}

double level_log10_delta(const FieldSpec& field, std::uint64_t c, std::uint64_t m, std::uint32_t d, std::uint64_t k) {
  if (field.is_binary()) return rank_failure_bound(c, m, d, k).log10_delta;
  if (k * d > m) return 0.0;
  return unique_failure_bound(c, m, d, k).log10_delta;
}

GeneratorPlan make_composed_plan(const FieldSpec& field, std::uint64_t k, std::vector<BipartiteGraph> graphs,
                                 GeneratorPlan base, std::optional<GeneratorKind> kind) {
  if (k == 0) throw InvalidArgument("k must be positive");
  if (graphs.empty()) throw InvalidArgument("composition needs at least one graph");
  const auto& bd = base.descriptor;
  if (field.is_binary()) {
    if (!bd.field.is_binary() || bd.field.width < field.width)
      throw InvalidArgument("base field must be a binary field at least as wide as the output field");
  } else if (!(bd.field == field)) {
    throw InvalidArgument("over GF(p) the base generator must use the output field");
  }
  const std::uint64_t c = graphs[0].c();
  const std::uint64_t m = graphs[0].m();
  const std::uint32_t d = graphs[0].d();
  for (std::size_t i = 1; i < graphs.size(); ++i) {
    if (graphs[i].c() != c || graphs[i].d() != d) throw InvalidArgument("all levels must share c and d");
    if (graphs[i].m() != graphs[i - 1].left_size()) throw InvalidArgument("level sizes do not chain");
  }
  const int t = static_cast<int>(graphs.size());
  // Base independence d^t k.
  u128 need = k;
  for (int i = 0; i < t; ++i) {
    need *= d;
    if (need > (u128{1} << 64)) throw InvalidArgument("required base independence overflows");
  }
  if (static_cast<u128>(bd.k) < need)
    throw InvalidArgument("base generator must be " + to_string(need) + "-independent, has k = " + std::to_string(bd.k));
  if (bd.period < m) throw InvalidArgument("base generator period is shorter than one block of m values");

  GeneratorPlan plan;
  auto& desc = plan.descriptor;
  desc.kind = kind.value_or(t == 1 ? GeneratorKind::expander : GeneratorKind::cascade);
  if (!is_composed(desc.kind)) throw InvalidArgument("composed plan needs the expander or cascade kind");
  if (desc.kind == GeneratorKind::expander && t != 1) throw InvalidArgument("the expander kind has exactly one level");
  desc.field = field;
  desc.seed_field = bd.seed_field;
  desc.k = k;
  desc.seed_length = bd.seed_length;
  desc.c = c;
  desc.m = m;
  desc.d = d;
  desc.levels = t;
  desc.base_kind = bd.kind;
  desc.base_k = bd.k;
  desc.period = checked_mul(bd.period / m, graphs.back().left_size());

  double delta = bd.log10_delta;
  u128 target = k;
  for (int i = t; i >= 1; --i) {
    const auto& g = graphs[static_cast<std::size_t>(i - 1)];
    delta = log10_add(delta, level_log10_delta(field, g.c(), g.m(), g.d(), static_cast<std::uint64_t>(target)));
    target *= d;
  }
  desc.log10_delta = delta;

  for (auto& g : graphs) plan.graphs.push_back(std::make_shared<const BipartiteGraph>(std::move(g)));
  plan.base = std::make_shared<const GeneratorPlan>(std::move(base));
  return plan;
}

namespace {

GeneratorPlan make_base(GeneratorKind kind, const FieldSpec& field, std::uint64_t k) {
  switch (kind) {
    case GeneratorKind::horner: return make_horner_plan(field, k);
    case GeneratorKind::fft_batch: return make_fft_batch_plan(field, k);
    default: throw InvalidArgument("base generator must be horner or fft-batch");
  }
}

}  // namespace

GeneratorPlan build_expander_plan(const FieldSpec& field, std::uint64_t k, std::uint64_t c, std::uint64_t m,
                                  std::uint32_t d, GeneratorKind inner_kind, Entropy& rng,
                                  std::optional<FieldSpec> inner_field) {
  if (k == 0 || d == 0) throw InvalidArgument("k and d must be positive");
  GeneratorPlan base = make_base(inner_kind, inner_field.value_or(field), k * d);
  std::vector<BipartiteGraph> graphs;
  graphs.push_back(sample_graph(c, m, d, rng));
  return make_composed_plan(field, k, std::move(graphs), std::move(base), GeneratorKind::expander);
}

GeneratorPlan build_cascade_plan(const FieldSpec& field, std::uint64_t k, std::uint64_t c, std::uint32_t d, int t,
                                 GeneratorKind base_kind, Entropy& rng, std::optional<std::uint64_t> m,
                                 std::optional<FieldSpec> inner_field) {
  if (k == 0 || d == 0 || c == 0) throw InvalidArgument("k, c and d must be positive");
  if (t < 0 || t > 8) throw InvalidArgument("cascade depth must be in [0, 8]");
  u128 base_k = k;
  for (int i = 0; i < t; ++i) {
    base_k *= d;
    if (base_k > (u128{1} << 62)) throw InvalidArgument("cascade independence overflows");
  }
  GeneratorPlan base = make_base(base_kind, inner_field.value_or(field), static_cast<std::uint64_t>(base_k));
  if (t == 0) return base;
  const std::uint64_t right = m.value_or(next_power_of_two(static_cast<std::uint64_t>(base_k)));
  std::vector<BipartiteGraph> graphs;
  std::uint64_t level_m = right;
  for (int i = 1; i <= t; ++i) {
    graphs.push_back(sample_graph(c, level_m, d, rng));
    level_m *= c;
  }
  return make_composed_plan(field, k, std::move(graphs), std::move(base), GeneratorKind::cascade);
}

// ---------------------------------------------------------------------------
// Runtime

namespace {

template <class F>
class HornerGenerator final : public Generator {
 public:
  HornerGenerator(GeneratorDescriptor d, F field, std::vector<Word> coeffs)
      : Generator(std::move(d)), field_(std::move(field)), coeffs_(std::move(coeffs)) {}

 protected:
  std::size_t fill(Word* out, std::size_t n) override {
    const Period period = descriptor().period;
    const std::size_t k = coeffs_.size();
    std::size_t i = 0;
    for (; i < n && next_ < period; ++i, ++next_) {
      const Word x = field_.element_at(static_cast<std::uint64_t>(next_));
      Word acc = coeffs_[k - 1];
      for (std::size_t j = k - 1; j-- > 0;) acc = field_.add(field_.mul(acc, x), coeffs_[j]);
      out[i] = acc;
    }
    return i;
  }

 private:
  F field_;
  std::vector<Word> coeffs_;
  Period next_ = 0;
};

// Shared batch cursor: subclasses refill `buf_` one batch at a time.
class BatchGenerator : public Generator {
 protected:
  using Generator::Generator;
  // Loads the next batch into buf_; false at the end of the period.
  virtual bool next_batch() = 0;

  std::size_t fill(Word* out, std::size_t n) override {
    std::size_t produced = 0;
    while (produced < n) {
      if (cursor_ == buf_.size()) {
        if (!next_batch()) break;
        cursor_ = 0;
      }
      const std::size_t chunk = std::min(n - produced, buf_.size() - cursor_);
      std::copy_n(buf_.data() + cursor_, chunk, out + produced);
      cursor_ += chunk;
      produced += chunk;
    }
    return produced;
  }

  std::vector<Word> buf_;
  std::size_t cursor_ = 0;
};

class AdditiveBatchGenerator final : public BatchGenerator {
 public:
  AdditiveBatchGenerator(GeneratorDescriptor d, Gf2w field, std::vector<Word> coeffs)
      : BatchGenerator(std::move(d)),
        fft_(field, log2_exact(descriptor().batch)),
        coeffs_(std::move(coeffs)),
        batches_(descriptor().period / descriptor().batch) {
    buf_.resize(fft_.size());
    materialize();
  }

 protected:
  bool next_batch() override {
    if (index_ + 1 >= batches_) return false;
    ++index_;
    materialize();
    return true;
  }

 private:
  void materialize() {
    const int s = fft_.log_size();
    const std::uint64_t j = static_cast<std::uint64_t>(index_);
    const Word shift = s >= 64 ? 0 : (j ^ (j >> 1)) << s;
    fft_.transform(coeffs_, shift, buf_, scratch_);
    cursor_ = 0;
  }

  AdditiveFft<Gf2w> fft_;
  std::vector<Word> coeffs_;
  std::vector<Word> scratch_;
  Period batches_;
  Period index_ = 0;
};

class CosetBatchGenerator final : public BatchGenerator {
 public:
  CosetBatchGenerator(GeneratorDescriptor d, Gfp field, Word omega, std::vector<Word> coeffs)
      : BatchGenerator(std::move(d)), dft_(field, descriptor().batch, omega), coeffs_(std::move(coeffs)) {
    buf_.resize(dft_.size());
    dft_.evaluate(coeffs_, buf_);
  }

 protected:
  bool next_batch() override {
    if (!dft_.advance()) return false;
    dft_.evaluate(coeffs_, buf_);
    return true;
  }

 private:
  CosetDft dft_;
  std::vector<Word> coeffs_;
};

struct XorSum {
  Word operator()(Word a, Word b) const { return a ^ b; }
};

struct ModSum {
  Word p;
  Word operator()(Word a, Word b) const {
    const Word s = a + b;
    return s >= p ? s - p : s;
  }
};

// out[v] = sum over the padded row of left vertex first + v; pads index the
// zero sentinel at table[m].
template <int D, class Sum>
void sum_rows_fixed(const std::uint32_t* rows, const Word* table, std::size_t count, Word* out, Sum sum) {
  for (std::size_t v = 0; v < count; ++v) {
    const std::uint32_t* r = rows + v * D;
    Word acc = table[r[0]];
    for (int j = 1; j < D; ++j) acc = sum(acc, table[r[j]]);
    out[v] = acc;
  }
}

template <class Sum>
void sum_rows(const BipartiteGraph& g, std::uint64_t first, const Word* table, std::size_t count, Word* out, Sum sum) {
  const std::uint32_t* rows = g.row(first);
  switch (g.d()) {
    case 1: return sum_rows_fixed<1>(rows, table, count, out, sum);
    case 2: return sum_rows_fixed<2>(rows, table, count, out, sum);
    case 4: return sum_rows_fixed<4>(rows, table, count, out, sum);
    case 8: return sum_rows_fixed<8>(rows, table, count, out, sum);
    case 16: return sum_rows_fixed<16>(rows, table, count, out, sum);
    default: break;
  }
  const std::uint32_t d = g.d();
  for (std::size_t v = 0; v < count; ++v) {
    const std::uint32_t* r = rows + v * d;
    Word acc = table[r[0]];
    for (std::uint32_t j = 1; j < d; ++j) acc = sum(acc, table[r[j]]);
    out[v] = acc;
  }
}

template <class Sum>
class ComposedGenerator final : public Generator {
 public:
  ComposedGenerator(GeneratorDescriptor d, std::unique_ptr<Generator> base,
                    std::vector<std::shared_ptr<const BipartiteGraph>> graphs, Word mask, Sum sum)
      : Generator(std::move(d)), base_(std::move(base)), graphs_(std::move(graphs)), mask_(mask), sum_(sum) {
    const auto& desc = descriptor();
    blocks_left_ = base_->descriptor().period / desc.m;
    // Level i table (i < t) has graphs_[i]->m() entries plus the sentinel.
    for (const auto& g : graphs_) tables_.emplace_back(g->m() + 1, Word{0});
    left_ = graphs_.back()->left_size();
    cursor_ = left_;
    refill();
  }

 protected:
  std::size_t fill(Word* out, std::size_t n) override {
    std::size_t produced = 0;
    const BipartiteGraph& last = *graphs_.back();
    const Word* table = tables_.back().data();
    while (produced < n) {
      if (cursor_ == left_ && !refill()) break;
      const std::size_t chunk = static_cast<std::size_t>(std::min<std::uint64_t>(n - produced, left_ - cursor_));
      sum_rows(last, cursor_, table, chunk, out + produced, sum_);
      cursor_ += chunk;
      produced += chunk;
    }
    return produced;
  }

 private:
  bool refill() {
    if (blocks_left_ == 0) return false;
    auto& t0 = tables_[0];
    const std::size_t m = t0.size() - 1;
    if (base_->emit_batch(std::span<Word>(t0.data(), m)) != m) return false;
    if (mask_ != ~Word{0}) {
      for (std::size_t i = 0; i < m; ++i) t0[i] &= mask_;
    }
    for (std::size_t i = 1; i < tables_.size(); ++i) {
      const BipartiteGraph& g = *graphs_[i - 1];
      sum_rows(g, 0, tables_[i - 1].data(), static_cast<std::size_t>(g.left_size()), tables_[i].data(), sum_);
    }
    --blocks_left_;
    cursor_ = 0;
    return true;
  }

  std::unique_ptr<Generator> base_;
  std::vector<std::shared_ptr<const BipartiteGraph>> graphs_;
  std::vector<std::vector<Word>> tables_;
  Word mask_;
  Sum sum_;
  Period blocks_left_ = 0;
  std::uint64_t left_ = 0;
  std::uint64_t cursor_ = 0;
};

}  // namespace

std::unique_ptr<Generator> init(const GeneratorPlan& plan, std::span<const Word> seed) {
  const auto& d = plan.descriptor;
  if (seed.size() != d.seed_length)
    throw InvalidArgument("seed has " + std::to_string(seed.size()) + " elements, expected " +
                          std::to_string(d.seed_length));
  const Word top = d.seed_field.max_element();
  for (Word s : seed) {
    if (s > top) throw InvalidArgument("seed element outside " + d.seed_field.to_string());
  }
  std::vector<Word> coeffs(seed.begin(), seed.end());
  switch (d.kind) {
    case GeneratorKind::horner:
      if (d.field.is_binary()) return std::make_unique<HornerGenerator<Gf2w>>(d, binary_field(d.field.width), std::move(coeffs));
      return std::make_unique<HornerGenerator<Gfp>>(d, Gfp(d.field.prime), std::move(coeffs));
    case GeneratorKind::fft_batch:
      if (d.field.is_binary()) return std::make_unique<AdditiveBatchGenerator>(d, binary_field(d.field.width), std::move(coeffs));
      return std::make_unique<CosetBatchGenerator>(d, Gfp(d.field.prime), plan.omega, std::move(coeffs));
    case GeneratorKind::expander:
    case GeneratorKind::cascade: {
      if (!plan.base) throw InvalidArgument("composed plan without a base");
      auto base = init(*plan.base, seed);
      if (d.field.is_binary()) {
        return std::make_unique<ComposedGenerator<XorSum>>(d, std::move(base), plan.graphs, d.field.max_element(),
                                                           XorSum{});
      }
      return std::make_unique<ComposedGenerator<ModSum>>(d, std::move(base), plan.graphs, ~Word{0},
                                                         ModSum{d.field.prime});
    }
  }
  throw InvalidArgument("unknown generator kind");
}

std::vector<Word> random_seed(const GeneratorPlan& plan, Entropy& rng) {
  const auto& d = plan.descriptor;
  std::vector<Word> seed(d.seed_length);
  if (d.seed_field.is_binary()) {
    const Gf2w& f = binary_field(d.seed_field.width);
    for (auto& s : seed) s = f.random(rng);
  } else {
    const Gfp f(d.seed_field.prime);
    for (auto& s : seed) s = f.random(rng);
  }
  return seed;
}

}  // namespace kgen
