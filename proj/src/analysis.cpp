#include "kgen/analysis.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace kgen {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::exact_pass: return "exact-pass";
    case Verdict::exact_fail: return "exact-fail";
    case Verdict::screen_pass: return "screen-pass";
    case Verdict::screen_fail: return "screen-fail";
  }
  return "?";
}

std::string IndependenceReport::to_json() const {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(verdict);
  j["method"] = method;
  j["k"] = k;
  j["n"] = n;
  j["positions_examined"] = positions_examined;
  j["positions_capped"] = positions_capped;
  j["seeds"] = seeds;
  j["statistic"] = statistic;
  if (method == "chi-square") j["threshold"] = threshold;
  if (!witness.empty()) j["witness"] = witness;
  return j.dump();
}

StreamSource plan_source(const GeneratorPlan& plan) {
  StreamSource s;
  s.seed_field = plan.descriptor.seed_field;
  s.seed_length = plan.descriptor.seed_length;
  s.out_field = plan.descriptor.field;
  s.produce = [plan](std::span<const Word> seed, std::span<Word> out) {
    auto gen = init(plan, seed);
    return gen->emit_batch(out);
  };
  return s;
}

namespace {

Period field_count(const FieldSpec& f) { return static_cast<Period>(f.max_element()) + 1; }

// q^e, saturating at 2^127.
Period saturating_pow(Period q, std::uint64_t e) {
  Period r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (r > (Period{1} << 127) / q) return Period{1} << 127;
    r *= q;
  }
  return r;
}

// Calls fn on k-subsets of [0, n) in lexicographic order until fn returns
// false or `cap` subsets were visited. Returns the visit count; `capped`
// is set when the cap cut the sweep short.
template <class Fn>
std::uint64_t for_each_subset(std::uint64_t n, std::uint64_t k, std::uint64_t cap, bool& capped, Fn&& fn) {
  capped = false;
  if (k == 0 || k > n) return 0;
  std::vector<std::uint64_t> idx(k);
  for (std::uint64_t i = 0; i < k; ++i) idx[i] = i;
  std::uint64_t visited = 0;
  for (;;) {
    if (visited == cap) {
      capped = true;
      return visited;
    }
    ++visited;
    if (!fn(std::span<const std::uint64_t>(idx))) return visited;
    std::uint64_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return visited;
    ++idx[pos - 1];
    for (std::uint64_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

void check_k_n(std::uint64_t k, std::uint64_t n) {
  if (k == 0) throw InvalidArgument("k must be positive");
  if (k > n) throw InvalidArgument("k exceeds the number of stream positions");
}

}  // namespace

IndependenceReport exhaustive_independence_check(const StreamSource& source, std::uint64_t k, std::uint64_t n,
                                                 const ExhaustiveOptions& options) {
  check_k_n(k, n);
  const Period qs = field_count(source.seed_field);
  const Period qo = field_count(source.out_field);
  const Period seed_space = saturating_pow(qs, source.seed_length);
  if (seed_space > options.max_seeds) {
    throw GuardExceeded("exhaustive check needs " + to_string(seed_space) + " seeds (" + source.seed_field.to_string() +
                        "^" + std::to_string(source.seed_length) + "), limit " + std::to_string(options.max_seeds));
  }
  const Period cells = saturating_pow(qo, k);
  if (cells > options.max_cells) {
    throw GuardExceeded("exhaustive check needs " + to_string(cells) + " histogram cells, limit " +
                        std::to_string(options.max_cells));
  }
  const auto seeds = static_cast<std::uint64_t>(seed_space);
  if (static_cast<double>(seeds) * static_cast<double>(n) > 2e8) {
    throw GuardExceeded("exhaustive check would materialize " + std::to_string(seeds) + " x " + std::to_string(n) +
                        " values");
  }

  // streams[s * n + i]: value i of the stream seeded by the s-th seed in
  // mixed-radix order.
  std::vector<Word> streams(seeds * n);
  std::vector<Word> seed(source.seed_length, 0);
  std::uint64_t produced = n;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    std::uint64_t rest = s;
    for (auto& e : seed) {
      e = static_cast<Word>(rest % static_cast<std::uint64_t>(qs));
      rest /= static_cast<std::uint64_t>(qs);
    }
    produced = std::min<std::uint64_t>(produced, source.produce(seed, std::span<Word>(streams.data() + s * n, n)));
  }
  if (produced < n) {
    // Period shorter than the request: restrict to the common prefix.
    std::vector<Word> trimmed(seeds * produced);
    for (std::uint64_t s = 0; s < seeds; ++s)
      std::copy_n(streams.data() + s * n, produced, trimmed.data() + s * produced);
    streams.swap(trimmed);
    n = produced;
    check_k_n(k, n);
  }

  IndependenceReport report;
  report.method = "enumeration";
  report.k = k;
  report.n = n;
  report.seeds = seeds;
  const auto ncells = static_cast<std::uint64_t>(cells);
  const auto q = static_cast<std::uint64_t>(qo);
  const double expected = static_cast<double>(seeds) / static_cast<double>(ncells);
  const bool divisible = seeds % ncells == 0;
  std::vector<std::uint32_t> counts(ncells);
  bool ok = true;
  report.positions_examined = for_each_subset(n, k, options.max_position_sets, report.positions_capped,
                                              [&](std::span<const std::uint64_t> pos) {
    std::fill(counts.begin(), counts.end(), 0u);
    for (std::uint64_t s = 0; s < seeds; ++s) {
      const Word* row = streams.data() + s * n;
      std::uint64_t cell = 0;
      for (std::size_t j = pos.size(); j-- > 0;) cell = cell * q + row[pos[j]];
      ++counts[cell];
    }
    double worst = 0;
    for (auto c : counts) worst = std::max(worst, std::abs(static_cast<double>(c) - expected));
    report.statistic = std::max(report.statistic, worst);
    if (!divisible || worst != 0) {
      ok = false;
      report.witness.assign(pos.begin(), pos.end());
      return false;
    }
    return true;
  });
  report.verdict = ok ? Verdict::exact_pass : Verdict::exact_fail;
  return report;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Word> run_stream(const StreamSource& source, std::span<const Word> seed, std::uint64_t n) {
  std::vector<Word> out(n);
  const std::size_t got = source.produce(seed, out);
  out.resize(got);
  return out;
}

// Rank over F_2 of rows stored as `words` 64-bit words each.
std::uint64_t gf2_rows_rank(std::vector<std::uint64_t>& rows, std::size_t words) {
  const std::size_t count = rows.size() / words;
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t* row = rows.data() + i * words;
    std::size_t t = 0;
    while (t < words && row[t] == 0) ++t;
    if (t == words) continue;
    const std::uint64_t bit = row[t] & (~row[t] + 1);
    for (std::size_t j = i + 1; j < count; ++j) {
      std::uint64_t* other = rows.data() + j * words;
      if (other[t] & bit) {
        for (std::size_t u = t; u < words; ++u) other[u] ^= row[u];
      }
    }
    ++rank;
  }
  return rank;
}

std::uint64_t gfp_rows_rank(const Gfp& f, std::vector<Word>& rows, std::size_t cols) {
  const std::size_t count = rows.size() / cols;
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < count; ++i) {
    Word* row = rows.data() + i * cols;
    std::size_t t = 0;
    while (t < cols && row[t] == 0) ++t;
    if (t == cols) continue;
    const Word inv = f.inv(row[t]);
    for (std::size_t j = i + 1; j < count; ++j) {
      Word* other = rows.data() + j * cols;
      if (other[t] == 0) continue;
      const Word factor = f.mul(other[t], inv);
      for (std::size_t u = t; u < cols; ++u) other[u] = f.sub(other[u], f.mul(factor, row[u]));
    }
    ++rank;
  }
  return rank;
}

}  // namespace

IndependenceReport linear_independence_check(const StreamSource& source, std::uint64_t k, std::uint64_t n,
                                             Entropy& rng, std::uint64_t linearity_trials,
                                             const ExhaustiveOptions& options) {
  check_k_n(k, n);
  const bool binary = source.seed_field.is_binary();
  if (binary != source.out_field.is_binary()) throw InvalidArgument("seed and output fields must share a characteristic");
  if (!binary && !(source.seed_field == source.out_field)) throw InvalidArgument("seed and output fields differ");

  const std::uint64_t L = source.seed_length;
  const int ws = binary ? source.seed_field.width : 1;
  const std::uint64_t units = L * static_cast<std::uint64_t>(ws);
  const std::vector<Word> zero_seed(L, 0);
  const std::vector<Word> base = run_stream(source, zero_seed, n);
  n = base.size();
  check_k_n(k, n);

  std::optional<Gfp> fp;
  if (!binary) fp.emplace(source.seed_field.prime);
  auto diff = [&](Word a, Word b) { return binary ? a ^ b : fp->sub(a, b); };

  // response[u * n + i]: change of value i caused by seed basis vector u.
  std::vector<Word> response(units * n);
  for (std::uint64_t u = 0; u < units; ++u) {
    std::vector<Word> seed(L, 0);
    seed[u / static_cast<std::uint64_t>(ws)] = binary ? Word{1} << (u % static_cast<std::uint64_t>(ws)) : Word{1};
    const auto out = run_stream(source, seed, n);
    for (std::uint64_t i = 0; i < n; ++i) response[u * n + i] = diff(out[i], base[i]);
  }

  // Affine structure on random seeds: f(a) - f(0) must equal the response
  // prediction.
  for (std::uint64_t t = 0; t < linearity_trials; ++t) {
    std::vector<Word> seed(L);
    for (auto& e : seed) {
      if (binary) {
        e = binary_field(source.seed_field.width).random(rng);
      } else {
        e = fp->random(rng);
      }
    }
    const auto out = run_stream(source, seed, n);
    for (std::uint64_t i = 0; i < n; ++i) {
      Word predicted = base[i];
      for (std::uint64_t u = 0; u < units; ++u) {
        const std::uint64_t e = u / static_cast<std::uint64_t>(ws);
        if (binary) {
          if ((seed[e] >> (u % static_cast<std::uint64_t>(ws))) & 1) predicted ^= response[u * n + i];
        } else {
          predicted = fp->add(predicted, fp->mul(seed[e], response[u * n + i]));
        }
      }
      if (predicted != out[i]) throw InvalidArgument("stream is not an affine function of the seed");
    }
  }

  IndependenceReport report;
  report.method = "linear-rank";
  report.k = k;
  report.n = n;
  report.seeds = units + 1 + linearity_trials;
  bool ok = true;

  if (binary) {
    const int wo = source.out_field.width;
    const std::size_t words = (units + 63) / 64;
    // rows[(i * wo + b) * words ...]: bit b of value i as a function of the seed bits.
    std::vector<std::uint64_t> rows(n * static_cast<std::uint64_t>(wo) * words, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      for (int b = 0; b < wo; ++b) {
        std::uint64_t* row = rows.data() + (i * static_cast<std::uint64_t>(wo) + static_cast<std::uint64_t>(b)) * words;
        for (std::uint64_t u = 0; u < units; ++u) {
          if ((response[u * n + i] >> b) & 1) row[u / 64] |= std::uint64_t{1} << (u % 64);
        }
      }
    }
    const std::uint64_t need = k * static_cast<std::uint64_t>(wo);
    std::vector<std::uint64_t> work(need * words);
    report.positions_examined = for_each_subset(n, k, options.max_position_sets, report.positions_capped,
                                                [&](std::span<const std::uint64_t> pos) {
      for (std::size_t j = 0; j < pos.size(); ++j) {
        const std::uint64_t* src = rows.data() + pos[j] * static_cast<std::uint64_t>(wo) * words;
        std::copy_n(src, static_cast<std::size_t>(wo) * words, work.data() + j * static_cast<std::size_t>(wo) * words);
      }
      const std::uint64_t rank = gf2_rows_rank(work, words);
      if (rank < need) {
        report.statistic = std::max(report.statistic, static_cast<double>(need - rank));
        ok = false;
        report.witness.assign(pos.begin(), pos.end());
        return false;
      }
      return true;
    });
  } else {
    std::vector<Word> work(k * units);
    report.positions_examined = for_each_subset(n, k, options.max_position_sets, report.positions_capped,
                                                [&](std::span<const std::uint64_t> pos) {
      for (std::size_t j = 0; j < pos.size(); ++j) {
        for (std::uint64_t u = 0; u < units; ++u) work[j * units + u] = response[u * n + pos[j]];
      }
      const std::uint64_t rank = gfp_rows_rank(*fp, work, units);
      if (rank < k) {
        report.statistic = std::max(report.statistic, static_cast<double>(k - rank));
        ok = false;
        report.witness.assign(pos.begin(), pos.end());
        return false;
      }
      return true;
    });
  }
  report.verdict = ok ? Verdict::exact_pass : Verdict::exact_fail;
  return report;
}

// ---------------------------------------------------------------------------

IndependenceReport chi_square_screen(const std::function<void(std::uint64_t, std::span<Word>)>& window,
                                     Period field_size, std::uint64_t k, std::uint64_t window_size,
                                     std::uint64_t trials, double alpha) {
  if (k == 0 || k > 4) throw InvalidArgument("chi-square screen supports 1 <= k <= 4");
  if (window_size < k) throw InvalidArgument("window shorter than k");
  if (trials == 0) throw InvalidArgument("trials must be positive");
  if (field_size < 2) throw InvalidArgument("field size must be at least 2");
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("alpha must be in (0, 1)");

  const std::uint64_t tuples = window_size / k;
  const std::uint64_t cells = std::uint64_t{1} << (2 * k);
  // Probability that a uniform element has low bits r.
  double marginal[4];
  for (int r = 0; r < 4; ++r) {
    const Period count = field_size / 4 + (static_cast<Period>(r) < field_size % 4 ? 1 : 0);
    marginal[r] = static_cast<double>(count) / static_cast<double>(field_size);
  }
  std::vector<double> expected(cells);
  std::uint64_t live = 0;
  for (std::uint64_t c = 0; c < cells; ++c) {
    double p = 1;
    for (std::uint64_t j = 0; j < k; ++j) p *= marginal[(c >> (2 * j)) & 3];
    expected[c] = p * static_cast<double>(trials);
    if (p > 0) ++live;
  }

  std::vector<std::uint64_t> hist(tuples * cells, 0);
  std::vector<Word> buf(window_size);
  for (std::uint64_t t = 0; t < trials; ++t) {
    window(t, buf);
    for (std::uint64_t g = 0; g < tuples; ++g) {
      std::uint64_t cell = 0;
      for (std::uint64_t j = 0; j < k; ++j) cell |= (buf[g * k + j] & 3) << (2 * j);
      ++hist[g * cells + cell];
    }
  }

  IndependenceReport report;
  report.method = "chi-square";
  report.k = k;
  report.n = window_size;
  report.seeds = trials;
  report.positions_examined = tuples;
  const double df = static_cast<double>(live - 1);
  boost::math::chi_squared dist(std::max(df, 1.0));
  report.threshold = boost::math::quantile(boost::math::complement(dist, alpha / static_cast<double>(tuples)));
  bool ok = true;
  for (std::uint64_t g = 0; g < tuples; ++g) {
    double stat = 0;
    for (std::uint64_t c = 0; c < cells; ++c) {
      const double o = static_cast<double>(hist[g * cells + c]);
      if (expected[c] == 0) {
        if (o > 0) stat = std::numeric_limits<double>::infinity();
        continue;
      }
      stat += (o - expected[c]) * (o - expected[c]) / expected[c];
    }
    report.statistic = std::max(report.statistic, stat);
    if (stat > report.threshold && ok) {
      ok = false;
      for (std::uint64_t j = 0; j < k; ++j) report.witness.push_back(g * k + j);
    }
  }
  report.verdict = ok ? Verdict::screen_pass : Verdict::screen_fail;
  return report;
}

}  // namespace kgen
