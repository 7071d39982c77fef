#include "kgen/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <random>

namespace kgen {

double median(std::vector<double> xs) {
  if (xs.empty()) throw InvalidArgument("median of an empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point a, Clock::time_point b) {
  return static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count());
}

// Keeps the optimizer from discarding benchmark results.
volatile Word g_sink = 0;

}  // namespace

double bench_plan_ns(const GeneratorPlan& plan, const BenchConfig& config, std::uint64_t seed) {
  if (config.values == 0 || config.reps <= 0 || config.chunk == 0) throw InvalidArgument("empty benchmark");
  std::uint64_t stream = 0;
  Entropy rng = split_entropy(seed, stream);
  auto gen = init(plan, random_seed(plan, rng));
  std::vector<Word> buf(config.chunk);

  auto drain = [&](std::size_t count) {
    Word acc = 0;
    std::size_t left = count;
    while (left > 0) {
      const std::size_t want = std::min(left, buf.size());
      std::size_t got = gen->emit_batch(std::span<Word>(buf.data(), want));
      if (got == 0) {
        rng = split_entropy(seed, ++stream);
        gen = init(plan, random_seed(plan, rng));
        continue;
      }
      acc ^= buf[got - 1];
      left -= got;
    }
    g_sink = g_sink ^ acc;
  };

  for (int w = 0; w < config.warmup; ++w) drain(config.values);
  std::vector<double> samples;
  for (int r = 0; r < config.reps; ++r) {
    const auto t0 = Clock::now();
    drain(config.values);
    const auto t1 = Clock::now();
    samples.push_back(elapsed_ns(t0, t1) / static_cast<double>(config.values));
  }
  return median(samples);
}

double bench_random_access_ns(std::uint32_t d, std::uint64_t m, const BenchConfig& config, std::uint64_t seed) {
  if (d == 0 || m == 0) throw InvalidArgument("d and m must be positive");
  Entropy rng = split_entropy(seed, 0x5241);
  std::vector<Word> table(m);
  for (auto& x : table) x = rng();
  const std::size_t values = std::min<std::size_t>(config.values, std::size_t{1} << 20);
  std::vector<std::uint32_t> idx(values * d);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(m - 1));
  for (auto& i : idx) i = pick(rng);

  auto pass = [&] {
    Word total = 0;
    for (std::size_t v = 0; v < values; ++v) {
      const std::uint32_t* r = idx.data() + v * d;
      Word acc = table[r[0]];
      for (std::uint32_t j = 1; j < d; ++j) acc ^= table[r[j]];
      total += acc;
    }
    g_sink = g_sink ^ total;
  };
  for (int w = 0; w < config.warmup; ++w) pass();
  std::vector<double> samples;
  for (int r = 0; r < std::max(1, config.reps); ++r) {
    const auto t0 = Clock::now();
    pass();
    const auto t1 = Clock::now();
    samples.push_back(elapsed_ns(t0, t1) / static_cast<double>(values));
  }
  return median(samples);
}

TimeModel measured_time_model(const BenchConfig& config) {
  struct Cache {
    std::mutex lock;
    std::map<std::uint64_t, double> fft;
    std::map<std::pair<std::uint32_t, std::uint64_t>, double> ra;
  };
  auto cache = std::make_shared<Cache>();
  TimeModel model;
  model.name = "measured";
  model.fft_ns_per_value = [cache, config](std::uint64_t n) {
    std::lock_guard<std::mutex> g(cache->lock);
    auto it = cache->fft.find(n);
    if (it != cache->fft.end()) return it->second;
    BenchConfig c = config;
    c.values = std::max<std::size_t>(config.values, 2 * next_power_of_two(n));
    const double ns = bench_plan_ns(make_fft_batch_plan(FieldSpec::binary(64), n), c);
    cache->fft.emplace(n, ns);
    return ns;
  };
  model.random_access_ns = [cache, config](std::uint32_t d, std::uint64_t m) {
    std::lock_guard<std::mutex> g(cache->lock);
    auto key = std::make_pair(d, m);
    auto it = cache->ra.find(key);
    if (it != cache->ra.end()) return it->second;
    const double ns = bench_random_access_ns(d, m, config);
    cache->ra.emplace(key, ns);
    return ns;
  };
  return model;
}

std::string bench_csv_header() { return "kind,k,c,log2_m,d,ns_per_value,fft_share_ns,lookup_share_ns"; }

std::string bench_csv_row(const BenchRow& row) {
  char buf[256];
  const bool composed = row.m != 0;
  std::string m = composed ? std::to_string(log2_exact(row.m)) : "NA";
  std::string c = composed ? std::to_string(row.c) : "NA";
  std::string d = composed ? std::to_string(row.d) : "NA";
  std::snprintf(buf, sizeof buf, "%s,%llu,%s,%s,%s,%.2f,%.2f,%.2f", row.kind.c_str(),
                static_cast<unsigned long long>(row.k), c.c_str(), m.c_str(), d.c_str(), row.ns_per_value,
                row.fft_share_ns, row.lookup_share_ns);
  return buf;
}

}  // namespace kgen
