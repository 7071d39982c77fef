#pragma once

#include <string>
#include <vector>

#include "kgen/expander.hpp"
#include "kgen/generator.hpp"

namespace kgen {

struct BenchConfig {
  std::size_t values = std::size_t{1} << 20;  // per repetition
  int reps = 5;
  int warmup = 1;
  std::size_t chunk = 4096;  // emit_batch size
};

double median(std::vector<double> xs);

// Median ns per emitted value. One generator is initialized and drained in
// chunks; it is re-initialized with the next seed if its period runs out.
double bench_plan_ns(const GeneratorPlan& plan, const BenchConfig& config, std::uint64_t seed = 1);

// Median ns per value of d random reads into an m-word table, with the
// indices streamed sequentially as the expander emit loop does.
double bench_random_access_ns(std::uint32_t d, std::uint64_t m, const BenchConfig& config, std::uint64_t seed = 1);

// FFT_{n} measured with fft-batch over GF(2^64) at batch size n, RA_{d,m}
// measured directly. Results are memoized per argument.
TimeModel measured_time_model(const BenchConfig& config);

struct BenchRow {
  std::string kind;
  std::uint64_t k = 0;
  std::uint64_t c = 0;
  std::uint64_t m = 0;
  std::uint32_t d = 0;
  double ns_per_value = 0;
  double fft_share_ns = 0;     // expander: FFT_{dk} / c
  double lookup_share_ns = 0;  // expander: RA_{d,m}
};

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

}  // namespace kgen
