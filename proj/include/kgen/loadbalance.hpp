#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgen/generator.hpp"

namespace kgen {

// Half-open interval [start, end).
struct Task {
  double start = 0;
  double end = 0;
};

// machine(i) = i-th emitted value mod m. Requires m | |F| so the reduction is
// exactly uniform, and enough remaining period for every task.
std::vector<std::uint64_t> assign(std::span<const Task> tasks, std::uint64_t m, Generator& gen);

struct SimulationResult {
  std::vector<std::uint64_t> peaks;  // per machine
  std::uint64_t global_peak = 0;
  std::uint64_t capacity = 0;
  bool overflow = false;  // some machine above capacity at some time
};

// Sweeps the <= 2t endpoints; at equal times ends are processed before
// starts.
SimulationResult peak_loads(std::span<const Task> tasks, std::span<const std::uint64_t> assignment, std::uint64_t m,
                            std::uint64_t capacity);

// Largest number of simultaneously active tasks, and the first time it is
// reached.
std::pair<std::uint64_t, double> max_concurrency(std::span<const Task> tasks);

// 2 t m exp(-eps^2 b / 3).
double overflow_bound(std::uint64_t m, double b, double eps, std::uint64_t t);

// Throws InvalidArgument naming the first time x with |L(x)| (1 + eps) >= m b.
void validate_workload(std::span<const Task> tasks, std::uint64_t m, std::uint64_t b, double eps);

// Fixed-duration tasks with exponential inter-arrival times.
std::vector<Task> poisson_workload(std::uint64_t t, double rate, double duration, Entropy& rng);
// `bursts` groups of `size` identical intervals, consecutive groups disjoint.
std::vector<Task> burst_workload(std::uint64_t bursts, std::uint64_t size, double duration, double gap);

struct ExperimentRun {
  std::uint64_t run = 0;
  std::uint64_t seed = 0;  // base seed; the run draws from split_entropy(seed, run)
  std::vector<std::uint64_t> peaks;
  bool overflow = false;
};

struct WilsonInterval {
  double low = 0;
  double high = 1;
};

// Score interval for a binomial proportion; z = 2.5758 gives 99%.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 2.5758293035489);

struct ExperimentResult {
  std::vector<ExperimentRun> runs;
  std::uint64_t overflows = 0;
  double frequency = 0;
  double bound = 0;
  WilsonInterval interval;
};

// Runs `repetitions` assignments. With a plan, run r seeds the generator from
// split_entropy(base_seed, r); without one, machines are drawn independently
// from the same stream (the fully random baseline).
ExperimentResult run_experiment(std::span<const Task> tasks, std::uint64_t m, std::uint64_t b, double eps,
                                const GeneratorPlan* plan, std::uint64_t repetitions, std::uint64_t base_seed,
                                int threads = 1);

std::string experiment_csv_header(std::uint64_t m);
std::string experiment_csv_row(const ExperimentRun& run, double bound);

}  // namespace kgen
