#include "kgen/loadbalance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

namespace kgen {

std::vector<std::uint64_t> assign(std::span<const Task> tasks, std::uint64_t m, Generator& gen) {
  if (m == 0) throw InvalidArgument("m must be positive");
  const Period size = static_cast<Period>(gen.descriptor().field.max_element()) + 1;
  if (size % m != 0) throw InvalidArgument("m must divide the field size");
  if (gen.remaining() < tasks.size()) throw InvalidArgument("generator period too short for the workload");
  std::vector<std::uint64_t> out(tasks.size());
  std::vector<Word> values(tasks.size());
  gen.emit_batch(values);
  for (std::size_t i = 0; i < tasks.size(); ++i) out[i] = values[i] % m;
  return out;
}

namespace {

struct Event {
  double time;
  int delta;  // -1 end, +1 start
  std::uint64_t machine;
};

std::vector<Event> events_of(std::span<const Task> tasks, std::span<const std::uint64_t> machines) {
  std::vector<Event> ev;
  ev.reserve(2 * tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!(tasks[i].start < tasks[i].end)) throw InvalidArgument("task " + std::to_string(i) + " has start >= end");
    const std::uint64_t q = machines.empty() ? 0 : machines[i];
    ev.push_back({tasks[i].start, +1, q});
    ev.push_back({tasks[i].end, -1, q});
  }
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.delta < b.delta;
  });
  return ev;
}

}  // namespace

SimulationResult peak_loads(std::span<const Task> tasks, std::span<const std::uint64_t> assignment, std::uint64_t m,
                            std::uint64_t capacity) {
  if (m == 0) throw InvalidArgument("m must be positive");
  if (assignment.size() != tasks.size()) throw InvalidArgument("assignment size differs from task count");
  for (auto q : assignment) {
    if (q >= m) throw InvalidArgument("machine index out of range");
  }
  SimulationResult r;
  r.capacity = capacity;
  r.peaks.assign(m, 0);
  std::vector<std::uint64_t> load(m, 0);
  for (const Event& e : events_of(tasks, assignment)) {
    if (e.delta > 0) {
      r.peaks[e.machine] = std::max(r.peaks[e.machine], ++load[e.machine]);
    } else {
      --load[e.machine];
    }
  }
  r.global_peak = *std::max_element(r.peaks.begin(), r.peaks.end());
  r.overflow = r.global_peak > capacity;
  return r;
}

std::pair<std::uint64_t, double> max_concurrency(std::span<const Task> tasks) {
  std::uint64_t cur = 0;
  std::uint64_t best = 0;
  double when = 0;
  for (const Event& e : events_of(tasks, {})) {
    if (e.delta > 0) {
      if (++cur > best) {
        best = cur;
        when = e.time;
      }
    } else {
      --cur;
    }
  }
  return {best, when};
}

double overflow_bound(std::uint64_t m, double b, double eps, std::uint64_t t) {
  if (!(eps > 0)) throw InvalidArgument("eps must be positive");
  return 2.0 * static_cast<double>(t) * static_cast<double>(m) * std::exp(-eps * eps * b / 3.0);
}

void validate_workload(std::span<const Task> tasks, std::uint64_t m, std::uint64_t b, double eps) {
  if (!(eps > 0)) throw InvalidArgument("eps must be positive");
  const double limit = static_cast<double>(m) * static_cast<double>(b);
  std::uint64_t cur = 0;
  for (const Event& e : events_of(tasks, {})) {
    if (e.delta > 0) {
      ++cur;
      if (static_cast<double>(cur) * (1.0 + eps) >= limit) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "workload has %llu active tasks at time %.17g; need |L(x)|(1+eps) < m*b = %g",
                      static_cast<unsigned long long>(cur), e.time, limit);
        throw InvalidArgument(buf);
      }
    } else {
      --cur;
    }
  }
}

std::vector<Task> poisson_workload(std::uint64_t t, double rate, double duration, Entropy& rng) {
  if (!(rate > 0) || !(duration > 0)) throw InvalidArgument("rate and duration must be positive");
  std::exponential_distribution<double> gap(rate);
  std::vector<Task> tasks(t);
  double now = 0;
  for (auto& task : tasks) {
    now += gap(rng);
    task = {now, now + duration};
  }
  return tasks;
}

std::vector<Task> burst_workload(std::uint64_t bursts, std::uint64_t size, double duration, double gap) {
  if (!(duration > 0) || gap < 0) throw InvalidArgument("duration must be positive and gap non-negative");
  std::vector<Task> tasks;
  tasks.reserve(bursts * size);
  for (std::uint64_t i = 0; i < bursts; ++i) {
    const double start = static_cast<double>(i) * (duration + gap);
    for (std::uint64_t j = 0; j < size; ++j) tasks.push_back({start, start + duration});
  }
  return tasks;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0, 1};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ExperimentResult run_experiment(std::span<const Task> tasks, std::uint64_t m, std::uint64_t b, double eps,
                                const GeneratorPlan* plan, std::uint64_t repetitions, std::uint64_t base_seed,
                                int threads) {
  if (m == 0) throw InvalidArgument("m must be positive");
  validate_workload(tasks, m, b, eps);
  if (plan) {
    const Period size = static_cast<Period>(plan->descriptor.field.max_element()) + 1;
    if (size % m != 0) throw InvalidArgument("m must divide the field size");
  }
  ExperimentResult result;
  result.runs.resize(repetitions);

  auto one_run = [&](std::uint64_t r) {
    ExperimentRun& run = result.runs[r];
    run.run = r;
    run.seed = base_seed;
    Entropy rng = split_entropy(base_seed, r);
    std::vector<std::uint64_t> machines;
    if (plan) {
      const auto seed = random_seed(*plan, rng);
      auto gen = init(*plan, seed);
      machines = assign(tasks, m, *gen);
    } else {
      std::uniform_int_distribution<std::uint64_t> pick(0, m - 1);
      machines.resize(tasks.size());
      for (auto& q : machines) q = pick(rng);
    }
    const auto sim = peak_loads(tasks, machines, m, b);
    run.peaks = sim.peaks;
    run.overflow = sim.overflow;
  };

  const auto workers = static_cast<std::uint64_t>(std::max(1, threads));
  if (workers == 1) {
    for (std::uint64_t r = 0; r < repetitions; ++r) one_run(r);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t r = w; r < repetitions; r += workers) one_run(r);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (const auto& run : result.runs) result.overflows += run.overflow ? 1 : 0;
  result.frequency = repetitions == 0 ? 0 : static_cast<double>(result.overflows) / static_cast<double>(repetitions);
  result.bound = overflow_bound(m, static_cast<double>(b), eps, tasks.size());
  result.interval = wilson_interval(result.overflows, repetitions);
  return result;
}

std::string experiment_csv_header(std::uint64_t m) {
  std::string h = "run,seed";
  for (std::uint64_t q = 0; q < m; ++q) h += ",peak_" + std::to_string(q);
  return h + ",overflow,bound";
}

std::string experiment_csv_row(const ExperimentRun& run, double bound) {
  std::ostringstream s;
  s << run.run << ',' << run.seed;
  for (auto p : run.peaks) s << ',' << p;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", bound);
  s << ',' << (run.overflow ? 1 : 0) << ',' << buf;
  return s.str();
}

}  // namespace kgen
