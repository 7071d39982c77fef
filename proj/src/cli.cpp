#include "kgen/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "kgen/analysis.hpp"
#include "kgen/bench.hpp"
#include "kgen/expander.hpp"
#include "kgen/loadbalance.hpp"

namespace kgen {

std::string format_element_hex(Word value, const FieldSpec& field) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%0*llx", static_cast<int>(field.hex_digits()), static_cast<unsigned long long>(value));
  return buf;
}

std::string format_seed_hex(std::span<const Word> seed, const FieldSpec& field) {
  std::string s;
  for (std::size_t i = 0; i < seed.size(); ++i) {
    if (i) s += ',';
    s += format_element_hex(seed[i], field);
  }
  return s;
}

namespace {

Word parse_hex_word(std::string text) {
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) text = text.substr(2);
  if (text.empty() || text.size() > 16) throw InvalidArgument("bad hex element '" + text + "'");
  Word v = 0;
  for (char ch : text) {
    if (!std::isxdigit(static_cast<unsigned char>(ch))) throw InvalidArgument("bad hex digit in '" + text + "'");
    v = (v << 4) | static_cast<Word>(std::isdigit(static_cast<unsigned char>(ch)) ? ch - '0' : (std::tolower(ch) - 'a' + 10));
  }
  return v;
}

}  // namespace

std::vector<Word> parse_seed_hex(const std::string& raw, const FieldSpec& field) {
  std::string text;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) text += ch;
  }
  std::vector<Word> out;
  if (text.find(',') != std::string::npos) {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_hex_word(part));
  } else {
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) text = text.substr(2);
    const std::size_t w = field.hex_digits();
    if (text.empty() || text.size() % w != 0)
      throw InvalidArgument("seed hex length must be a multiple of " + std::to_string(w) + " digits");
    for (std::size_t i = 0; i < text.size(); i += w) out.push_back(parse_hex_word(text.substr(i, w)));
  }
  const Word top = field.max_element();
  for (Word v : out) {
    if (v > top) throw InvalidArgument("seed element " + format_element_hex(v, field) + " outside " + field.to_string());
  }
  return out;
}

GeneratorPlan build_plan(const PlanOptions& o) {
  switch (o.kind) {
    case GeneratorKind::horner: return make_horner_plan(o.field, o.k);
    case GeneratorKind::fft_batch: return make_fft_batch_plan(o.field, o.k);
    case GeneratorKind::expander:
    case GeneratorKind::cascade: break;
  }
  const int t = o.kind == GeneratorKind::expander ? 1 : o.levels;
  if (o.kind == GeneratorKind::expander && o.levels != 1) throw InvalidArgument("the expander kind has one level");
  std::uint64_t m = o.m;
  if (m == 0) {
    if (!o.field.is_binary()) throw InvalidArgument("--m is required over GF(p)");
    if (t != 1) throw InvalidArgument("--m is required for cascades");
    SearchQuery q;
    q.k = o.k;
    q.cs = {o.c};
    q.ds = {o.d};
    q.m_cap = o.m_cap;
    q.log10_target = o.log10_target;
    const auto r = search_parameters(q, analytic_time_model());
    if (!r.best) throw InvalidArgument("no m <= cap meets the delta target for this (k, c, d)");
    m = std::uint64_t{1} << r.best->log2_m;
  }
  Entropy rng = split_entropy(o.graph_seed, 0x6772);
  if (o.kind == GeneratorKind::expander)
    return build_expander_plan(o.field, o.k, o.c, m, o.d, o.inner_kind, rng, o.inner_field);
  return build_cascade_plan(o.field, o.k, o.c, o.d, t, o.inner_kind, rng, m, o.inner_field);
}

namespace {

struct PlanFlags {
  std::string field = "gf2w:64";
  std::string kind = "horner";
  std::string inner_field;
  std::string inner_kind = "fft-batch";
  std::uint64_t c = 64;
  std::uint64_t m = 0;
  std::uint32_t d = 8;
  int levels = 1;
  std::uint64_t graph_seed = 1;
  double delta = 1e-7;

  // `sizes` prefixes the graph size flags where --m means something else.
  void attach(CLI::App* app, const std::string& sizes = "") {
    app->add_option("--field", field, "gf2w:<w> or gfp:<p>")->capture_default_str();
    app->add_option("--kind", kind, "horner | fft-batch | expander | cascade")->capture_default_str();
    app->add_option("--" + sizes + "c", c, "imbalance (composed kinds)")->capture_default_str();
    app->add_option("--" + sizes + "m", m, "right size (composed kinds); 0 picks the least feasible")->capture_default_str();
    app->add_option("--" + sizes + "d", d, "left degree (composed kinds)")->capture_default_str();
    app->add_option("--levels", levels, "cascade depth")->capture_default_str();
    app->add_option("--inner-field", inner_field, "base generator field (default: --field)");
    app->add_option("--inner-kind", inner_kind, "base generator kind")->capture_default_str();
    app->add_option("--graph-seed", graph_seed, "graph sampling seed")->capture_default_str();
    app->add_option("--delta", delta, "failure probability target for automatic m")->capture_default_str();
  }

  PlanOptions options(std::uint64_t k) const {
    PlanOptions o;
    o.field = FieldSpec::parse(field);
    o.kind = parse_kind(kind);
    o.k = k;
    o.c = c;
    o.m = m;
    o.d = d;
    o.levels = levels;
    if (!inner_field.empty()) o.inner_field = FieldSpec::parse(inner_field);
    o.inner_kind = parse_kind(inner_kind);
    o.graph_seed = graph_seed;
    if (!(delta > 0 && delta <= 1)) throw InvalidArgument("--delta must be in (0, 1]");
    o.log10_target = std::log10(delta);
    return o;
  }
};

void write_header(std::ostream& out, const GeneratorDescriptor& d, const std::vector<std::pair<std::string, std::string>>& extra) {
  out << "#kgen v1\n";
  for (const auto& [key, value] : d.header()) out << '#' << key << '=' << value << '\n';
  for (const auto& [key, value] : extra) out << '#' << key << '=' << value << '\n';
  out << "#end\n";
}

std::vector<Word> entropy_seed(const GeneratorPlan& plan) {
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  Entropy rng = split_entropy(s, 0);
  return random_seed(plan, rng);
}

// ---------------------------------------------------------------------------

struct GenCommand {
  PlanFlags plan;
  std::uint64_t k = 1;
  std::string seed;
  bool entropy = false;
  std::uint64_t count = 0;
  std::string out_path;
  std::string format = "bin";
  bool hex = false;
  bool header = false;

  void attach(CLI::App* app) {
    plan.attach(app);
    app->add_option("--k", k, "independence")->required();
    app->add_option("--seed", seed, "seed elements in hex");
    app->add_flag("--entropy", entropy, "draw the seed from the OS and record it in the header");
    app->add_option("--count", count, "values to emit")->required();
    app->add_option("--out", out_path, "output file (default stdout)");
    app->add_option("--format", format, "bin | hex | csv")->capture_default_str();
    app->add_flag("--hex", hex, "same as --format hex");
    app->add_flag("--header", header, "prefix a #key=value descriptor header");
    app->add_option("--threads", threads, "unused; generation is sequential");
  }
  int threads = 1;

  int run(std::ostream& stdout_, std::ostream& err) {
    if (hex) format = "hex";
    if (format != "bin" && format != "hex" && format != "csv") throw InvalidArgument("--format must be bin, hex or csv");
    if (seed.empty() == !entropy) throw InvalidArgument("give exactly one of --seed and --entropy");
    const GeneratorPlan p = build_plan(plan.options(k));
    const auto& desc = p.descriptor;
    const std::vector<Word> s = entropy ? entropy_seed(p) : parse_seed_hex(seed, desc.seed_field);
    auto gen = init(p, s);

    std::ofstream file;
    std::ostream* out = &stdout_;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) throw InvalidArgument("cannot open " + out_path);
      out = &file;
    }
    if (header || entropy) write_header(*out, desc, {{"seed", format_seed_hex(s, desc.seed_field)}});
    if (format == "csv") *out << "index,value\n";

    std::vector<Word> buf(4096);
    std::uint64_t left = count;
    std::uint64_t emitted = 0;
    const std::size_t bytes = desc.field.element_bytes();
    while (left > 0) {
      const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(left, buf.size()));
      const std::size_t got = gen->emit_batch(std::span<Word>(buf.data(), want));
      for (std::size_t i = 0; i < got; ++i) {
        if (format == "hex") *out << format_element_hex(buf[i], desc.field) << '\n';
        else if (format == "csv") *out << emitted + i << ',' << format_element_hex(buf[i], desc.field) << '\n';
        else write_element(*out, buf[i], bytes);
      }
      emitted += got;
      left -= got;
      if (got < want) {
        out->flush();
        err << "period exhausted after " << emitted << " values (requested " << count << ")\n";
        return kExitInvalid;
      }
    }
    out->flush();
    return kExitOk;
  }
};

struct SearchCommand {
  std::vector<std::uint64_t> ks;
  std::vector<std::uint64_t> cs{16, 32, 64};
  std::vector<std::uint32_t> ds{4, 8, 16};
  std::uint64_t m_cap = std::uint64_t{1} << 26;
  double delta = 1e-7;
  bool bench = false;
  bool all = false;
  int threads = 1;
  std::size_t bench_values = std::size_t{1} << 18;

  void attach(CLI::App* app) {
    app->add_option("--k", ks, "independence values (comma separated)")->required()->delimiter(',');
    app->add_option("--c", cs, "imbalance candidates")->delimiter(',')->capture_default_str();
    app->add_option("--d", ds, "degree candidates")->delimiter(',')->capture_default_str();
    app->add_option("--m-cap", m_cap, "largest m")->capture_default_str();
    app->add_option("--delta", delta, "failure probability target")->capture_default_str();
    app->add_flag("--bench", bench, "price candidates with measured FFT and lookup times");
    app->add_option("--bench-values", bench_values, "values per timing repetition")->capture_default_str();
    app->add_flag("--all", all, "print every (c, d) cell, not only the fastest");
    app->add_option("--threads", threads, "worker threads")->capture_default_str();
  }

  int run(std::ostream& out, std::ostream& err) {
    if (!(delta > 0 && delta <= 1)) throw InvalidArgument("--delta must be in (0, 1]");
    BenchConfig bc;
    bc.values = bench_values;
    bc.reps = 3;
    const TimeModel model = bench ? measured_time_model(bc) : analytic_time_model();
    out << search_csv_header() << '\n';
    bool any_infeasible = false;
    for (auto k : ks) {
      SearchQuery q;
      q.k = k;
      q.cs = cs;
      q.ds = ds;
      q.m_cap = m_cap;
      q.log10_target = std::log10(delta);
      q.threads = bench ? 1 : threads;
      const auto r = search_parameters(q, model);
      if (all) {
        for (const auto& row : r.rows) out << search_csv_row(row) << '\n';
      } else if (r.best) {
        out << search_csv_row(*r.best) << '\n';
      }
      if (!r.best) {
        any_infeasible = true;
        if (!all) {
          SearchRow none;
          none.k = k;
          out << search_csv_row(none) << '\n';
        }
        err << "k=" << k << ": no feasible (c, d) with m <= " << m_cap << '\n';
      }
    }
    return any_infeasible ? kExitFail : kExitOk;
  }
};

struct BenchCommand {
  std::vector<std::string> kinds{"horner", "fft-batch", "expander"};
  std::vector<std::uint64_t> ks{32, 64, 128, 256, 512, 1024};
  std::uint64_t c = 64;
  std::uint32_t d = 8;
  std::uint64_t m = 0;
  std::uint64_t m_cap = std::uint64_t{1} << 22;
  double delta = 1e-7;
  std::size_t values = std::size_t{1} << 18;
  int reps = 5;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--kinds", kinds, "generator kinds")->delimiter(',')->capture_default_str();
    app->add_option("--k", ks, "independence values")->delimiter(',')->capture_default_str();
    app->add_option("--c", c, "expander imbalance")->capture_default_str();
    app->add_option("--d", d, "expander degree")->capture_default_str();
    app->add_option("--m", m, "expander right size; 0 picks the least feasible")->capture_default_str();
    app->add_option("--m-cap", m_cap, "largest automatic m")->capture_default_str();
    app->add_option("--delta", delta, "failure probability target for automatic m")->capture_default_str();
    app->add_option("--values", values, "values per repetition")->capture_default_str();
    app->add_option("--reps", reps, "timed repetitions (median reported)")->capture_default_str();
    app->add_option("--seed", seed, "seed for generator seeds and graphs")->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) {
    out << bench_csv_header() << '\n';
    BenchConfig base;
    base.values = values;
    base.reps = reps;
    for (const auto& kind_text : kinds) {
      const GeneratorKind kind = parse_kind(kind_text);
      for (auto k : ks) {
        BenchRow row;
        row.kind = to_string(kind);
        row.k = k;
        BenchConfig bc = base;
        if (kind == GeneratorKind::horner) {
          bc.values = std::max<std::size_t>(1024, std::min<std::size_t>(values, (std::size_t{1} << 24) / k));
          row.ns_per_value = bench_plan_ns(make_horner_plan(FieldSpec::binary(64), k), bc, seed);
        } else if (kind == GeneratorKind::fft_batch) {
          bc.values = std::max<std::size_t>(values, 4 * next_power_of_two(k));
          row.ns_per_value = bench_plan_ns(make_fft_batch_plan(FieldSpec::binary(64), k), bc, seed);
        } else if (kind == GeneratorKind::expander) {
          PlanOptions o;
          o.kind = kind;
          o.k = k;
          o.c = c;
          o.d = d;
          o.m = m;
          o.m_cap = m_cap;
          o.log10_target = std::log10(delta);
          o.graph_seed = seed;
          const GeneratorPlan p = build_plan(o);
          row.c = c;
          row.d = d;
          row.m = p.descriptor.m;
          bc.values = std::max<std::size_t>(values, 2 * c * row.m);
          row.ns_per_value = bench_plan_ns(p, bc, seed);
          BenchConfig fc = base;
          fc.values = std::max<std::size_t>(values, 4 * next_power_of_two(d * k));
          row.fft_share_ns = bench_plan_ns(make_fft_batch_plan(FieldSpec::binary(64), d * k), fc, seed) /
                             static_cast<double>(c);
          row.lookup_share_ns = bench_random_access_ns(d, row.m, base, seed);
        } else {
          throw InvalidArgument("bench supports horner, fft-batch and expander");
        }
        out << bench_csv_row(row) << '\n';
        out.flush();
      }
    }
    return kExitOk;
  }
};

struct VerifyCommand {
  PlanFlags plan;
  std::uint64_t k = 1;
  std::uint64_t seedlen = 0;
  std::uint64_t n = 0;
  std::string method = "enumeration";
  std::uint64_t max_seeds = 10'000'000;
  std::uint64_t max_positions = 1'000'000;
  std::uint64_t trials = 20000;
  std::uint64_t window = 64;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    plan.attach(app);
    app->add_option("--k", k, "independence to verify")->required();
    app->add_option("--seedlen", seedlen, "generator parameter k (default: --k)");
    app->add_option("--n", n, "stream positions (default: min(period, 32))");
    app->add_option("--method", method, "enumeration | linear-rank | screen")->capture_default_str();
    app->add_option("--max-seeds", max_seeds, "enumeration guard")->capture_default_str();
    app->add_option("--max-positions", max_positions, "position-set cap")->capture_default_str();
    app->add_option("--trials", trials, "screen trials")->capture_default_str();
    app->add_option("--window", window, "screen window")->capture_default_str();
    app->add_option("--seed", seed, "seed for screen trials and linearity probes")->capture_default_str();
  }

  int run(std::ostream& out, std::ostream& err) {
    const GeneratorPlan p = build_plan(plan.options(seedlen == 0 ? k : seedlen));
    const auto& desc = p.descriptor;
    std::uint64_t positions = n;
    if (positions == 0) positions = desc.period < 32 ? static_cast<std::uint64_t>(desc.period) : 32;
    IndependenceReport report;
    if (method == "enumeration") {
      ExhaustiveOptions opt;
      opt.max_seeds = max_seeds;
      opt.max_position_sets = max_positions;
      try {
        report = exhaustive_independence_check(plan_source(p), k, positions, opt);
      } catch (const GuardExceeded& e) {
        err << e.what() << "; raise --max-seeds or use --method linear-rank (exact for these generators) or screen\n";
        return kExitGuard;
      }
    } else if (method == "linear-rank") {
      ExhaustiveOptions opt;
      opt.max_position_sets = max_positions;
      Entropy rng = split_entropy(seed, 0x6c72);
      report = linear_independence_check(plan_source(p), k, positions, rng, 64, opt);
    } else if (method == "screen") {
      auto fill = [&](std::uint64_t trial, std::span<Word> w) {
        Entropy rng = split_entropy(seed, trial);
        auto gen = init(p, random_seed(p, rng));
        if (gen->emit_batch(w) != w.size()) throw InvalidArgument("window longer than the period");
      };
      report = chi_square_screen(fill, static_cast<Period>(desc.field.max_element()) + 1, k, window, trials);
    } else {
      throw InvalidArgument("--method must be enumeration, linear-rank or screen");
    }
    out << report.to_json() << '\n';
    return report.passed() ? kExitOk : kExitFail;
  }
};

struct LoadBalanceCommand {
  PlanFlags plan;
  std::uint64_t k = 0;
  std::uint64_t m = 8;
  std::uint64_t b = 16;
  double eps = 0.5;
  std::string workload = "poisson";
  std::uint64_t tasks = 1000;
  double rate = 10;
  double duration = 5;
  std::uint64_t bursts = 5;
  std::uint64_t burst_size = 80;
  std::uint64_t reps = 1000;
  std::uint64_t seed = 1;
  bool baseline = false;
  int threads = 1;
  std::string out_path;

  void attach(CLI::App* app) {
    plan.kind = "fft-batch";
    plan.attach(app, "graph-");
    app->add_option("--k", k, "generator independence (default m*b)");
    app->add_option("--m", m, "machines")->capture_default_str();
    app->add_option("--b", b, "capacity per machine")->capture_default_str();
    app->add_option("--eps", eps, "slack in |L(x)|(1+eps) < m b")->capture_default_str();
    app->add_option("--workload", workload, "poisson | burst")->capture_default_str();
    app->add_option("--tasks", tasks, "poisson: number of tasks")->capture_default_str();
    app->add_option("--rate", rate, "poisson: arrivals per unit time")->capture_default_str();
    app->add_option("--duration", duration, "task duration")->capture_default_str();
    app->add_option("--bursts", bursts, "burst: number of groups")->capture_default_str();
    app->add_option("--burst-size", burst_size, "burst: tasks per group")->capture_default_str();
    app->add_option("--reps", reps, "repetitions")->capture_default_str();
    app->add_option("--seed", seed, "base seed (workload and run seeds)")->capture_default_str();
    app->add_flag("--baseline", baseline, "fully random assignment instead of a generator");
    app->add_option("--threads", threads, "worker threads")->capture_default_str();
    app->add_option("--out", out_path, "CSV file (default stdout)");
  }

  int run(std::ostream& stdout_, std::ostream& err) {
    std::vector<Task> ts;
    if (workload == "poisson") {
      Entropy rng = split_entropy(seed, 0x776b);
      ts = poisson_workload(tasks, rate, duration, rng);
    } else if (workload == "burst") {
      ts = burst_workload(bursts, burst_size, duration, 1.0);
    } else {
      throw InvalidArgument("--workload must be poisson or burst");
    }
    std::optional<GeneratorPlan> p;
    if (!baseline) {
      p = build_plan(plan.options(k == 0 ? m * b : k));
    }
    const auto result = run_experiment(ts, m, b, eps, p ? &*p : nullptr, reps, seed, threads);

    std::ofstream file;
    std::ostream* out = &stdout_;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw InvalidArgument("cannot open " + out_path);
      out = &file;
    }
    *out << experiment_csv_header(m) << '\n';
    for (const auto& run : result.runs) *out << experiment_csv_row(run, result.bound) << '\n';
    char buf[200];
    std::snprintf(buf, sizeof buf, "overflow frequency %.4f (%llu/%llu), 99%% Wilson [%.4f, %.4f], bound %.4g\n",
                  result.frequency, static_cast<unsigned long long>(result.overflows),
                  static_cast<unsigned long long>(reps), result.interval.low, result.interval.high, result.bound);
    err << buf;
    return kExitOk;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"k-independent sequence generators over finite fields"};
  app.require_subcommand(1);
  GenCommand gen;
  SearchCommand search;
  BenchCommand bench;
  VerifyCommand verify;
  LoadBalanceCommand lb;
  auto* gen_app = app.add_subcommand("gen", "emit a generator stream");
  gen.attach(gen_app);
  auto* search_app = app.add_subcommand("search", "expander parameter search");
  search.attach(search_app);
  auto* bench_app = app.add_subcommand("bench", "ns/value for horner, fft-batch and expander kinds");
  bench.attach(bench_app);
  auto* verify_app = app.add_subcommand("verify", "check k-independence of a generator");
  verify.attach(verify_app);
  auto* lb_app = app.add_subcommand("loadbalance", "interval load-balancing experiment");
  lb.attach(lb_app);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*gen_app) return gen.run(out, err);
    if (*search_app) return search.run(out, err);
    if (*bench_app) return bench.run(out, err);
    if (*verify_app) return verify.run(out, err);
    if (*lb_app) return lb.run(out, err);
  } catch (const GuardExceeded& e) {
    err << "guard exceeded: " << e.what() << '\n';
    return kExitGuard;
  } catch (const InvalidArgument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitInvalid;
}

}  // namespace kgen
