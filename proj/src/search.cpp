#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "kgen/expander.hpp"

namespace kgen {

TimeModel analytic_time_model() {
  TimeModel model;
  model.name = "analytic";
  // Roughly fitted to the additive FFT over GF(2^64) on a desktop core.
  model.fft_ns_per_value = [](std::uint64_t n) {
    const double s = std::log2(static_cast<double>(std::max<std::uint64_t>(n, 2)));
    return 4.0 * s + 0.5 * s * s;
  };
  // Independent lookups overlap; priced per lookup by the level holding
  // an 8-byte-per-entry table.
  model.random_access_ns = [](std::uint32_t d, std::uint64_t m) {
    const double bytes = 8.0 * static_cast<double>(m);
    double per = 1.0;
    if (bytes > 48.0 * 1024) per = 2.0;
    if (bytes > 2.0 * 1024 * 1024) per = 6.0;
    if (bytes > 32.0 * 1024 * 1024) per = 20.0;
    return 1.0 + per * static_cast<double>(d);
  };
  return model;
}

namespace {

SearchRow search_cell(const SearchQuery& q, std::uint64_t c, std::uint32_t d, const TimeModel& model) {
  SearchRow row;
  row.k = q.k;
  row.c = c;
  row.d = d;
  std::uint64_t m = next_power_of_two(static_cast<std::uint64_t>(d) * q.k);
  double last = 0;
  for (; m <= q.m_cap; m <<= 1) {
    last = rank_failure_bound(c, m, d, q.k).log10_delta;
    if (last <= q.log10_target) {
      row.feasible = true;
      row.log2_m = log2_exact(m);
      row.log10_delta = last;
      row.predicted_ns = model.fft_ns_per_value(static_cast<std::uint64_t>(d) * q.k) / static_cast<double>(c) +
                         model.random_access_ns(d, m);
      return row;
    }
  }
  row.log10_delta = last;
  return row;
}

}  // namespace

SearchResult search_parameters(const SearchQuery& q, const TimeModel& model) {
  if (q.k == 0) throw InvalidArgument("k must be positive");
  if (q.cs.empty() || q.ds.empty()) throw InvalidArgument("candidate sets must be non-empty");
  if (q.m_cap == 0) throw InvalidArgument("m cap must be positive");
  for (auto c : q.cs) {
    if (c == 0) throw InvalidArgument("c candidates must be positive");
  }
  for (auto d : q.ds) {
    if (d == 0) throw InvalidArgument("d candidates must be positive");
  }

  struct Cell {
    std::uint64_t c;
    std::uint32_t d;
  };
  std::vector<Cell> cells;
  for (auto c : q.cs) {
    for (auto d : q.ds) cells.push_back({c, d});
  }

  SearchResult result;
  result.rows.resize(cells.size());
  const std::size_t threads = static_cast<std::size_t>(std::max(1, q.threads));
  for (std::size_t start = 0; start < cells.size(); start += threads) {
    std::vector<std::future<SearchRow>> jobs;
    for (std::size_t i = start; i < std::min(cells.size(), start + threads); ++i) {
      jobs.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async,
                                [&, i] { return search_cell(q, cells[i].c, cells[i].d, model); }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) result.rows[start + i] = jobs[i].get();
  }
  for (const auto& row : result.rows) {
    if (row.feasible && (!result.best || row.predicted_ns < result.best->predicted_ns)) result.best = row;
  }
  return result;
}

std::string search_csv_header() { return "k,c,log2_m,d,log10_delta,predicted_ns"; }

std::string search_csv_row(const SearchRow& row) {
  std::ostringstream s;
  char buf[64];
  s << row.k << ',' << row.c << ',';
  if (row.feasible) s << row.log2_m;
  else s << "NA";
  s << ',' << row.d << ',';
  std::snprintf(buf, sizeof buf, "%.3f", row.log10_delta);
  s << buf << ',';
  if (row.feasible) {
    std::snprintf(buf, sizeof buf, "%.2f", row.predicted_ns);
    s << buf;
  } else {
    s << "NA";
  }
  return s.str();
}

}  // namespace kgen
