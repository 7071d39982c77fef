#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgen/common.hpp"

namespace kgen {

// Unbalanced bipartite graph with c*m left vertices, m right vertices and at
// most d neighbors per left vertex. Neighbor lists are sorted and duplicate
// free, so a left vertex's list is exactly the support of its row in the
// 0/1 adjacency matrix over F_2.
//
// Storage is a dense c*m x d array; unused slots hold the value m, which
// lets the emit loop read a zero sentinel instead of branching.
class BipartiteGraph {
 public:
  // Lists are sorted and deduplicated; indices must be < m.
  BipartiteGraph(std::uint64_t c, std::uint64_t m, std::uint32_t d, const std::vector<std::vector<std::uint32_t>>& adjacency);

  std::uint64_t c() const { return c_; }
  std::uint64_t m() const { return m_; }
  std::uint32_t d() const { return d_; }
  std::uint64_t left_size() const { return c_ * m_; }

  // Padded row of d slots; entries equal to m() are empty.
  const std::uint32_t* row(std::uint64_t v) const { return slots_.data() + v * d_; }
  std::span<const std::uint32_t> neighbors(std::uint64_t v) const;
  std::uint32_t degree(std::uint64_t v) const { return static_cast<std::uint32_t>(neighbors(v).size()); }
  std::uint64_t edge_count() const;

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  friend BipartiteGraph sample_graph(std::uint64_t, std::uint64_t, std::uint32_t, Entropy&);
  friend BipartiteGraph stack(const BipartiteGraph&, std::uint64_t);
  friend BipartiteGraph read_graph(std::istream&);
  BipartiteGraph(std::uint64_t c, std::uint64_t m, std::uint32_t d, std::vector<std::uint32_t> slots);
  // Sorts, deduplicates and pads row v in place.
  void normalize_row(std::uint64_t v);

  std::uint64_t c_ = 0;
  std::uint64_t m_ = 0;
  std::uint32_t d_ = 0;
  std::vector<std::uint32_t> slots_;
};

// Each left vertex draws d neighbors uniformly from [m] with replacement;
// repeats collapse.
BipartiteGraph sample_graph(std::uint64_t c, std::uint64_t m, std::uint32_t d, Entropy& rng);

// Block diagonal copy: block t maps left t*c*m + v to right t*m + Gamma(v).
// The result is a (c, b*m, d) graph.
BipartiteGraph stack(const BipartiteGraph& g, std::uint64_t b);

// ---------------------------------------------------------------------------
// Brute-force structure checks. Both enumerate every left subset of size at
// most k and refuse (GuardExceeded) when sum_{i<=k} C(cm, i) > max_subsets.

inline constexpr std::uint64_t kDefaultSubsetGuard = 100'000'000;

// Number of nonempty left subsets of size <= k, saturating at UINT64_MAX.
std::uint64_t subset_count(std::uint64_t n, std::uint64_t k);

// True iff every nonempty S with |S| <= k has a right vertex with exactly one
// neighbor in S.
bool is_k_unique_bruteforce(const BipartiteGraph& g, std::uint64_t k, std::uint64_t max_subsets = kDefaultSubsetGuard);

enum class RowCheckMethod { automatic, sweep, elimination };

// True iff no nonempty set of at most k rows of the F_2 adjacency matrix sums
// to zero. `sweep` walks subsets depth first with a running XOR; `elimination`
// runs Gaussian elimination on every min(k, cm)-subset of rows.
bool all_small_row_subsets_independent(const BipartiteGraph& g, std::uint64_t k,
                                       RowCheckMethod method = RowCheckMethod::automatic,
                                       std::uint64_t max_subsets = kDefaultSubsetGuard);

// ---------------------------------------------------------------------------
// Failure probability bounds. Everything is computed in log space.

struct BoundResult {
  // log10 of min(1, bound).
  double log10_delta = 0;
  // log10 of the unclamped sum.
  double log10_raw = 0;
  // log10 of the i-th summand, i = 1..k (index i - 1). -inf marks an exact zero.
  std::vector<double> log10_terms;
};

// Natural log of (id - 1)!! (1/m)^(id/2); -inf when id is odd.
double ln_beta_pair(std::uint64_t i, std::uint64_t d, std::uint64_t m);
// Natural log of e sqrt(id) ((1 + e^(-2id/m)) / 2)^m.
double ln_beta_poisson(std::uint64_t i, std::uint64_t d, std::uint64_t m);
// ln C(n, i) via lgamma.
double ln_binomial(double n, double i);

// sum_{i=1}^{k} C(cm, i) min(beta_pair, beta_poisson).
BoundResult rank_failure_bound(std::uint64_t c, std::uint64_t m, std::uint64_t d, std::uint64_t k);

// sum_{i=1}^{k} (cm e^(1+d/2) ((d/2) i^(1-2/d) / m)^(d/2))^i; requires kd <= m.
BoundResult unique_failure_bound(std::uint64_t c, std::uint64_t m, std::uint64_t d, std::uint64_t k);

// e c d / gamma^(d/2 - 1); requires gamma > 1 and d >= 2.
double delta_from_gamma(double c, double d, double gamma);

// ---------------------------------------------------------------------------
// Parameter search over (c, d) with power-of-two m.

// Per-value cost model T = FFT_{dk} / c + RA_{d,m}, in nanoseconds.
struct TimeModel {
  std::function<double(std::uint64_t)> fft_ns_per_value;                // argument: batch size dk
  std::function<double(std::uint32_t, std::uint64_t)> random_access_ns;  // d lookups into m words
  std::string name;
};

// Closed-form model: FFT ~ log^2 of the batch size, lookups priced by the
// cache level the m-word table lands in.
TimeModel analytic_time_model();

struct SearchQuery {
  std::uint64_t k = 0;
  std::vector<std::uint64_t> cs{16, 32, 64};
  std::vector<std::uint32_t> ds{4, 8, 16};
  std::uint64_t m_cap = std::uint64_t{1} << 26;
  double log10_target = -7;
  int threads = 1;
};

struct SearchRow {
  std::uint64_t k = 0;
  std::uint64_t c = 0;
  std::uint32_t d = 0;
  bool feasible = false;
  int log2_m = -1;
  double log10_delta = 0;  // at the chosen m, or at the cap when infeasible
  double predicted_ns = 0;
};

struct SearchResult {
  std::vector<SearchRow> rows;  // in (c, d) input order
  std::optional<SearchRow> best;
};

// Least power of two m in [next_pow2(dk), m_cap] meeting the target, per (c, d).
SearchResult search_parameters(const SearchQuery& query, const TimeModel& model);

std::string search_csv_header();
std::string search_csv_row(const SearchRow& row);

// ---------------------------------------------------------------------------
// Graph files: c, m, d as little-endian u64, then c*m*d little-endian u32
// neighbor indices per left vertex, 0xFFFFFFFF in unused slots.

inline constexpr std::uint32_t kGraphFilePad = 0xFFFFFFFFu;

void write_graph(std::ostream& out, const BipartiteGraph& g);
BipartiteGraph read_graph(std::istream& in);

}  // namespace kgen
