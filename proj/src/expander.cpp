#include "kgen/expander.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>

namespace kgen {

namespace {

constexpr std::uint64_t kMaxRight = 0xFFFFFFFEull;
constexpr std::uint64_t kMaxSlots = std::uint64_t{1} << 36;

void check_shape(std::uint64_t c, std::uint64_t m, std::uint32_t d) {
  if (c == 0 || m == 0 || d == 0) throw InvalidArgument("graph sizes c, m, d must be positive");
  if (m > kMaxRight) throw InvalidArgument("right side too large for 32-bit indices");
  if (c > kMaxSlots / m || c * m > kMaxSlots / d) throw InvalidArgument("graph too large");
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw InvalidArgument("truncated graph header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

BipartiteGraph::BipartiteGraph(std::uint64_t c, std::uint64_t m, std::uint32_t d,
                               const std::vector<std::vector<std::uint32_t>>& adjacency)
    : c_(c), m_(m), d_(d) {
  check_shape(c, m, d);
  if (adjacency.size() != c * m) throw InvalidArgument("adjacency must list every left vertex");
  slots_.assign(c * m * d, static_cast<std::uint32_t>(m));
  for (std::uint64_t v = 0; v < c * m; ++v) {
    std::vector<std::uint32_t> row = adjacency[v];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    if (row.size() > d) throw InvalidArgument("left vertex has more than d neighbors");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] >= m) throw InvalidArgument("neighbor index out of range");
      slots_[v * d + j] = row[j];
    }
  }
}

BipartiteGraph::BipartiteGraph(std::uint64_t c, std::uint64_t m, std::uint32_t d, std::vector<std::uint32_t> slots)
    : c_(c), m_(m), d_(d), slots_(std::move(slots)) {
  check_shape(c, m, d);
  if (slots_.size() != c * m * d) throw InvalidArgument("slot array has the wrong size");
  for (std::uint64_t v = 0; v < c * m; ++v) normalize_row(v);
}

void BipartiteGraph::normalize_row(std::uint64_t v) {
  std::uint32_t* r = slots_.data() + v * d_;
  for (std::uint32_t j = 0; j < d_; ++j) {
    if (r[j] > m_) throw InvalidArgument("neighbor index out of range");
  }
  std::sort(r, r + d_);
  std::uint32_t* end = std::unique(r, r + d_);
  std::fill(end, r + d_, static_cast<std::uint32_t>(m_));
}

std::span<const std::uint32_t> BipartiteGraph::neighbors(std::uint64_t v) const {
  if (v >= left_size()) throw InvalidArgument("left vertex out of range");
  const std::uint32_t* r = row(v);
  const std::uint32_t* end = std::lower_bound(r, r + d_, static_cast<std::uint32_t>(m_));
  return {r, static_cast<std::size_t>(end - r)};
}

std::uint64_t BipartiteGraph::edge_count() const {
  return static_cast<std::uint64_t>(
      std::count_if(slots_.begin(), slots_.end(), [&](std::uint32_t s) { return s != m_; }));
}

BipartiteGraph sample_graph(std::uint64_t c, std::uint64_t m, std::uint32_t d, Entropy& rng) {
  check_shape(c, m, d);
  std::vector<std::uint32_t> slots(c * m * d);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(m - 1));
  for (auto& s : slots) s = pick(rng);
  return BipartiteGraph(c, m, d, std::move(slots));
}

BipartiteGraph stack(const BipartiteGraph& g, std::uint64_t b) {
  if (b == 0) throw InvalidArgument("stacking factor must be positive");
  const std::uint64_t m = g.m();
  const std::uint64_t big_m = m * b;
  check_shape(g.c(), big_m, g.d());
  const std::uint64_t per_block = g.slots_.size();
  std::vector<std::uint32_t> slots(per_block * b);
  for (std::uint64_t t = 0; t < b; ++t) {
    for (std::uint64_t i = 0; i < per_block; ++i) {
      const std::uint32_t s = g.slots_[i];
      slots[t * per_block + i] = s == m ? static_cast<std::uint32_t>(big_m) : static_cast<std::uint32_t>(s + t * m);
    }
  }
  return BipartiteGraph(g.c(), big_m, g.d(), std::move(slots));
}

// ---------------------------------------------------------------------------

std::uint64_t subset_count(std::uint64_t n, std::uint64_t k) {
  const std::uint64_t top = std::min(n, k);
  u128 total = 0;
  u128 binom = 1;
  for (std::uint64_t i = 1; i <= top; ++i) {
    binom = binom * (n - i + 1) / i;
    total += binom;
    if (total > UINT64_MAX || binom > (u128{1} << 100)) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(total);
}

namespace {

void check_guard(const BipartiteGraph& g, std::uint64_t k, std::uint64_t max_subsets) {
  const std::uint64_t count = subset_count(g.left_size(), k);
  if (count > max_subsets) {
    throw GuardExceeded("brute-force sweep needs " + (count == UINT64_MAX ? std::string(">2^64") : std::to_string(count)) +
                        " subsets (limit " + std::to_string(max_subsets) + ")");
  }
}

struct RowBits {
  std::size_t words = 0;
  std::vector<std::uint64_t> bits;  // row v at [v * words, (v + 1) * words)

  explicit RowBits(const BipartiteGraph& g) : words((g.m() + 63) / 64), bits(g.left_size() * words, 0) {
    for (std::uint64_t v = 0; v < g.left_size(); ++v) {
      for (std::uint32_t y : g.neighbors(v)) bits[v * words + y / 64] |= std::uint64_t{1} << (y % 64);
    }
  }
  const std::uint64_t* row(std::uint64_t v) const { return bits.data() + v * words; }
};

bool sweep_independent(const RowBits& rows, std::uint64_t n, std::uint64_t k) {
  const std::size_t w = rows.words;
  std::vector<std::uint64_t> acc((k + 1) * w, 0);
  // Depth-first over increasing index sequences; acc level t holds the XOR
  // of the first t chosen rows.
  auto rec = [&](auto&& self, std::uint64_t start, std::uint64_t depth) -> bool {
    const std::uint64_t* cur = acc.data() + depth * w;
    std::uint64_t* next = acc.data() + (depth + 1) * w;
    for (std::uint64_t v = start; v < n; ++v) {
      const std::uint64_t* r = rows.row(v);
      std::uint64_t any = 0;
      for (std::size_t i = 0; i < w; ++i) {
        next[i] = cur[i] ^ r[i];
        any |= next[i];
      }
      if (any == 0) return false;
      if (depth + 1 < k && !self(self, v + 1, depth + 1)) return false;
    }
    return true;
  };
  return rec(rec, 0, 0);
}

bool elimination_independent(const RowBits& rows, std::uint64_t n, std::uint64_t k) {
  const std::uint64_t r = std::min(n, k);
  const std::size_t w = rows.words;
  std::vector<std::uint64_t> idx(r);
  for (std::uint64_t i = 0; i < r; ++i) idx[i] = i;
  std::vector<std::uint64_t> mat(r * w);
  std::vector<std::size_t> pivot_word(r);
  std::vector<std::uint64_t> pivot_bit(r);
  for (;;) {
    for (std::uint64_t i = 0; i < r; ++i) {
      std::uint64_t* row = mat.data() + i * w;
      std::copy(rows.row(idx[i]), rows.row(idx[i]) + w, row);
      for (std::uint64_t j = 0; j < i; ++j) {
        if (row[pivot_word[j]] & pivot_bit[j]) {
          const std::uint64_t* p = mat.data() + j * w;
          for (std::size_t t = 0; t < w; ++t) row[t] ^= p[t];
        }
      }
      std::size_t t = 0;
      while (t < w && row[t] == 0) ++t;
      if (t == w) return false;
      pivot_word[i] = t;
      pivot_bit[i] = row[t] & (~row[t] + 1);
    }
    // Next r-subset in lexicographic order.
    std::uint64_t pos = r;
    while (pos > 0 && idx[pos - 1] == n - r + pos - 1) --pos;
    if (pos == 0) return true;
    ++idx[pos - 1];
    for (std::uint64_t i = pos; i < r; ++i) idx[i] = idx[i - 1] + 1;
  }
}

}  // namespace

bool is_k_unique_bruteforce(const BipartiteGraph& g, std::uint64_t k, std::uint64_t max_subsets) {
  if (k == 0) return true;
  check_guard(g, k, max_subsets);
  const std::uint64_t n = g.left_size();
  std::vector<std::uint32_t> count(g.m(), 0);
  std::uint64_t singles = 0;

  auto add = [&](std::uint64_t v) {
    for (std::uint32_t y : g.neighbors(v)) {
      if (count[y] == 0) ++singles;
      else if (count[y] == 1) --singles;
      ++count[y];
    }
  };
  auto remove = [&](std::uint64_t v) {
    for (std::uint32_t y : g.neighbors(v)) {
      --count[y];
      if (count[y] == 0) --singles;
      else if (count[y] == 1) ++singles;
    }
  };
  auto rec = [&](auto&& self, std::uint64_t start, std::uint64_t depth) -> bool {
    for (std::uint64_t v = start; v < n; ++v) {
      add(v);
      bool ok = singles > 0;
      if (ok && depth + 1 < k) ok = self(self, v + 1, depth + 1);
      remove(v);
      if (!ok) return false;
    }
    return true;
  };
  return rec(rec, 0, 0);
}

bool all_small_row_subsets_independent(const BipartiteGraph& g, std::uint64_t k, RowCheckMethod method,
                                       std::uint64_t max_subsets) {
  if (k == 0) return true;
  check_guard(g, k, max_subsets);
  const RowBits rows(g);
  const std::uint64_t n = g.left_size();
  switch (method) {
    case RowCheckMethod::elimination:
      return elimination_independent(rows, n, k);
    case RowCheckMethod::sweep:
    case RowCheckMethod::automatic:
      break;
  }
  return sweep_independent(rows, n, std::min(n, k));
}

// ---------------------------------------------------------------------------

void write_graph(std::ostream& out, const BipartiteGraph& g) {
  put_u64(out, g.c());
  put_u64(out, g.m());
  put_u64(out, g.d());
  const std::uint64_t n = g.left_size();
  std::vector<char> buf(static_cast<std::size_t>(g.d()) * 4);
  for (std::uint64_t v = 0; v < n; ++v) {
    const std::uint32_t* r = g.row(v);
    for (std::uint32_t j = 0; j < g.d(); ++j) {
      const std::uint32_t s = r[j] == g.m() ? kGraphFilePad : r[j];
      for (int b = 0; b < 4; ++b) buf[j * 4 + b] = static_cast<char>((s >> (8 * b)) & 0xFF);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw InvalidArgument("failed to write graph");
}

BipartiteGraph read_graph(std::istream& in) {
  const std::uint64_t c = get_u64(in);
  const std::uint64_t m = get_u64(in);
  const std::uint64_t d = get_u64(in);
  if (d == 0 || d > 0xFFFFFFFFull) throw InvalidArgument("bad graph degree");
  check_shape(c, m, static_cast<std::uint32_t>(d));
  std::vector<std::uint32_t> slots(c * m * d);
  std::vector<unsigned char> buf(static_cast<std::size_t>(d) * 4);
  for (std::uint64_t v = 0; v < c * m; ++v) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in) throw InvalidArgument("truncated graph body");
    for (std::uint64_t j = 0; j < d; ++j) {
      std::uint32_t s = 0;
      for (int b = 0; b < 4; ++b) s |= static_cast<std::uint32_t>(buf[j * 4 + b]) << (8 * b);
      if (s == kGraphFilePad) {
        s = static_cast<std::uint32_t>(m);
      } else if (s >= m) {
        throw InvalidArgument("neighbor index out of range in graph file");
      }
      slots[v * d + j] = s;
    }
  }
  return BipartiteGraph(c, m, static_cast<std::uint32_t>(d), std::move(slots));
}

}  // namespace kgen
