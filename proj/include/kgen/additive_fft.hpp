#pragma once

#include <algorithm>
#include <bit>
#include <span>
#include <vector>

#include "kgen/field.hpp"
#include "kgen/poly.hpp"

namespace kgen {

template <class F>
concept BinaryField = FiniteField<F> && requires(const F& f, Word a) {
  { f.width() } -> std::convertible_to<int>;
  { f.inv(a) } -> std::same_as<Word>;
};

// Rank over F_2 of a set of words viewed as bit vectors.
inline int gf2_rank(std::vector<Word> rows) {
  int rank = 0;
  for (int bit = 63; bit >= 0; --bit) {
    const Word pivot_mask = Word{1} << bit;
    auto it = std::find_if(rows.begin() + rank, rows.end(), [&](Word r) { return (r & pivot_mask) != 0; });
    if (it == rows.end()) continue;
    std::swap(*it, rows[static_cast<std::size_t>(rank)]);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (j != static_cast<std::size_t>(rank) && (rows[j] & pivot_mask)) rows[j] ^= rows[static_cast<std::size_t>(rank)];
    }
    ++rank;
  }
  return rank;
}

// Gao-Mateer additive FFT: evaluates a polynomial of length <= 2^s on the
// affine subspace shift + span_F2(b_1, ..., b_s). Output index i holds the
// value at shift + sum_j bit_j(i) * b_{j+1}.
//
// Each level of the recursion substitutes x -> b_m x, expands the result
// around x^2 + x (Taylor expansion, additions only) into g0(x^2+x) + x g1(x^2+x)
// and evaluates g0, g1 on the image subspace with basis d_i = c_i^2 + c_i,
// c_i = b_i / b_m. Additions: O(s^2 2^s). Multiplications: O(s 2^s).
template <BinaryField F>
class AdditiveFft {
 public:
  // Monomial basis 1, x, ..., x^(s-1).
  AdditiveFft(F field, int log_size) : AdditiveFft(field, monomial_basis(field, log_size)) {}

  AdditiveFft(F field, std::vector<Word> basis) : field_(std::move(field)), basis_(std::move(basis)) {
    const int s = static_cast<int>(basis_.size());
    if (s > field_.width()) throw InvalidArgument("subspace dimension exceeds the field width");
    for (Word b : basis_) {
      if (!field_.contains(b)) throw InvalidArgument("basis element outside the field");
    }
    if (gf2_rank(basis_) != s) throw InvalidArgument("basis is not linearly independent over F_2");
    build_levels();
  }

  int log_size() const { return static_cast<int>(basis_.size()); }
  std::size_t size() const { return std::size_t{1} << basis_.size(); }
  std::span<const Word> basis() const { return basis_; }
  const F& field() const { return field_; }

  Word point(std::size_t index, Word shift) const {
    Word x = shift;
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      if ((index >> j) & 1) x ^= basis_[j];
    }
    return x;
  }

  // out.size() == size(); scratch is resized as needed and may be reused
  // across calls.
  void transform(std::span<const Word> coeffs, Word shift, std::span<Word> out, std::vector<Word>& scratch) const {
    const std::size_t n = size();
    if (coeffs.size() > n) throw InvalidArgument("polynomial longer than the transform size");
    if (out.size() != n) throw InvalidArgument("output span must match the transform size");
    std::copy(coeffs.begin(), coeffs.end(), out.begin());
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(coeffs.size()), out.end(), Word{0});
    const int s = log_size();
    if (s == 0) return;
    scratch.resize(n);

    // shifts[m]: affine offset of the level-m evaluation set; a[m] = shifts[m] / b_m.
    Word shifts[65];
    Word offsets[65];
    shifts[s] = shift;
    for (int m = s; m >= 1; --m) {
      offsets[m] = field_.mul(shifts[m], levels_[static_cast<std::size_t>(m)].beta_inv);
      shifts[m - 1] = field_.add(field_.mul(offsets[m], offsets[m]), offsets[m]);
    }

    for (int m = s; m >= 1; --m) {
      const Level& lv = levels_[static_cast<std::size_t>(m)];
      const std::size_t block = std::size_t{1} << m;
      const std::size_t half = block / 2;
      for (std::size_t base = 0; base < n; base += block) {
        Word* f = out.data() + base;
        if (lv.beta != 1) {
          for (std::size_t i = 1; i < block; ++i) f[i] = field_.mul(f[i], lv.beta_powers[i]);
        }
        taylor_expand(f, block);
        Word* tmp = scratch.data();
        for (std::size_t i = 0; i < half; ++i) {
          tmp[i] = f[2 * i];
          tmp[half + i] = f[2 * i + 1];
        }
        std::copy(tmp, tmp + block, f);
      }
    }

    for (int m = 1; m <= s; ++m) {
      const Level& lv = levels_[static_cast<std::size_t>(m)];
      const std::size_t block = std::size_t{1} << m;
      const std::size_t half = block / 2;
      const Word a = offsets[m];
      for (std::size_t base = 0; base < n; base += block) {
        Word* f = out.data() + base;
        for (std::size_t i = 0; i < half; ++i) {
          const Word v = f[half + i];
          const Word w = field_.add(f[i], field_.mul(field_.add(a, lv.span[i]), v));
          f[i] = w;
          f[half + i] = field_.add(w, v);
        }
      }
    }
  }

  std::vector<Word> evaluate(const Polynomial<F>& h, Word shift) const {
    std::vector<Word> out(size());
    std::vector<Word> scratch;
    transform(h.coefficients(), shift, out, scratch);
    return out;
  }

 private:
  struct Level {
    Word beta = 1;
    Word beta_inv = 1;
    std::vector<Word> beta_powers;  // beta^i, i < 2^m
    std::vector<Word> span;         // span of b_i / beta, i < m - 1, in index-bit order
  };

  static std::vector<Word> monomial_basis(const F& field, int log_size) {
    if (log_size < 0 || log_size > field.width()) throw InvalidArgument("transform size exceeds the field");
    std::vector<Word> basis(static_cast<std::size_t>(log_size));
    for (int i = 0; i < log_size; ++i) basis[static_cast<std::size_t>(i)] = Word{1} << i;
    return basis;
  }

  void build_levels() {
    const int s = log_size();
    levels_.assign(static_cast<std::size_t>(s) + 1, Level{});
    std::vector<Word> b = basis_;
    for (int m = s; m >= 1; --m) {
      Level& lv = levels_[static_cast<std::size_t>(m)];
      lv.beta = b[static_cast<std::size_t>(m - 1)];
      lv.beta_inv = field_.inv(lv.beta);
      lv.beta_powers.resize(std::size_t{1} << m);
      lv.beta_powers[0] = field_.one();
      for (std::size_t i = 1; i < lv.beta_powers.size(); ++i)
        lv.beta_powers[i] = field_.mul(lv.beta_powers[i - 1], lv.beta);
      std::vector<Word> gamma(static_cast<std::size_t>(m - 1));
      for (int i = 0; i < m - 1; ++i) gamma[static_cast<std::size_t>(i)] = field_.mul(b[static_cast<std::size_t>(i)], lv.beta_inv);
      lv.span.assign(std::size_t{1} << (m - 1), Word{0});
      for (std::size_t i = 1; i < lv.span.size(); ++i) {
        const int top = 63 - std::countl_zero(static_cast<std::uint64_t>(i));
        lv.span[i] = lv.span[i ^ (std::size_t{1} << top)] ^ gamma[static_cast<std::size_t>(top)];
      }
      for (int i = 0; i < m - 1; ++i) {
        const Word g = gamma[static_cast<std::size_t>(i)];
        b[static_cast<std::size_t>(i)] = field_.add(field_.mul(g, g), g);
      }
      b.resize(static_cast<std::size_t>(m - 1));
    }
  }

  // In place: rewrites f (length n, a power of two) as sum_i (c_i0 + c_i1 x)(x^2+x)^i
  // with (c_i0, c_i1) stored at positions (2i, 2i+1).
  void taylor_expand(Word* f, std::size_t n) const {
    for (std::size_t h = n / 4; h >= 1; h /= 2) {
      for (std::size_t base = 0; base < n; base += 4 * h) {
        Word* a = f + base;
        for (std::size_t i = 0; i < h; ++i) {
          a[2 * h + i] = field_.add(a[2 * h + i], a[3 * h + i]);
          a[h + i] = field_.add(a[h + i], a[2 * h + i]);
        }
      }
    }
  }

  F field_;
  std::vector<Word> basis_;
  std::vector<Level> levels_;
};

}  // namespace kgen
