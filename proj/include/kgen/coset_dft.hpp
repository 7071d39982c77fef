#pragma once

#include <span>
#include <vector>

#include "kgen/field.hpp"
#include "kgen/poly.hpp"

namespace kgen {

// Evaluation of a polynomial of length <= k on the multiplicative cosets
// S_j = { w^j * w_k^r : r < k } of the order-k subgroup of GF(p)^*, one coset
// per call. The cosets j = 0 .. (p-1)/k - 1 partition GF(p)^*.
//
// h(w^j x) = sum_i (w^(j i) a_i) x^i, so each coset costs one O(k) twist and
// a length-k radix-2 DFT with precomputed twiddles.
class CosetDft {
 public:
  // k must be a power of two dividing p - 1. The primitive element is found
  // by a seeded Las Vegas search.
  CosetDft(Gfp field, std::size_t k);
  CosetDft(Gfp field, std::size_t k, Word omega);

  const Gfp& field() const { return field_; }
  std::size_t size() const { return k_; }
  int log_size() const { return log_k_; }
  Word omega() const { return omega_; }
  Word root() const { return root_; }
  std::uint64_t coset_count() const { return cosets_; }

  std::uint64_t coset() const { return j_; }
  Word twist() const { return twist_; }
  // Moves to coset j + 1 (one multiplication). False, with the cursor left
  // unchanged, once the last coset has been reached.
  bool advance();
  void reset();

  // w^j * w_k^r for the current coset.
  Word point(std::size_t r) const;

  // out[i] = w^(j i) a_i for the current coset, zero padded to length k.
  void twist_coefficients(std::span<const Word> coeffs, std::span<Word> out) const;
  Polynomial<Gfp> twist_coefficients(const Polynomial<Gfp>& h, std::uint64_t j) const;

  // In place: a[r] <- sum_i a[i] w_k^(r i).
  void dft(std::span<Word> a) const;
  std::vector<Word> dft(const Polynomial<Gfp>& twisted) const;

  // twist + dft for the current coset: out[r] = h(point(r)).
  void evaluate(std::span<const Word> coeffs, std::span<Word> out) const;

 private:
  void init();

  Gfp field_;
  std::size_t k_;
  int log_k_ = 0;
  Word omega_ = 0;
  Word root_ = 1;
  std::uint64_t cosets_ = 0;
  std::uint64_t j_ = 0;
  Word twist_ = 1;
  std::vector<Word> twiddles_;      // w_k^i, i < k/2
  std::vector<std::uint32_t> rev_;  // bit reversal permutation
};

}  // namespace kgen
