#pragma once

#include <span>
#include <vector>

#include "kgen/field.hpp"

namespace kgen {

// A member of the family of polynomials of degree < k over F, stored
// constant term first. Trailing zero coefficients are kept: the family
// member is identified by exactly k coefficients.
template <FiniteField F>
class Polynomial {
 public:
  Polynomial(F field, std::vector<Word> coefficients) : field_(std::move(field)), coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) throw InvalidArgument("polynomial needs at least one coefficient");
    for (Word c : coeffs_) {
      if (!field_.contains(c)) throw InvalidArgument("coefficient outside the field");
    }
  }

  const F& field() const { return field_; }
  std::span<const Word> coefficients() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  Word operator[](std::size_t i) const { return coeffs_[i]; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.field_ == b.field_ && a.coeffs_ == b.coeffs_;
  }

 private:
  F field_;
  std::vector<Word> coeffs_;
};

// Horner's rule: k - 1 multiplications and k - 1 additions.
template <FiniteField F>
Word horner_eval(const Polynomial<F>& h, Word x) {
  const F& f = h.field();
  if (!f.contains(x)) throw InvalidArgument("evaluation point outside the polynomial's field");
  const auto c = h.coefficients();
  Word acc = c.back();
  for (std::size_t i = c.size() - 1; i-- > 0;) acc = f.add(f.mul(acc, x), c[i]);
  return acc;
}

// Elementwise Horner; the reference every batch evaluator is checked against.
template <FiniteField F>
std::vector<Word> naive_multipoint(const Polynomial<F>& h, std::span<const Word> points) {
  std::vector<Word> out;
  out.reserve(points.size());
  for (Word x : points) out.push_back(horner_eval(h, x));
  return out;
}

// Uniform member of the degree < k family: k independent uniform coefficients.
template <FiniteField F, class Rng>
Polynomial<F> random_polynomial(const F& field, std::size_t k, Rng& rng) {
  if (k == 0) throw InvalidArgument("k must be positive");
  if (static_cast<Period>(k) > field_size(field)) throw InvalidArgument("k exceeds the field size");
  std::vector<Word> coeffs(k);
  for (auto& c : coeffs) c = field.random(rng);
  return Polynomial<F>(field, std::move(coeffs));
}

}  // namespace kgen
