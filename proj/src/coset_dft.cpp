#include "kgen/coset_dft.hpp"

#include <algorithm>

namespace kgen {

CosetDft::CosetDft(Gfp field, std::size_t k) : CosetDft(field, k, Word{0}) {}

CosetDft::CosetDft(Gfp field, std::size_t k, Word omega) : field_(std::move(field)), k_(k), omega_(omega) {
  const Word p = field_.modulus();
  if (k_ == 0 || !is_power_of_two(k_)) throw InvalidArgument("coset DFT length must be a power of two");
  if ((p - 1) % k_ != 0) throw InvalidArgument("coset DFT length must divide p - 1");
  if (k_ > (std::size_t{1} << 31)) throw InvalidArgument("coset DFT length too large");
  if (omega_ == 0) {
    omega_ = find_primitive_element(field_);
  } else {
    if (!field_.contains(omega_) || multiplicative_order(field_, omega_) != p - 1)
      throw InvalidArgument("omega is not a primitive element");
  }
  init();
}

void CosetDft::init() {
  const Word p = field_.modulus();
  log_k_ = log2_exact(k_);
  cosets_ = (p - 1) / k_;
  root_ = field_.pow(omega_, cosets_);
  twiddles_.resize(k_ / 2);
  Word t = 1;
  for (auto& w : twiddles_) {
    w = t;
    t = field_.mul(t, root_);
  }
  rev_.resize(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    std::uint32_t r = 0;
    for (int b = 0; b < log_k_; ++b) r |= static_cast<std::uint32_t>((i >> b) & 1) << (log_k_ - 1 - b);
    rev_[i] = r;
  }
  reset();
}

bool CosetDft::advance() {
  if (j_ + 1 >= cosets_) return false;
  ++j_;
  twist_ = field_.mul(twist_, omega_);
  return true;
}

void CosetDft::reset() {
  j_ = 0;
  twist_ = 1;
}

Word CosetDft::point(std::size_t r) const {
  if (r >= k_) throw InvalidArgument("point index out of range");
  return field_.mul(twist_, field_.pow(root_, r));
}

void CosetDft::twist_coefficients(std::span<const Word> coeffs, std::span<Word> out) const {
  if (coeffs.size() > k_) throw InvalidArgument("polynomial longer than the transform size");
  if (out.size() != k_) throw InvalidArgument("output span must match the transform size");
  Word t = 1;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    out[i] = field_.mul(coeffs[i], t);
    t = field_.mul(t, twist_);
  }
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(coeffs.size()), out.end(), Word{0});
}

Polynomial<Gfp> CosetDft::twist_coefficients(const Polynomial<Gfp>& h, std::uint64_t j) const {
  if (!(h.field() == field_)) throw InvalidArgument("polynomial over a different field");
  if (j >= cosets_) throw InvalidArgument("coset index out of range");
  const Word step = field_.pow(omega_, j);
  std::vector<Word> out(h.size());
  Word t = 1;
  for (std::size_t i = 0; i < h.size(); ++i) {
    out[i] = field_.mul(h[i], t);
    t = field_.mul(t, step);
  }
  return Polynomial<Gfp>(field_, std::move(out));
}

void CosetDft::dft(std::span<Word> a) const {
  if (a.size() != k_) throw InvalidArgument("input span must match the transform size");
  for (std::size_t i = 0; i < k_; ++i) {
    if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
  }
  for (std::size_t len = 2; len <= k_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = k_ / len;
    for (std::size_t base = 0; base < k_; base += len) {
      for (std::size_t i = 0; i < half; ++i) {
        const Word u = a[base + i];
        const Word v = field_.mul(a[base + half + i], twiddles_[i * stride]);
        a[base + i] = field_.add(u, v);
        a[base + half + i] = field_.sub(u, v);
      }
    }
  }
}

std::vector<Word> CosetDft::dft(const Polynomial<Gfp>& twisted) const {
  if (twisted.size() > k_) throw InvalidArgument("polynomial longer than the transform size");
  std::vector<Word> a(k_, 0);
  std::copy(twisted.coefficients().begin(), twisted.coefficients().end(), a.begin());
  dft(a);
  return a;
}

void CosetDft::evaluate(std::span<const Word> coeffs, std::span<Word> out) const {
  twist_coefficients(coeffs, out);
  dft(out);
}

}  // namespace kgen
