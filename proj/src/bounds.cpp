#include <algorithm>
#include <cmath>
#include <limits>

#include "kgen/expander.hpp"

namespace kgen {

namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum exp(x_i)) with -inf entries ignored.
double log_sum_exp(const std::vector<double>& xs) {
  double top = kNegInf;
  for (double x : xs) top = std::max(top, x);
  if (top == kNegInf) return kNegInf;
  double s = 0;
  for (double x : xs) {
    if (x != kNegInf) s += std::exp(x - top);
  }
  return top + std::log(s);
}

BoundResult finish(const std::vector<double>& ln_terms) {
  BoundResult r;
  r.log10_terms.reserve(ln_terms.size());
  for (double t : ln_terms) r.log10_terms.push_back(t / kLn10);
  r.log10_raw = log_sum_exp(ln_terms) / kLn10;
  r.log10_delta = std::min(0.0, r.log10_raw);
  return r;
}

}  // namespace

double ln_binomial(double n, double i) {
  if (i < 0 || i > n) return kNegInf;
  return std::lgamma(n + 1) - std::lgamma(i + 1) - std::lgamma(n - i + 1);
}

double ln_beta_pair(std::uint64_t i, std::uint64_t d, std::uint64_t m) {
  if (m == 0) throw InvalidArgument("m must be positive");
  const std::uint64_t n = i * d;
  if (n % 2 == 1) return kNegInf;
  const double h = static_cast<double>(n / 2);
  // (n - 1)!! = n! / (2^h h!)
  const double ln_double_factorial = std::lgamma(static_cast<double>(n) + 1) - h * std::log(2.0) - std::lgamma(h + 1);
  return ln_double_factorial - h * std::log(static_cast<double>(m));
}

double ln_beta_poisson(std::uint64_t i, std::uint64_t d, std::uint64_t m) {
  if (m == 0) throw InvalidArgument("m must be positive");
  const double id = static_cast<double>(i) * static_cast<double>(d);
  const double md = static_cast<double>(m);
  return 1.0 + 0.5 * std::log(id) + md * std::log1p(std::expm1(-2.0 * id / md) / 2.0);
}

BoundResult rank_failure_bound(std::uint64_t c, std::uint64_t m, std::uint64_t d, std::uint64_t k) {
  if (c == 0 || m == 0 || d == 0 || k == 0) throw InvalidArgument("c, m, d, k must be positive");
  const double n = static_cast<double>(c) * static_cast<double>(m);
  std::vector<double> terms(k);
  for (std::uint64_t i = 1; i <= k; ++i) {
    const double beta = std::min(ln_beta_pair(i, d, m), ln_beta_poisson(i, d, m));
    terms[i - 1] = beta == kNegInf ? kNegInf : ln_binomial(n, static_cast<double>(i)) + beta;
  }
  return finish(terms);
}

BoundResult unique_failure_bound(std::uint64_t c, std::uint64_t m, std::uint64_t d, std::uint64_t k) {
  if (c == 0 || m == 0 || d == 0 || k == 0) throw InvalidArgument("c, m, d, k must be positive");
  if (k * d > m) throw InvalidArgument("unique-neighbor bound requires k*d <= m");
  const double half = static_cast<double>(d) / 2.0;
  const double ln_cm = std::log(static_cast<double>(c)) + std::log(static_cast<double>(m));
  const double ln_m = std::log(static_cast<double>(m));
  std::vector<double> terms(k);
  for (std::uint64_t i = 1; i <= k; ++i) {
    const double ln_i = std::log(static_cast<double>(i));
    const double ln_bracket = ln_cm + 1.0 + half + half * (std::log(half) + (1.0 - 1.0 / half) * ln_i - ln_m);
    terms[i - 1] = static_cast<double>(i) * ln_bracket;
  }
  return finish(terms);
}

double delta_from_gamma(double c, double d, double gamma) {
  if (!(gamma > 1)) throw InvalidArgument("gamma must exceed 1");
  if (d < 2) throw InvalidArgument("d must be at least 2");
  if (!(c > 0)) throw InvalidArgument("c must be positive");
  return std::exp(1.0) * c * d / std::pow(gamma, d / 2.0 - 1.0);
}

}  // namespace kgen
