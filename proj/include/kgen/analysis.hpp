#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kgen/generator.hpp"

namespace kgen {

enum class Verdict { exact_pass, exact_fail, screen_pass, screen_fail };

std::string to_string(Verdict v);

struct IndependenceReport {
  Verdict verdict = Verdict::exact_fail;
  std::string method;  // enumeration | linear-rank | chi-square
  std::uint64_t k = 0;
  std::uint64_t n = 0;                   // stream positions considered
  std::uint64_t positions_examined = 0;  // number of k-position sets checked
  bool positions_capped = false;         // true when fewer than C(n, k) sets were checked
  std::uint64_t seeds = 0;               // seeds enumerated, or trials screened
  // enumeration: max |count - expected| over all cells; linear-rank: largest
  // rank deficiency; chi-square: largest statistic.
  double statistic = 0;
  double threshold = 0;  // chi-square only
  std::vector<std::uint64_t> witness;  // first failing position set, if any

  bool passed() const { return verdict == Verdict::exact_pass || verdict == Verdict::screen_pass; }
  std::string to_json() const;
};

// A seeded family of streams: produce(seed, out) writes the first out.size()
// values and returns how many exist (fewer once the period ends).
struct StreamSource {
  FieldSpec seed_field;
  std::uint64_t seed_length = 0;
  FieldSpec out_field;
  std::function<std::size_t(std::span<const Word>, std::span<Word>)> produce;
};

StreamSource plan_source(const GeneratorPlan& plan);

struct ExhaustiveOptions {
  std::uint64_t max_seeds = 10'000'000;
  std::uint64_t max_position_sets = 1'000'000;
  std::uint64_t max_cells = 10'000'000;  // |F|^k histogram size
};

// Enumerates every seed, materializes the first n values of each stream and
// checks, for every k-subset of positions (lexicographic, capped), that each
// output k-tuple occurs exactly #seeds / |F|^k times.
IndependenceReport exhaustive_independence_check(const StreamSource& source, std::uint64_t k, std::uint64_t n,
                                                 const ExhaustiveOptions& options = {});

// Exact verdict for streams that are affine functions of the seed (every
// generator here: Horner, FFT and expander sums are linear in the
// coefficients). Builds the response of each output to each seed basis
// vector (bits of the seed over GF(2^w), elements over GF(p)) and checks that
// every k-position set has full rank; the affine structure is confirmed on
// `linearity_trials` random seed pairs first, otherwise InvalidArgument.
IndependenceReport linear_independence_check(const StreamSource& source, std::uint64_t k, std::uint64_t n,
                                             Entropy& rng, std::uint64_t linearity_trials = 64,
                                             const ExhaustiveOptions& options = {});

// For each trial, window(trial, out) fills one stream window from a fresh
// seed. Positions are grouped into window / k consecutive k-tuples; each
// tuple's low-2-bit projection is histogrammed across trials and compared to
// the exact projected distribution of a uniform tuple over a field of size
// `field_size`. Screen-fail when any statistic exceeds the chi-square
// quantile at alpha / (number of tuples).
IndependenceReport chi_square_screen(const std::function<void(std::uint64_t, std::span<Word>)>& window,
                                     Period field_size, std::uint64_t k, std::uint64_t window_size,
                                     std::uint64_t trials, double alpha = 1e-6);

}  // namespace kgen
