#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgen/expander.hpp"
#include "kgen/field.hpp"

namespace kgen {

enum class GeneratorKind { horner, fft_batch, expander, cascade };

std::string to_string(GeneratorKind kind);
GeneratorKind parse_kind(const std::string& text);

struct GeneratorDescriptor {
  GeneratorKind kind = GeneratorKind::horner;
  FieldSpec field;       // output range
  FieldSpec seed_field;  // seed elements live here (the base generator's field)
  std::uint64_t k = 0;
  Period period = 0;
  // log10 of the declared failure probability; -inf for the exact kinds.
  double log10_delta = 0;
  std::uint64_t seed_length = 0;

  // fft-batch: evaluation points per batch.
  std::uint64_t batch = 0;
  // Composed kinds: right size m of the first level, imbalance c, degree d,
  // number of levels t. Level i (1-based) is a (c, c^(i-1) m, d) graph.
  std::uint64_t c = 0;
  std::uint64_t m = 0;
  std::uint32_t d = 0;
  int levels = 0;
  GeneratorKind base_kind = GeneratorKind::horner;
  std::uint64_t base_k = 0;

  // key=value lines, one per field, in a fixed order.
  std::vector<std::pair<std::string, std::string>> header() const;
};

// Everything init() needs besides the seed. Cheap to copy: graphs and the
// base plan are shared.
struct GeneratorPlan {
  GeneratorDescriptor descriptor;
  std::vector<std::shared_ptr<const BipartiteGraph>> graphs;
  std::shared_ptr<const GeneratorPlan> base;
  Word omega = 0;  // fft-batch over GF(p): primitive element
};

// Polynomial of degree < k evaluated in word order 0, 1, ...; period |F|.
GeneratorPlan make_horner_plan(const FieldSpec& field, std::uint64_t k);

// GF(2^w): additive FFT on the cosets gray(j) * 2^s + span(1, x, .., x^(s-1)),
// 2^s = next power of two >= k; period 2^w.
// GF(p): coset DFT on w^j <w_k>, k a power of two dividing p - 1; period p - 1.
GeneratorPlan make_fft_batch_plan(const FieldSpec& field, std::uint64_t k);

// Output value v of a block is the field sum of the previous level's table at
// Gamma(v). The base stream is consumed m values per block; a final partial
// block of the base period is dropped. Over GF(2^w) the
// base may run over a wider binary field; its values are truncated to w bits
// (an F_2-linear surjection, so independence carries over).
//
// One graph gives the expander kind, more give a cascade (kind may force
// `cascade` for a single level).
GeneratorPlan make_composed_plan(const FieldSpec& field, std::uint64_t k, std::vector<BipartiteGraph> graphs,
                                 GeneratorPlan base, std::optional<GeneratorKind> kind = std::nullopt);

// Samples a (c, m, d) graph and composes it with a dk-independent base of
// `inner_kind` over `inner_field` (defaults to `field`). Declared delta:
// rank bound over GF(2^w), unique-neighbor bound over GF(p).
GeneratorPlan build_expander_plan(const FieldSpec& field, std::uint64_t k, std::uint64_t c, std::uint64_t m,
                                  std::uint32_t d, GeneratorKind inner_kind, Entropy& rng,
                                  std::optional<FieldSpec> inner_field = std::nullopt);

// t levels over a d^t k independent base; level i targets d^(t-i) k and the
// declared delta is the sum of the level bounds. m defaults to
// next_pow2(d^t k). t = 0 returns the base plan.
GeneratorPlan build_cascade_plan(const FieldSpec& field, std::uint64_t k, std::uint64_t c, std::uint32_t d, int t,
                                 GeneratorKind base_kind, Entropy& rng, std::optional<std::uint64_t> m = std::nullopt,
                                 std::optional<FieldSpec> inner_field = std::nullopt);

// Declared delta of one level for the given output field.
double level_log10_delta(const FieldSpec& field, std::uint64_t c, std::uint64_t m, std::uint32_t d, std::uint64_t k);

class Generator {
 public:
  virtual ~Generator() = default;

  const GeneratorDescriptor& descriptor() const { return descriptor_; }
  Period emitted() const { return emitted_; }
  Period remaining() const { return descriptor_.period - emitted_; }

  // Next element, or nullopt once the period is exhausted.
  std::optional<Word> emit() {
    Word x;
    if (fill(&x, 1) == 0) return std::nullopt;
    ++emitted_;
    return x;
  }

  // Same as out.size() emits; returns the count written, short only at the
  // end of the period.
  std::size_t emit_batch(std::span<Word> out) {
    const std::size_t n = out.empty() ? 0 : fill(out.data(), out.size());
    emitted_ += n;
    return n;
  }

 protected:
  explicit Generator(GeneratorDescriptor d) : descriptor_(std::move(d)) {}
  virtual std::size_t fill(Word* out, std::size_t n) = 0;

 private:
  GeneratorDescriptor descriptor_;
  Period emitted_ = 0;
};

// Validates the seed (length and canonical elements) and materializes the
// first batch for the batch kinds.
std::unique_ptr<Generator> init(const GeneratorPlan& plan, std::span<const Word> seed);

// Uniform seed drawn from construction entropy.
std::vector<Word> random_seed(const GeneratorPlan& plan, Entropy& rng);

}  // namespace kgen
