#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgen/generator.hpp"

namespace kgen {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitGuard = 3;

// Runs the command line (args[0] is the program name) with the given
// streams; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Seed text: comma separated hex elements, or one hex string cut into
// fixed-width chunks of field.hex_digits() characters.
std::vector<Word> parse_seed_hex(const std::string& text, const FieldSpec& field);
std::string format_seed_hex(std::span<const Word> seed, const FieldSpec& field);
std::string format_element_hex(Word value, const FieldSpec& field);

struct PlanOptions {
  FieldSpec field = FieldSpec::binary(64);
  GeneratorKind kind = GeneratorKind::horner;
  std::uint64_t k = 1;
  // Composed kinds.
  std::uint64_t c = 64;
  std::uint64_t m = 0;  // 0: least feasible power of two (binary fields)
  std::uint32_t d = 8;
  int levels = 1;
  std::optional<FieldSpec> inner_field;
  GeneratorKind inner_kind = GeneratorKind::fft_batch;
  std::uint64_t graph_seed = 1;
  double log10_target = -7;
  std::uint64_t m_cap = std::uint64_t{1} << 26;
};

GeneratorPlan build_plan(const PlanOptions& options);

}  // namespace kgen
