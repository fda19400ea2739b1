#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace porosity {

enum class ErrorCode {
  invalid_argument,
  invalid_spec,
  depth_exceeds_finite_set,
  bit_budget_exceeded,
  window_not_covered,
  zero_isolated,
  no_admissible_gaps,
  length_mismatch,
  tau_not_in_set,
  chain_too_short,
  ratio_not_vanishing,
  factor_too_large,
  invalid_tau_rule,
  invalid_partition,
  no_stable_subsequence,
  empty_family,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::invalid_spec: return "InvalidSpec";
    case ErrorCode::depth_exceeds_finite_set: return "DepthExceedsFiniteSet";
    case ErrorCode::bit_budget_exceeded: return "BitBudgetExceeded";
    case ErrorCode::window_not_covered: return "WindowNotCovered";
    case ErrorCode::zero_isolated: return "ZeroIsolated";
    case ErrorCode::no_admissible_gaps: return "NoAdmissibleGaps";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::tau_not_in_set: return "TauNotInSet";
    case ErrorCode::chain_too_short: return "ChainTooShort";
    case ErrorCode::ratio_not_vanishing: return "RatioNotVanishing";
    case ErrorCode::factor_too_large: return "FactorTooLarge";
    case ErrorCode::invalid_tau_rule: return "InvalidTauRule";
    case ErrorCode::invalid_partition: return "InvalidPartition";
    case ErrorCode::no_stable_subsequence: return "NoStableSubsequenceAtDepth";
    case ErrorCode::empty_family: return "EmptyFamily";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so callers
/// (the CLI in particular) can map it to an exit status without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

/// Three-valued answer for questions that a finite prefix can only partly settle.
enum class Tri { yes, no, unknown };

constexpr std::string_view to_string(Tri t) noexcept {
  switch (t) {
    case Tri::yes: return "yes";
    case Tri::no: return "no";
    case Tri::unknown: return "unknown";
  }
  return "unknown";
}

}  // namespace porosity
