#pragma once

// End-to-end verification checks. Each check returns a pass/fail verdict with
// the worst measured deviation, the tolerance it was held to and its runtime.

#include "entgap/io.hpp"
#include "entgap/pauli.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace entgap {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct VerifyOptions {
  std::optional<int> n;          // restrict size loops to this n
  std::optional<GateKind> gate;  // restrict gate loops to this gate
  std::uint64_t seed = 20240601;
  int trajectories = 2000;
};

/// permutation-tables, reduction-identities, closed-form-gaps, spectrum-union,
/// free-fermions, lmg-asymptote, reduced-chain-scaling, monte-carlo, fixed-point.
const std::vector<std::string>& check_names();

/// Throws DomainError for an unknown name. Library errors inside a check are
/// reported as a failed result rather than thrown.
CheckResult run_check(const std::string& name, const VerifyOptions& options = {});

std::vector<CheckResult> run_checks(const std::vector<std::string>& names, const VerifyOptions& options = {});

io::Json verification_report(const std::vector<CheckResult>& results);

}  // namespace entgap
