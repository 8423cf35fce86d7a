#ifndef MZDMD_CHECKS_HPP
#define MZDMD_CHECKS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace mzdmd {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast self-checks of the numerical core on seeded random instances:
/// Penrose conditions, expm identities, Frechet and objective gradients
/// against central differences, memory-kernel equivalence, telescoping,
/// energy conservation and exact DMD recovery.
std::vector<CheckResult> run_invariant_checks(std::uint64_t seed);

}  // namespace mzdmd

#endif  // MZDMD_CHECKS_HPP
