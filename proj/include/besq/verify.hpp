#ifndef BESQ_VERIFY_HPP
#define BESQ_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace besq {

struct CheckRow {
  std::string name;
  bool pass = false;
  double worst = 0.0;  // worst relative error (or margin) observed
  std::string detail;
};

// Randomized verification suites over non-negative configurations:
//   identities   - simple-bracket identity and the exact integer identity
//   coefficients - drift_direct vs drift_closed
//   brackets     - bracket_direct vs closed form, PSD of the bracket matrix
//   roundtrip    - roots_from_polys after elementary_all
std::vector<CheckRow> run_verify_suite(const std::string& suite, int p_max, int cases,
                                       std::uint64_t seed);

}  // namespace besq

#endif  // BESQ_VERIFY_HPP
