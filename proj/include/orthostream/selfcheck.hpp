#ifndef ORTHOSTREAM_SELFCHECK_HPP
#define ORTHOSTREAM_SELFCHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ortho {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant and oracle checks on small seeded instances; a few
/// seconds in total.
std::vector<CheckResult> run_self_checks(std::uint64_t seed = 7);

}  // namespace ortho

#endif  // ORTHOSTREAM_SELFCHECK_HPP
