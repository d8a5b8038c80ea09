#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fscap::app {

struct ReproduceOptions {
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

struct ReproduceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ReproduceReport {
  std::string target;
  bool passed = false;
  double value = 0.0;     ///< headline number of the target
  double expected = 0.0;  ///< reference value it is compared against
  double tolerance = 0.0;
  std::vector<ReproduceCheck> checks;
  double runtime_ms = 0.0;
};

/// trapdoor-cfb2, trapdoor-cfb1, trapdoor-cfb3-ub, trapdoor-cfb4-ub, bsc-curve, dec-curve, dec-feedback-gap.
const std::vector<std::string>& reproduce_targets();

/// Runs the pipeline behind a target. Throws InvalidArgument for an unknown target.
ReproduceReport reproduce(const std::string& target, const ReproduceOptions& opts = {});

std::string to_json(const ReproduceReport& report);

}  // namespace fscap::app
