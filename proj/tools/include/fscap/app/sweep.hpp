#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fscap/app/manifest.hpp"

namespace fscap::app {

struct SweepSpec {
  std::string channel = "dec";   ///< family: trapdoor, bsc-rll or dec
  int delay = 2;                 ///< default for methods without a -d<delay> part
  std::vector<double> grid;      ///< channel parameter values, strictly increasing
  std::vector<std::string> methods;
  std::string qgraph;            ///< default graph for methods without one (markov<k>, appendixA, appendixC)
  std::uint64_t seed = 1;
  std::size_t random_starts = 16;
  unsigned jobs = 1;
  std::string csv_path;       ///< empty: caller handles output
  std::string manifest_path;  ///< empty: no manifest file
};

/// Expands "start:stop:step" (inclusive) or a comma list. Throws InvalidArgument.
std::vector<double> parse_grid(const std::string& text);

/// Throws InvalidArgument when the spec breaks an invariant (empty or non-monotone grid, no methods, ...).
void validate(const SweepSpec& spec);

struct SweepRow {
  double param = 0.0;
  std::string method;
  double value = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  double runtime_ms = 0.0;
  std::string status;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< grid-major, methods in spec order
  RunManifest manifest;
};

/**
 * Runs every (grid point, method) pair on a pool of spec.jobs workers. Rows
 * come back in grid order whatever the completion order, and a failing point
 * only marks its own row. Writes the CSV and manifest when paths are set.
 */
SweepResult run_sweep(const SweepSpec& spec);

inline constexpr const char* kCsvHeader = "param,method,value,residual,iterations,runtime_ms,status";

/// CSV text with kCsvHeader; floats use 10 significant digits.
std::string to_csv(const std::vector<SweepRow>& rows);

/// Spec as JSON (the resolved configuration stored in the manifest).
std::string to_json(const SweepSpec& spec);

/// Reads a JSON configuration. Keys mirror SweepSpec; "grid" is a string or an array.
SweepSpec sweep_from_json(const std::string& text);

/// Worker count from FSCAP_JOBS, or 1 when unset or malformed.
unsigned default_jobs();

}  // namespace fscap::app
