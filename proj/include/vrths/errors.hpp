#pragma once

#include <stdexcept>
#include <string>

namespace vrths {

// Error taxonomy. Each class maps to one documented CLI exit code; library
// callers can catch the base std::runtime_error or a specific category.

// Invalid model/engine/campaign parameters, malformed config files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File system and parse failures (always carries the offending path/line).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degenerate or unsupported numerical problems (singular systems, failed
// fits, undefined metrics).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A simulation diverged or produced non-finite values; the message names the
// first faulting channel and the simulation time.
struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vrths
