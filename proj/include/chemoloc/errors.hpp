#pragma once

#include <stdexcept>
#include <string>

namespace chemoloc {

// Invalid user-supplied configuration: bad grid dimensions, out-of-range
// parameters, malformed config files, inconsistent functional setups.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace chemoloc
