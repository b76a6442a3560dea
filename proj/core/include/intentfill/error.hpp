#pragma once

#include <stdexcept>
#include <string>

namespace intentfill {

// Base for every error raised by the library. Module-specific errors derive
// from this so callers can catch at whichever granularity they need.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace intentfill
