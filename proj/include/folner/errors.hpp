#pragma once

#include <stdexcept>
#include <string>

namespace folner {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// group / indexing
struct IndexNotInRange : Error { using Error::Error; };
struct Overflow : Error { using Error::Error; };

// resource caps
struct ResourceLimit : Error { using Error::Error; };
struct SearchBudgetExceeded : Error { using Error::Error; };

// bitstream parsing
struct MalformedPair : Error { using Error::Error; };
struct Truncated : Error { using Error::Error; };

// codec guards
struct LengthMismatch : Error { using Error::Error; };
struct SumMismatch : Error { using Error::Error; };
struct RankOutOfRange : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };

// dynamics
struct SupportViolation : Error { using Error::Error; };
struct UnsupportedModel : Error { using Error::Error; };

// file containers; a wrong magic is a usage-level mistake, not data corruption
struct UnknownFormat : Error { using Error::Error; };

}  // namespace folner
