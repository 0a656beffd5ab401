#ifndef VWAVE_ERRORS_HPP
#define VWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vwave {

// Base for every error thrown by the toolkit.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularStiffness : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct OutOfOrder : Error { using Error::Error; };
struct HistoryTooShort : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct InsufficientNodes : Error { using Error::Error; };
struct NonPositiveDensity : Error { using Error::Error; };
struct EmptySuperposition : Error { using Error::Error; };
struct NegativeWeight : Error { using Error::Error; };
struct UnsupportedKind : Error { using Error::Error; };
struct Unstable : Error { using Error::Error; };
struct ConeOutsideGrid : Error { using Error::Error; };
struct ModelMismatch : Error { using Error::Error; };
struct InsufficientSnapshots : Error { using Error::Error; };
struct NoFrontDetected : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace vwave

#endif
