#pragma once

#include <stdexcept>
#include <string>

namespace moyal {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct PoleError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct UnsupportedDomain : Error { using Error::Error; };
struct IntegrabilityError : Error { using Error::Error; };
struct SingularityError : Error { using Error::Error; };
struct PurityError : Error { using Error::Error; };
struct MissingCoefficient : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };

}  // namespace moyal
