// Exception hierarchy shared by every heunflow component.
#pragma once

#include <stdexcept>
#include <string>

namespace heunflow {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor / autodiff contract violations.
struct ShapeMismatch : Error { using Error::Error; };
struct NotScalar : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };

// ODE integration.
struct NonFiniteState : Error { using Error::Error; };
struct AlphaOutOfRange : Error { using Error::Error; };
struct AnalyticRequired : Error { using Error::Error; };

// Dataset ingestion.
struct IoError : Error { using Error::Error; };
struct BadMagic : Error { using Error::Error; };
struct TruncatedFile : Error { using Error::Error; };
struct CountMismatch : Error { using Error::Error; };
struct BadRowLength : Error { using Error::Error; };
struct BadLabel : Error { using Error::Error; };
struct NonFiniteValue : Error { using Error::Error; };
struct ValueOutOfRange : Error { using Error::Error; };

}  // namespace heunflow
