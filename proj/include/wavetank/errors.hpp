#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wavetank {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A physical or numerical parameter is outside its admissible range.
/// `field()` names the offending parameter so callers can map it back to input.
class InvalidParameter : public Error {
public:
  InvalidParameter(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Two objects that must describe the same experiment do not.
class InvalidComparison : public Error {
public:
  using Error::Error;
};

/// Envelope amplitude reached the edge of the periodic grid.
class BoundaryLeak : public Error {
public:
  using Error::Error;
};

/// Norm drift above tolerance during propagation.
class NumericalInstability : public Error {
public:
  using Error::Error;
};

class EmptyField : public Error {
public:
  using Error::Error;
};

/// Time sampling is non-uniform, undersampled or too short for the packet.
class SamplingError : public Error {
public:
  using Error::Error;
};

/// Envelope has more than one dominant lobe.
class AmbiguousPacket : public Error {
public:
  using Error::Error;
};

class DegenerateFit : public Error {
public:
  using Error::Error;
};

}  // namespace wavetank
