#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace losmap {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated.
class InvalidArgument : public Error
{
public:
  using Error::Error;
};

/// A link whose transmitter and receiver coincide.
class DegenerateLinkError : public InvalidArgument
{
public:
  DegenerateLinkError()
  : InvalidArgument("zero-length link: transmitter and receiver coincide")
  {
  }
};

/// A covariance that cannot be inverted during fusion.
class SingularCovarianceError : public InvalidArgument
{
public:
  explicit SingularCovarianceError(std::size_t index)
  : InvalidArgument(
      "covariance of estimate " + std::to_string(index) +
      " is not positive-definite"),
    _index(index)
  {
  }

  std::size_t index() const noexcept { return _index; }

private:
  std::size_t _index;
};

/// The closed-form blockage probability requires an isotropic position
/// covariance.
class AnisotropicCovarianceError : public InvalidArgument
{
public:
  using InvalidArgument::InvalidArgument;
};

class SearchSpaceExceeded : public Error
{
public:
  using Error::Error;
};

class ConvergenceError : public Error
{
public:
  using Error::Error;
};

/// Configuration rejected during validation. `path()` names the offending
/// field, e.g. `scenario.density`.
class ConfigError : public Error
{
public:
  ConfigError(std::string path, const std::string& message)
  : Error(path + ": " + message), _path(std::move(path))
  {
  }

  const std::string& path() const noexcept { return _path; }

private:
  std::string _path;
};

} // namespace losmap
