#pragma once

#include <stdexcept>
#include <string>

namespace ergo {

/// Base of every error the library throws.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Parameter outside its admissible domain.
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// Too few samples, instances, or grid points.
class SizeError : public Error
{
  public:
    using Error::Error;
};

/// Explicit scheme would be unstable for the requested step.
class StabilityError : public Error
{
  public:
    using Error::Error;
};

/// Domain length is not a whole number of grid spacings.
class GridError : public Error
{
  public:
    using Error::Error;
};

/// Operation needs strictly positive data.
class PositivityError : public Error
{
  public:
    using Error::Error;
};

/// Estimate is undefined (zero spread, zero threshold, ...).
class DegenerateError : public Error
{
  public:
    using Error::Error;
};

/// Input file does not follow the expected layout.
class SchemaError : public Error
{
  public:
    using Error::Error;
};

} // namespace ergo
