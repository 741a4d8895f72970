#pragma once

#include <stdexcept>
#include <string>

namespace cwh {

//! Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Input does not follow the expected layout (header, ordering, step).
class SchemaError : public Error
{
public:
  using Error::Error;
};

//! A value violates a domain invariant (negative power, bad interval...).
class ValueError : public Error
{
public:
  using Error::Error;
};

class EmptyInputError : public Error
{
public:
  using Error::Error;
};

//! Too few samples or zero spread to estimate a bandwidth.
class DegenerateSampleError : public Error
{
public:
  using Error::Error;
};

//! Two series expected on the same time base are not.
class AlignmentError : public Error
{
public:
  using Error::Error;
};

//! A ratio was requested whose denominator is zero.
class UndefinedFractionError : public Error
{
public:
  using Error::Error;
};

} // namespace cwh
