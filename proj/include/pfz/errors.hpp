#ifndef PFZ_ERRORS_HPP
#define PFZ_ERRORS_HPP

#include <stdexcept>
#include <string>

#include "pfz/types.hpp"

namespace pfz
{
  //! base of all library errors
  class Error : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  //! invalid input detected before computation (CLI exit code 1)
  class ValidationError : public Error
  {
  public:
    using Error::Error;
  };

  class ArgumentError : public ValidationError
  {
  public:
    using ValidationError::ValidationError;
  };

  //! a point lies outside the set an operation is defined on
  class DomainError : public ValidationError
  {
  public:
    using ValidationError::ValidationError;
  };

  //! failure inside a numerical procedure (CLI exit code 2)
  class NumericalError : public Error
  {
  public:
    using Error::Error;
  };

  class NoConvergence : public NumericalError
  {
  public:
    NoConvergence(const std::string& what, Complex last) : NumericalError(what), last_iterate(last) {}
    Complex last_iterate;
  };

  class SingularityError : public NumericalError
  {
  public:
    using NumericalError::NumericalError;
  };

  class SpuriousRootError : public NumericalError
  {
  public:
    using NumericalError::NumericalError;
  };

  //! a zero lies on or extremely close to an integration contour
  class ContourDegeneracy : public NumericalError
  {
  public:
    using NumericalError::NumericalError;
  };

  class ResolutionError : public NumericalError
  {
  public:
    using NumericalError::NumericalError;
  };

  class ConvexityError : public NumericalError
  {
  public:
    using NumericalError::NumericalError;
  };

  class HypothesisViolation : public NumericalError
  {
  public:
    using NumericalError::NumericalError;
  };

  class CoverageError : public ValidationError
  {
  public:
    using ValidationError::ValidationError;
  };
}

#endif // PFZ_ERRORS_HPP
