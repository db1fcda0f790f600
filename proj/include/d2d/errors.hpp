#pragma once

#include <stdexcept>
#include <string>

namespace d2d {

//! A value outside its validity domain (negative density, alpha <= 2, ...).
class ParameterError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//! Two nodes closer than the configured minimum link distance.
class SingularityError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

//! Fewer qualifying D2D pairs than requested in a realization.
class ShortfallError : public std::runtime_error
{
  public:
    ShortfallError(int found, int requested);

    int found() const noexcept { return found_; }
    int requested() const noexcept { return requested_; }

  private:
    int found_;
    int requested_;
};

//! The per-slot success probability is zero, so no slot budget reaches eta.
class UnreachableTargetError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

}  // namespace d2d
