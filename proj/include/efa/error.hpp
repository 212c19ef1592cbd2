#ifndef EFA_ERROR_HPP
#define EFA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace efa
{
/// Root of all errors raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent user configuration (unknown names, CFL violations, etc.).
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error
{
public:
    using Error::Error;
};

/// Non-finite values appeared while time stepping.
class InstabilityError : public Error
{
public:
    using Error::Error;
};

/// A function argument lies outside its mathematical domain.
class DomainError : public Error
{
public:
    using Error::Error;
};

/// Requested data range is not available (e.g. averaging window outside a stored trajectory).
class RangeError : public Error
{
public:
    using Error::Error;
};

/// Slope fit could not be performed.
class RegressionError : public Error
{
public:
    using Error::Error;
};

/// Singular cell problem whose kernel is not one-dimensional.
class DegeneracyError : public Error
{
public:
    using Error::Error;
};

/// Internal linear-algebra or construction failure.
class InternalError : public Error
{
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw PreconditionError(what);
}
} // namespace efa

#endif // EFA_ERROR_HPP
