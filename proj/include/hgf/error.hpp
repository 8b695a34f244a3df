#pragma once

#include <stdexcept>
#include <string>

namespace hgf
{

/// A precondition on an argument or configuration value was violated.
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested tree exceeds the configured leaf budget.
class BudgetError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail
{
inline void require(bool cond, const std::string& what)
{
    if (!cond) throw ValidationError(what);
}
} // namespace detail

} // namespace hgf
