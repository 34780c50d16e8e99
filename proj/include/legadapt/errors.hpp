#ifndef LEGADAPT_ERRORS_HPP
#define LEGADAPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace legadapt
{

/// A caller broke an operation's precondition (index out of range, too few samples, ...).
class ContractViolation : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative numeric routine did not reach its tolerance.
class NumericFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Input data is malformed or inconsistent with the model (bad rows, out-of-range values).
class DataError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A configuration file or option is invalid.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Command-line misuse, including inputs too small for any fit.
class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw ContractViolation(what);
}

} // namespace legadapt

#endif // LEGADAPT_ERRORS_HPP
