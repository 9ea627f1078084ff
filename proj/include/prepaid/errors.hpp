#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prepaid {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition or type invariant.
class InvalidArgument : public Error
{
public:
    using Error::Error;
};

/// Matrix/plan dimensions disagree with the grid or load set they are used with.
class ShapeMismatch : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

enum class DataErrorKind
{
    MissingColumn,
    RowCountMismatch,
    NegativePower,
    UnparseableNumber,
    Io,
};

/// Load-data ingestion failure. `line` is 1-based (0 when not tied to a line).
class DataError : public Error
{
public:
    DataError(DataErrorKind kind, std::size_t line, const std::string& what)
        : Error(what + (line > 0 ? " (line " + std::to_string(line) + ")" : std::string{})),
          kind_(kind),
          line_(line)
    {}

    DataErrorKind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }

private:
    DataErrorKind kind_;
    std::size_t line_;
};

enum class MilpErrorKind
{
    InfeasibleConstants,
    StructureMismatch,
    InstanceTooLarge,
    MissingVariable,
    SolverNotFound,
    SolutionParseError,
    Timeout,
    Io,
};

class MilpError : public Error
{
public:
    MilpError(MilpErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}

    MilpErrorKind kind() const noexcept { return kind_; }

private:
    MilpErrorKind kind_;
};

}  // namespace prepaid
