#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nblab {

enum class ErrorKind {
    InvalidArgument,
    PoleAtOne,
    AccuracyUnreachable,
    DomainError,
    ResourceLimit,
    DegenerateLength,
    IllConditioned,
    ParseError,
    VerificationFailure,
    SingularAtZero,
    ZeroConstantTerm,
    MultipleRoot,
    SingularPoint,
};

constexpr std::string_view kind_name(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::PoleAtOne: return "PoleAtOne";
    case ErrorKind::AccuracyUnreachable: return "AccuracyUnreachable";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::DegenerateLength: return "DegenerateLength";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::VerificationFailure: return "VerificationFailure";
    case ErrorKind::SingularAtZero: return "SingularAtZero";
    case ErrorKind::ZeroConstantTerm: return "ZeroConstantTerm";
    case ErrorKind::MultipleRoot: return "MultipleRoot";
    case ErrorKind::SingularPoint: return "SingularPoint";
    }
    return "Unknown";
}

/// Numeric failures (as opposed to bad input) are the ones a caller may retry
/// with a different accuracy or problem size.
constexpr bool is_numeric_failure(ErrorKind kind) noexcept
{
    return kind == ErrorKind::IllConditioned || kind == ErrorKind::AccuracyUnreachable;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + message), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Thrown when a linear system cannot be factored reliably. Carries the
/// condition estimate that triggered the failure.
class IllConditionedError : public Error {
public:
    IllConditionedError(const std::string& message, double condition_estimate)
        : Error(ErrorKind::IllConditioned,
                message + " (condition estimate " + std::to_string(condition_estimate) + ")"),
          condition_estimate_(condition_estimate)
    {
    }

    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// Parse failure with the offending 1-based line number (0 when not tied to a line).
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line)
        : Error(ErrorKind::ParseError,
                line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace nblab
