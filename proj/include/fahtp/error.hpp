#pragma once

#include <stdexcept>
#include <string>

namespace fahtp {

enum class ErrorCode {
    invalid_argument,
    overdetermined_support,
    rank_deficient,
    too_large,
    degenerate_column,
    no_trace,
    parse_error,
    dimension_mismatch,
    io_error,
    unfittable,
};

inline const char* to_string(ErrorCode code)
{
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid argument";
        case ErrorCode::overdetermined_support: return "support larger than sample size";
        case ErrorCode::rank_deficient: return "rank-deficient design on support";
        case ErrorCode::too_large: return "combinatorial size guard exceeded";
        case ErrorCode::degenerate_column: return "zero-norm column";
        case ErrorCode::no_trace: return "trace not recorded";
        case ErrorCode::parse_error: return "parse error";
        case ErrorCode::dimension_mismatch: return "dimension mismatch";
        case ErrorCode::io_error: return "i/o error";
        case ErrorCode::unfittable: return "no model size could be fitted";
    }
    return "unknown error";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

inline void require(bool cond, const std::string& what)
{
    if (!cond) fail(ErrorCode::invalid_argument, what);
}

} // namespace detail
} // namespace fahtp
