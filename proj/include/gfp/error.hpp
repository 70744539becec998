#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gfp {

enum class ErrorCode {
    InvalidArgument,
    InvalidTask,
    InvalidSystem,
    EmptyTaskList,
    IndexOutOfRange,
    HyperperiodOverflow,
    PolicyMismatch,
    UtilizationOverload,
    Precondition,
    HorizonOverflow,
    ResampleLimit,
    ParseError,
};

std::string_view to_string(ErrorCode code);

// Library-wide exception. Every failure that the interface documents as an
// error carries one of the codes above so callers can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace gfp
