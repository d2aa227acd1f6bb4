#pragma once

#include <stdexcept>
#include <string>

namespace cmssa {

/// Failure categories. The CLI maps `numeric` to exit code 1 and every
/// other kind to exit code 2.
enum class ErrorKind {
    parse,
    schema,
    data,
    parameter,
    shape,
    window_too_large,
    insufficient_data,
    degenerate_input,
    io,
    numeric,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

} // namespace cmssa
