#include "cmssa/error.hpp"

namespace cmssa {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::data: return "data error";
    case ErrorKind::parameter: return "invalid parameter";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::window_too_large: return "window too large";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::degenerate_input: return "degenerate input";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::numeric: return "numeric error";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
{
}

void fail(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

} // namespace cmssa
