#pragma once

#include <stdexcept>
#include <string>

namespace rhlab {

/// Error categories surfaced by the library. The CLI maps these to exit codes.
enum class ErrorKind {
    Config,              // invalid configuration values
    Addressing,          // row/col out of range, missing neighbor
    Protocol,            // command issued in an illegal bank state
    Budget,              // hammer count exceeds the refresh-window budget
    UnsupportedPattern,  // trace shape the engine cannot attribute (unequal aggressor counts)
    Calibration,         // calibration search failed to converge
    Shape,               // dimension mismatch in network/dataset plumbing
    Input,               // missing or malformed input files
    Parse,               // unparseable trace/config text
    Metric,              // undefined metric (e.g. zero-mean stability)
    Internal,            // broken invariant; always a bug
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "config error";
        case ErrorKind::Addressing: return "addressing error";
        case ErrorKind::Protocol: return "protocol error";
        case ErrorKind::Budget: return "budget error";
        case ErrorKind::UnsupportedPattern: return "unsupported-pattern error";
        case ErrorKind::Calibration: return "calibration error";
        case ErrorKind::Shape: return "shape error";
        case ErrorKind::Input: return "input error";
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::Metric: return "undefined-metric error";
        case ErrorKind::Internal: return "internal error";
    }
    return "unknown error";
}

}  // namespace rhlab
