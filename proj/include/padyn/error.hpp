#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace padyn {

enum class ErrorKind {
    NotPrime,
    BadParameter,
    DivisionByZero,
    PrecisionExhausted,
    OutOfDomain,
    NotARoot,
    NotSimpleRoot,
    PoleHit,
    NotFixed,
    RegimeViolation,
    IdenticalPrefix,
    ZeroPartition,
    EnumerationGuard,
    BadField,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NotARoot: return "NotARoot";
    case ErrorKind::NotSimpleRoot: return "NotSimpleRoot";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::NotFixed: return "NotFixed";
    case ErrorKind::RegimeViolation: return "RegimeViolation";
    case ErrorKind::IdenticalPrefix: return "IdenticalPrefix";
    case ErrorKind::ZeroPartition: return "ZeroPartition";
    case ErrorKind::EnumerationGuard: return "EnumerationGuard";
    case ErrorKind::BadField: return "BadField";
    }
    return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace padyn
