#pragma once

#include <stdexcept>
#include <string>

namespace flockdyn {

enum class ErrorCode {
    DomainError,
    UnsupportedOrder,
    Overflow,
    DegenerateDenominator,
    CaseMismatch,
    NoRoot,
    BracketFailure,
    PositivityFailure,
    RegimeViolation,
    OutOfSupport,
    QuadratureNonConvergence,
    VerificationFailure,
    NumericalBlowup,
    InvalidConfig,
    Io,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// CLI can map it onto its exit-code contract.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace flockdyn
