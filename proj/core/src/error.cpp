#include "flockdyn/error.hpp"

namespace flockdyn {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::CaseMismatch: return "CaseMismatch";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::PositivityFailure: return "PositivityFailure";
    case ErrorCode::RegimeViolation: return "RegimeViolation";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::VerificationFailure: return "VerificationFailure";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace flockdyn
