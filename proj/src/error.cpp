#include "isingpa/error.hpp"

namespace isingpa {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::LatticeTooSmall: return "LatticeTooSmall";
        case ErrorKind::LatticeMismatch: return "LatticeMismatch";
        case ErrorKind::FamilyTooLarge: return "FamilyTooLarge";
        case ErrorKind::MissingSpin: return "MissingSpin";
        case ErrorKind::TooLargeForExact: return "TooLargeForExact";
        case ErrorKind::InvalidSchedule: return "InvalidSchedule";
        case ErrorKind::NotClean: return "NotClean";
        case ErrorKind::AntiferromagneticUnsupported: return "AntiferromagneticUnsupported";
        case ErrorKind::CoalescenceTimeout: return "CoalescenceTimeout";
        case ErrorKind::MotifScheduleMismatch: return "MotifScheduleMismatch";
        case ErrorKind::NotNormalized: return "NotNormalized";
        case ErrorKind::FerromagneticOnly: return "FerromagneticOnly";
        case ErrorKind::DegenerateFit: return "DegenerateFit";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace isingpa
