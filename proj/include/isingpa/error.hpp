#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isingpa {

enum class ErrorKind {
    LatticeTooSmall,
    LatticeMismatch,
    FamilyTooLarge,
    MissingSpin,
    TooLargeForExact,
    InvalidSchedule,
    NotClean,
    AntiferromagneticUnsupported,
    CoalescenceTimeout,
    MotifScheduleMismatch,
    NotNormalized,
    FerromagneticOnly,
    DegenerateFit,
    InvalidArgument,
    ParseError,
    ValidationError,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the experiment runner's error rows) can report it by name.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace isingpa
