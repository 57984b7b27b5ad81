#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairshare {

enum class ErrorCode {
    InvalidParameter,
    ZeroPsi,
    NearDefectiveMatrix,
    DegenerateDenominator,
    ZeroDenominator,
    ZFormSingular,
    EmptyCandidateSet,
    InfeasibleProblem,
    InfeasibleHomophily,
    DegenerateSample,
    NoEvents,
    UnknownPreset,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Callers that care about the failure kind switch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fairshare
