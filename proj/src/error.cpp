#include "fairshare/error.hpp"

#include "fairshare/types.hpp"

namespace fairshare {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::ZeroPsi: return "ZeroPsi";
    case ErrorCode::NearDefectiveMatrix: return "NearDefectiveMatrix";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::ZFormSingular: return "ZFormSingular";
    case ErrorCode::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::InfeasibleProblem: return "InfeasibleProblem";
    case ErrorCode::InfeasibleHomophily: return "InfeasibleHomophily";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::NoEvents: return "NoEvents";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

std::string_view to_string(Group g) { return g == Group::A ? "A" : "B"; }
std::string_view to_string(Article s) { return s == Article::a ? "a" : "b"; }

Group parse_group(std::string_view text)
{
    if (text == "A") return Group::A;
    if (text == "B") return Group::B;
    throw Error(ErrorCode::ConfigError, "unknown group label '" + std::string(text) + "'");
}

Article parse_article(std::string_view text)
{
    if (text == "a") return Article::a;
    if (text == "b") return Article::b;
    throw Error(ErrorCode::ConfigError, "unknown article label '" + std::string(text) + "'");
}

void validate(const Targeting& theta)
{
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(theta.theta_A_a) || !in_unit(theta.theta_B_a))
        throw Error(ErrorCode::InvalidParameter, "targeting fractions must lie in [0, 1]");
}

}  // namespace fairshare
