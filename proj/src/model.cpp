#include "fairshare/model.hpp"

#include <cmath>
#include <fmt/format.h>

#include <boost/math/special_functions/beta.hpp>

#include "fairshare/error.hpp"

namespace fairshare {

void validate(const PreferenceSpec& spec)
{
    if (!(spec.alpha > 0.0) || !(spec.beta > 0.0))
        throw Error(ErrorCode::InvalidParameter, "Beta shapes must be positive");
    if (!(spec.value > 0.0))
        throw Error(ErrorCode::InvalidParameter, "like value must be positive");
    if (!(spec.cost >= 0.0))
        throw Error(ErrorCode::InvalidParameter, "click cost must be non-negative");
}

double click_fraction(const PreferenceSpec& spec)
{
    validate(spec);
    const double tau = spec.threshold();
    if (tau <= 0.0) return 1.0;
    if (tau >= 1.0) return 0.0;
    return boost::math::ibetac(spec.alpha, spec.beta, tau);
}

// p * Beta(a, b) density = mean * Beta(a + 1, b) density.
double compute_psi(const PreferenceSpec& spec)
{
    validate(spec);
    const double tau = spec.threshold();
    if (tau >= 1.0)
        throw Error(ErrorCode::ZeroPsi,
                    fmt::format("click threshold {} >= 1 gives a zero click-and-like rate", tau));
    if (tau <= 0.0) return spec.mean();
    return spec.mean() * boost::math::ibetac(spec.alpha + 1.0, spec.beta, tau);
}

// (1 - p) * Beta(a, b) density = b / (a + b) * Beta(a, b + 1) density.
double click_no_like_fraction(const PreferenceSpec& spec)
{
    validate(spec);
    const double tau = spec.threshold();
    if (tau >= 1.0) return 0.0;
    const double weight = spec.beta / (spec.alpha + spec.beta);
    if (tau <= 0.0) return weight;
    return weight * boost::math::ibetac(spec.alpha, spec.beta + 1.0, tau);
}

double share_consistency_residual(const ModelParams& params)
{
    return std::abs(params.q_A * params.pi(Group::A) + (1.0 - params.q_B) * params.pi(Group::B) -
                    params.pi(Group::A));
}

ValidationReport validate(const ModelParams& params, ValidationMode mode)
{
    ValidationReport report;
    if (!(params.pi_A > 0.0 && params.pi_A < 1.0))
        throw Error(ErrorCode::InvalidParameter, "pi_A must lie in (0, 1)");
    if (params.horizon < 1)
        throw Error(ErrorCode::InvalidParameter, "horizon T must be a positive integer");
    if (params.total_mass && !(*params.total_mass > 0.0))
        throw Error(ErrorCode::InvalidParameter, "total mass M must be positive");

    for (Group g : kGroups) {
        const double q = params.q(g);
        const auto label = to_string(g);
        if (mode == ValidationMode::Strict) {
            if (!(q > 0.5 && q < 1.0))
                throw Error(ErrorCode::InvalidParameter,
                            fmt::format("q_{} = {} outside (1/2, 1)", label, q));
        } else {
            if (!(q > 0.0 && q <= 1.0))
                throw Error(ErrorCode::InvalidParameter,
                            fmt::format("q_{} = {} outside (0, 1]", label, q));
            if (!(q > 0.5 && q < 1.0))
                report.warnings.push_back(fmt::format("q_{} = {:.4f} outside (1/2, 1)", label, q));
        }
        for (Article s : kArticles) {
            const double psi = params.psi(g, s);
            if (!(psi > 0.0 && psi <= 1.0))
                throw Error(ErrorCode::ZeroPsi, fmt::format("psi_{},{} = {} outside (0, 1]", label,
                                                            to_string(s), psi));
        }
    }

    const double residual = share_consistency_residual(params);
    if (residual > 1e-9)
        report.warnings.push_back(fmt::format(
            "group shares are not stationary: |q_A pi_A + (1 - q_B) pi_B - pi_A| = {:.4g}", residual));

    if (!(params.psi(Group::A, Article::a) > params.psi(Group::A, Article::b)))
        report.warnings.push_back("psi_A,a <= psi_A,b: group A does not prefer article a");
    if (!(params.psi(Group::B, Article::b) > params.psi(Group::B, Article::a)))
        report.warnings.push_back("psi_B,b <= psi_B,a: group B does not prefer article b");
    return report;
}

ParamsWithReport params_from_preferences(const PreferenceTable& prefs, double pi_A, double q_A,
                                         double q_B, int horizon, ValidationMode mode)
{
    ModelParams params;
    params.pi_A = pi_A;
    params.q_A = q_A;
    params.q_B = q_B;
    params.horizon = horizon;
    for (Group g : kGroups)
        for (Article s : kArticles) params.psi(g, s) = compute_psi(prefs(g, s));
    auto report = validate(params, mode);
    return {params, std::move(report)};
}

}  // namespace fairshare
