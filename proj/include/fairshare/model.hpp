#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairshare/types.hpp"

namespace fairshare {

/// Like-probability distribution Beta(alpha, beta) plus the click cost and like value
/// for one (group, article) pair. A user with like probability p clicks iff value * p >= cost.
struct PreferenceSpec {
    double alpha = 1.0;
    double beta = 1.0;
    double cost = 1.0;
    double value = 2.0;

    double threshold() const { return cost / value; }
    double mean() const { return alpha / (alpha + beta); }

    bool operator==(const PreferenceSpec&) const = default;
};

using PreferenceTable = GroupArticle<PreferenceSpec>;

/// Throws InvalidParameter on non-positive shapes or value, or negative cost.
void validate(const PreferenceSpec& spec);

/// Click-and-like rate: integral of p dF(p) over [cost/value, 1].
/// Throws ZeroPsi when cost/value >= 1.
double compute_psi(const PreferenceSpec& spec);

/// Fraction of shown users who click: 1 - F(cost/value).
double click_fraction(const PreferenceSpec& spec);

/// Fraction of shown users who click but do not like: integral of (1 - p) dF over [cost/value, 1].
double click_no_like_fraction(const PreferenceSpec& spec);

enum class ValidationMode { Strict, Simulation };

struct ModelParams {
    double pi_A = 0.5;
    double q_A = 0.75;
    double q_B = 0.75;
    GroupArticle<double> psi = GroupArticle<double>::filled(0.5);
    int horizon = 10;
    /// Carried for bookkeeping; the dynamics are per unit mass.
    std::optional<double> total_mass;

    double pi(Group g) const { return g == Group::A ? pi_A : 1.0 - pi_A; }
    double q(Group g) const { return g == Group::A ? q_A : q_B; }
    double rate(Group g, Article s) const { return psi(g, s); }
};

struct ValidationReport {
    std::vector<std::string> warnings;
    bool ok() const { return warnings.empty(); }
};

/// Hard violations throw InvalidParameter; soft ones (group-share consistency,
/// preference ordering, and in Simulation mode homophily outside (1/2, 1)) are returned.
ValidationReport validate(const ModelParams& params, ValidationMode mode);

/// |q_A pi_A + (1 - q_B) pi_B - pi_A|; zero when group shares are stationary.
double share_consistency_residual(const ModelParams& params);

struct ParamsWithReport {
    ModelParams params;
    ValidationReport report;
};

ParamsWithReport params_from_preferences(const PreferenceTable& prefs, double pi_A, double q_A,
                                         double q_B, int horizon,
                                         ValidationMode mode = ValidationMode::Simulation);

}  // namespace fairshare
