#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairshare/events.hpp"
#include "fairshare/fairness.hpp"
#include "fairshare/model.hpp"

namespace fairshare {

struct BetaFit {
    double alpha = 0.0;
    double beta = 0.0;
    double log_likelihood = 0.0;
    /// Log-likelihood at the method-of-moments starting point.
    double moments_log_likelihood = 0.0;
    /// Norm of the per-sample score at the returned estimate.
    double gradient_norm = 0.0;
    int iterations = 0;
    std::size_t sample_count = 0;
    std::size_t clipped = 0;
    std::vector<std::string> warnings;
};

/// Maximum-likelihood Beta fit: method-of-moments start, then damped Newton steps.
/// Samples outside [1e-6, 1 - 1e-6] are clipped with a warning.
/// Throws DegenerateSample for fewer than two samples or when all samples are equal.
BetaFit fit_beta_mle(std::span<const double> samples);

struct HomophilyFit {
    double q_A = 0.0;
    double q_B = 0.0;
    long shares_A = 0;  // rows shared by an A user
    long shares_B = 0;
    std::vector<std::string> warnings;
};

/// q_g = shares from g received in g / shares from g. Throws NoEvents when a group
/// shared nothing.
HomophilyFit fit_homophily(const EventLog& log);

/// Like-probability samples for one cell: like_prob_sample where present, else the
/// empirical like rate of each user with at least five clicks in that cell.
std::vector<double> like_probability_samples(const EventLog& log, Group g, Article s);

struct EventFit {
    ModelParams params;
    PreferenceTable prefs;
    GroupArticle<BetaFit> shapes;
    HomophilyFit homophily;
    std::vector<std::string> warnings;
};

/// Fits every cell's Beta shapes, both homophily rates, pi_A (share of A among t = 1
/// rows), and the horizon (largest t). Costs and values are not observable in a log;
/// the defaults c = 1, v = 2000 in-group, v = 200 out-group are used.
EventFit fit_events(const EventLog& log);

/// Table-3 style defaults shared by the presets.
struct RunDefaults {
    int trials = 25;
    int horizon = 10;
    long n_agents = 100000;
    double cost = 1.0;
    double value_in_group = 2000.0;
    double value_out_group = 200.0;
    FairnessBounds bounds{0.25, 2.0};
};

struct Preset {
    std::string name;
    ModelParams params;
    PreferenceTable prefs;
    ValidationReport report;
    RunDefaults defaults;
};

std::vector<std::string> preset_names();

/// Built-in dataset presets: facebook, twitter-us-elections, twitter-brexit,
/// twitter-abortion. Throws UnknownPreset.
Preset preset(std::string_view name);

/// Shapes paired with the default cost and in/out-group values.
PreferenceTable default_preferences(const GroupArticle<std::pair<double, double>>& shapes,
                                    const RunDefaults& defaults = {});

}  // namespace fairshare
