#include "fairshare/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <fmt/format.h>

#include "fairshare/error.hpp"

namespace fairshare {

using enum Group;
using enum Article;

namespace {

constexpr double kClip = 1e-6;

struct LogMoments {
    double log_x = 0.0;      // mean log x
    double log_1mx = 0.0;    // mean log (1 - x)
};

double mean_log_likelihood(double a, double b, const LogMoments& m)
{
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * m.log_x + (b - 1.0) * m.log_1mx;
}

std::array<double, 2> score(double a, double b, const LogMoments& m)
{
    using boost::math::digamma;
    const double dab = digamma(a + b);
    return {dab - digamma(a) + m.log_x, dab - digamma(b) + m.log_1mx};
}

}  // namespace

BetaFit fit_beta_mle(std::span<const double> samples)
{
    if (samples.size() < 2) throw Error(ErrorCode::DegenerateSample, "Beta fit needs at least two samples");

    BetaFit fit;
    fit.sample_count = samples.size();
    std::vector<double> x(samples.begin(), samples.end());
    for (double& v : x) {
        if (!(v >= 0.0 && v <= 1.0))
            throw Error(ErrorCode::InvalidParameter, fmt::format("sample {} outside [0, 1]", v));
        const double c = std::clamp(v, kClip, 1.0 - kClip);
        if (c != v) ++fit.clipped;
        v = c;
    }
    if (fit.clipped > 0)
        fit.warnings.push_back(fmt::format("clipped {} boundary samples to [{:g}, 1 - {:g}]", fit.clipped, kClip, kClip));
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); }))
        throw Error(ErrorCode::DegenerateSample, "all samples are equal");

    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    LogMoments lm;
    for (double v : x) {
        mean += v;
        lm.log_x += std::log(v);
        lm.log_1mx += std::log1p(-v);
    }
    mean /= n;
    lm.log_x /= n;
    lm.log_1mx /= n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= n;

    const double common = std::max(mean * (1.0 - mean) / var - 1.0, 1e-3);
    double a = mean * common;
    double b = (1.0 - mean) * common;
    double ll = mean_log_likelihood(a, b, lm);
    fit.moments_log_likelihood = ll * n;

    std::array<double, 2> g = score(a, b, lm);
    for (fit.iterations = 0; fit.iterations < 200; ++fit.iterations) {
        if (std::hypot(g[0], g[1]) <= 1e-12) break;
        using boost::math::trigamma;
        const double tab = trigamma(a + b);
        const double h11 = tab - trigamma(a);
        const double h22 = tab - trigamma(b);
        const double h12 = tab;
        const double det = h11 * h22 - h12 * h12;
        // Newton direction -H^{-1} g; H is negative definite for the Beta family.
        double da = -(h22 * g[0] - h12 * g[1]) / det;
        double db = -(-h12 * g[0] + h11 * g[1]) / det;
        double step = 1.0;
        bool moved = false;
        for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
            const double na = a + step * da;
            const double nb = b + step * db;
            if (!(na > 0.0 && nb > 0.0)) continue;
            const double nll = mean_log_likelihood(na, nb, lm);
            if (nll >= ll) {
                a = na;
                b = nb;
                ll = nll;
                moved = true;
                break;
            }
        }
        g = score(a, b, lm);
        if (!moved) break;
    }

    fit.alpha = a;
    fit.beta = b;
    fit.log_likelihood = ll * n;
    fit.gradient_norm = std::hypot(g[0], g[1]);
    return fit;
}

HomophilyFit fit_homophily(const EventLog& log)
{
    std::array<long, 2> shares{};
    std::array<long, 2> intra{};
    for (const EventRow& r : log.rows) {
        if (!r.sharer_group) continue;
        ++shares[index(*r.sharer_group)];
        if (*r.sharer_group == r.receiver_group) ++intra[index(*r.sharer_group)];
    }
    for (Group g : kGroups)
        if (shares[index(g)] == 0)
            throw Error(ErrorCode::NoEvents, fmt::format("no share events from group {}", to_string(g)));

    HomophilyFit fit;
    fit.shares_A = shares[0];
    fit.shares_B = shares[1];
    fit.q_A = static_cast<double>(intra[0]) / static_cast<double>(shares[0]);
    fit.q_B = static_cast<double>(intra[1]) / static_cast<double>(shares[1]);
    for (Group g : kGroups) {
        const double q = g == A ? fit.q_A : fit.q_B;
        if (!(q > 0.5 && q < 1.0))
            fit.warnings.push_back(fmt::format("estimated q_{} = {:.4f} outside (1/2, 1)", to_string(g), q));
    }
    return fit;
}

std::vector<double> like_probability_samples(const EventLog& log, Group g, Article s)
{
    std::vector<double> direct;
    std::map<long long, std::pair<long, long>> per_user;  // clicks, likes
    for (const EventRow& r : log.rows) {
        if (r.receiver_group != g || r.article != s) continue;
        if (r.like_prob_sample) {
            direct.push_back(*r.like_prob_sample);
        } else if (r.user_id && r.clicked) {
            auto& [clicks, likes] = per_user[*r.user_id];
            ++clicks;
            likes += r.liked;
        }
    }
    if (!direct.empty()) return direct;
    std::vector<double> rates;
    for (const auto& [user, cl] : per_user)
        if (cl.first >= 5) rates.push_back(static_cast<double>(cl.second) / static_cast<double>(cl.first));
    return rates;
}

PreferenceTable default_preferences(const GroupArticle<std::pair<double, double>>& shapes,
                                    const RunDefaults& defaults)
{
    PreferenceTable prefs;
    for (Group g : kGroups)
        for (Article s : kArticles) {
            const double value = s == preferred(g) ? defaults.value_in_group : defaults.value_out_group;
            prefs(g, s) = {shapes(g, s).first, shapes(g, s).second, defaults.cost, value};
        }
    return prefs;
}

EventFit fit_events(const EventLog& log)
{
    EventFit fit;
    GroupArticle<std::pair<double, double>> shapes;
    for (Group g : kGroups)
        for (Article s : kArticles) {
            const auto samples = like_probability_samples(log, g, s);
            if (samples.size() < 2)
                throw Error(ErrorCode::DegenerateSample,
                            fmt::format("cell ({},{}) has {} like-probability samples", to_string(g),
                                        to_string(s), samples.size()));
            fit.shapes(g, s) = fit_beta_mle(samples);
            shapes(g, s) = {fit.shapes(g, s).alpha, fit.shapes(g, s).beta};
            for (const auto& w : fit.shapes(g, s).warnings)
                fit.warnings.push_back(fmt::format("({},{}): {}", to_string(g), to_string(s), w));
        }
    fit.homophily = fit_homophily(log);
    fit.warnings.insert(fit.warnings.end(), fit.homophily.warnings.begin(), fit.homophily.warnings.end());

    long seeded = 0;
    long seeded_A = 0;
    int horizon = 1;
    for (const EventRow& r : log.rows) {
        horizon = std::max(horizon, r.t);
        if (r.t == 1) {
            ++seeded;
            seeded_A += r.receiver_group == A;
        }
    }
    if (seeded == 0) throw Error(ErrorCode::NoEvents, "no t = 1 rows to estimate group shares from");

    fit.prefs = default_preferences(shapes);
    auto built = params_from_preferences(fit.prefs, static_cast<double>(seeded_A) / seeded, fit.homophily.q_A,
                                         fit.homophily.q_B, horizon, ValidationMode::Simulation);
    fit.params = built.params;
    fit.warnings.insert(fit.warnings.end(), built.report.warnings.begin(), built.report.warnings.end());
    return fit;
}

namespace {

struct PresetRow {
    std::string_view name;
    double pi_A, pi_B, q_A, q_B;
    std::array<std::pair<double, double>, 4> shapes;  // Aa, Ab, Ba, Bb
};

constexpr std::array<PresetRow, 4> kPresetRows{{
    {"twitter-us-elections", 0.432, 0.567, 0.9877, 1.0000,
     {{{41.46, 556.87}, {0.75, 413.47}, {6.10, 1519.85}, {2153.00, 23467.67}}}},
    {"twitter-brexit", 0.480, 0.520, 0.6800, 0.3840,
     {{{1.64, 62.92}, {1.72, 380.14}, {1.48, 27.40}, {39.60, 505.90}}}},
    {"twitter-abortion", 0.623, 0.370, 0.5500, 0.8200,
     {{{2.30, 27.59}, {0.16, 50.83}, {0.25, 7.40}, {2.20, 53.70}}}},
    {"facebook", 0.500, 0.500, 0.7200, 0.6800,
     {{{0.95, 1.35}, {0.18, 2.76}, {0.10, 3.09}, {0.88, 1.62}}}},
}};

}  // namespace

std::vector<std::string> preset_names()
{
    std::vector<std::string> out;
    for (const auto& row : kPresetRows) out.emplace_back(row.name);
    return out;
}

Preset preset(std::string_view name)
{
    const auto it = std::find_if(kPresetRows.begin(), kPresetRows.end(),
                                 [&](const PresetRow& r) { return r.name == name; });
    if (it == kPresetRows.end())
        throw Error(ErrorCode::UnknownPreset, fmt::format("unknown preset '{}'", name));

    Preset p;
    p.name = std::string(name);
    GroupArticle<std::pair<double, double>> shapes;
    std::copy(it->shapes.begin(), it->shapes.end(), shapes.cells.begin());
    p.prefs = default_preferences(shapes, p.defaults);
    auto built = params_from_preferences(p.prefs, it->pi_A, it->q_A, it->q_B, p.defaults.horizon,
                                         ValidationMode::Simulation);
    p.params = built.params;
    p.report = std::move(built.report);
    // Only pi_A is stored; pi_B is its complement.
    if (std::abs(it->pi_A + it->pi_B - 1.0) > 1e-9)
        p.report.warnings.push_back(fmt::format("listed group shares ({}, {}) sum to {:.3f}; using pi_B = 1 - pi_A",
                                                it->pi_A, it->pi_B, it->pi_A + it->pi_B));
    return p;
}

}  // namespace fairshare
