#include "fairshare/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "fairshare/error.hpp"
#include "fairshare/optimizer.hpp"
#include "fairshare/parallel.hpp"
#include "fairshare/rng.hpp"

namespace fairshare {

using enum Group;
using enum Article;

std::string_view to_string(PolicyKind kind)
{
    switch (kind) {
    case PolicyKind::Opt: return "opt";
    case PolicyKind::Ratio: return "ratio";
    case PolicyKind::Half: return "half";
    case PolicyKind::Explicit: return "explicit";
    }
    return "?";
}

PolicyKind parse_policy_kind(std::string_view text)
{
    if (text == "opt") return PolicyKind::Opt;
    if (text == "ratio") return PolicyKind::Ratio;
    if (text == "half") return PolicyKind::Half;
    if (text == "explicit") return PolicyKind::Explicit;
    throw Error(ErrorCode::ConfigError, "unknown policy '" + std::string(text) + "'");
}

Targeting resolve_policy(const Policy& policy, const PropagationCoefficients& coeffs)
{
    switch (policy.kind) {
    case PolicyKind::Opt: return solve_agnostic(coeffs).theta;
    case PolicyKind::Half: return {0.5, 0.5};
    case PolicyKind::Explicit: validate(policy.theta); return policy.theta;
    case PolicyKind::Ratio: {
        const FairSolution sol = solve_fair(coeffs, policy.bounds);
        if (!sol.feasible)
            throw Error(ErrorCode::InfeasibleProblem, "ratio policy: fairness bounds admit no targeting");
        return sol.theta;
    }
    }
    return {};
}

double SimResult::mean_liked_mass(Group g, Article s, int t) const
{
    double acc = 0.0;
    for (std::size_t k = 0; k < trials.size(); ++k) acc += counts(static_cast<int>(k), g, s, t).liked;
    return acc / (static_cast<double>(trials.size()) * static_cast<double>(n_agents));
}

double SimResult::stderr_liked_mass(Group g, Article s, int t) const
{
    const std::size_t k = trials.size();
    if (k < 2) return 0.0;
    const double mean = mean_liked_mass(g, s, t);
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double x = static_cast<double>(counts(static_cast<int>(i), g, s, t).liked) / n_agents - mean;
        ss += x * x;
    }
    return std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
}

double SimResult::mean_total_liked_mass() const
{
    double acc = 0.0;
    for (Group g : kGroups)
        for (Article s : kArticles)
            for (int t = 1; t <= horizon; ++t) acc += mean_liked_mass(g, s, t);
    return acc;
}

std::vector<long> largest_remainder(long n, std::span<const double> weights)
{
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidParameter, "allocation weights sum to zero");
    std::vector<long> parts(weights.size());
    std::vector<double> remainder(weights.size());
    long assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(n) * weights[i] / total;
        parts[i] = static_cast<long>(std::floor(exact));
        remainder[i] = exact - static_cast<double>(parts[i]);
        assigned += parts[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return remainder[x] > remainder[y]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++parts[order[k % order.size()]];
    return parts;
}

GroupArticle<long> initial_allocation(long n, double pi_A, const Targeting& theta)
{
    const std::array<double, 4> weights{pi_A * theta.theta(A, a), pi_A * theta.theta(A, b),
                                        (1.0 - pi_A) * theta.theta(B, a), (1.0 - pi_A) * theta.theta(B, b)};
    const std::vector<long> parts = largest_remainder(n, weights);
    GroupArticle<long> out;
    std::copy(parts.begin(), parts.end(), out.cells.begin());
    return out;
}

namespace {

void check_config(const SimConfig& cfg)
{
    if (cfg.n_agents < 1 || cfg.trials < 1 || cfg.horizon < 1)
        throw Error(ErrorCode::InvalidParameter, "agents, trials and horizon must be positive");
}

struct Viewer {
    const PreferenceSpec* spec;
    std::uniform_real_distribution<double> unit{0.0, 1.0};

    // Returns (clicked, liked) and the drawn like probability.
    std::pair<bool, bool> view(Engine& eng, double& p)
    {
        p = sample_beta(eng, spec->alpha, spec->beta);
        const bool clicked = spec->value * p >= spec->cost;
        const bool liked = clicked && unit(eng) < p;
        return {clicked, liked};
    }
};

struct MassTrialOutput {
    TrialResult result;
    std::vector<EventRow> events;
};

MassTrialOutput run_mass_trial(const PreferenceTable& prefs, const ModelParams& params,
                               const GroupArticle<long>& seeded, const SimConfig& cfg, int trial)
{
    Engine eng = make_engine(cfg.master_seed, static_cast<std::uint64_t>(trial));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    MassTrialOutput out;
    out.result.steps.resize(static_cast<std::size_t>(cfg.horizon));
    long long next_id = 0;

    // arriving[receiver][article][sharer]
    using Arrivals = std::array<std::array<std::array<long, 2>, 2>, 2>;
    Arrivals arriving{};
    for (int t = 1; t <= cfg.horizon; ++t) {
        Arrivals next{};
        StepCounts& step = out.result.steps[static_cast<std::size_t>(t - 1)];
        for (Group g : kGroups)
            for (Article s : kArticles) {
                Viewer viewer{&prefs(g, s)};
                CellCounts& cell = step(g, s);
                auto process = [&](long count, std::optional<Group> sharer) {
                    for (long k = 0; k < count; ++k) {
                        double p = 0.0;
                        const auto [clicked, liked] = viewer.view(eng, p);
                        ++cell.shown;
                        cell.clicked += clicked;
                        cell.liked += liked;
                        if (liked) {
                            const Group succ = unit(eng) < params.q(g) ? g : opposite(g);
                            ++next[index(succ)][index(s)][index(g)];
                        }
                        if (cfg.record_events)
                            out.events.push_back({t, sharer, g, s, clicked, liked, p,
                                                  static_cast<long long>(trial) * 1'000'000'000LL + next_id});
                        ++next_id;
                    }
                };
                if (t == 1) {
                    process(seeded(g, s), std::nullopt);
                } else {
                    for (Group sharer : kGroups) process(arriving[index(g)][index(s)][index(sharer)], sharer);
                }
            }
        arriving = next;
    }
    for (const auto& by_article : arriving)
        for (const auto& by_sharer : by_article)
            for (long c : by_sharer) out.result.pending_shares += c;
    return out;
}

}  // namespace

SimResult simulate_mass_model(const PreferenceTable& prefs, const ModelParams& params,
                              const Targeting& theta, const SimConfig& cfg)
{
    check_config(cfg);
    validate(theta);
    for (const auto& spec : prefs.cells) validate(spec);

    const GroupArticle<long> seeded = initial_allocation(cfg.n_agents, params.pi_A, theta);
    std::vector<MassTrialOutput> outputs(static_cast<std::size_t>(cfg.trials));
    parallel_for(
        outputs.size(),
        [&](std::size_t k) { outputs[k] = run_mass_trial(prefs, params, seeded, cfg, static_cast<int>(k)); },
        cfg.workers);

    SimResult res;
    res.n_agents = cfg.n_agents;
    res.horizon = cfg.horizon;
    res.theta = theta;
    for (auto& o : outputs) {
        res.trials.push_back(std::move(o.result));
        res.events.rows.insert(res.events.rows.end(), o.events.begin(), o.events.end());
    }
    return res;
}

double empirical_pof(const SimResult& reference, const SimResult& policy)
{
    const double denom = policy.mean_total_liked_mass();
    if (!(denom > 0.0)) throw Error(ErrorCode::ZeroDenominator, "policy produced no likes");
    return reference.mean_total_liked_mass() / denom;
}

// ---------------------------------------------------------------------------
// graphs

void SocialGraph::finalize()
{
    if (static_cast<int>(groups.size()) != node_count)
        throw Error(ErrorCode::InvalidParameter, "group labels must cover every node");
    std::vector<std::size_t> degree(static_cast<std::size_t>(node_count), 0);
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= node_count || v >= node_count)
            throw Error(ErrorCode::InvalidParameter, "edge endpoint out of range");
        if (u == v) throw Error(ErrorCode::InvalidParameter, "self-loop in graph");
        ++degree[static_cast<std::size_t>(u)];
        ++degree[static_cast<std::size_t>(v)];
    }
    offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
    for (int v = 0; v < node_count; ++v)
        offsets_[static_cast<std::size_t>(v) + 1] = offsets_[static_cast<std::size_t>(v)] + degree[static_cast<std::size_t>(v)];
    adjacency_.assign(offsets_.back(), 0);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (auto [u, v] : edges) {
        adjacency_[fill[static_cast<std::size_t>(u)]++] = v;
        adjacency_[fill[static_cast<std::size_t>(v)]++] = u;
    }
}

namespace {

// Visits each index of [0, count) independently with probability p, skipping
// geometrically between hits.
template <class Emit>
void bernoulli_indices(Engine& eng, long long count, double p, Emit emit)
{
    if (count <= 0 || p <= 0.0) return;
    if (p >= 1.0) {
        for (long long k = 0; k < count; ++k) emit(k);
        return;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double log_q = std::log1p(-p);
    long long k = -1;
    while (true) {
        const double skip = std::floor(std::log1p(-unit(eng)) / log_q);
        if (skip >= static_cast<double>(count)) return;
        k += 1 + static_cast<long long>(skip);
        if (k >= count) return;
        emit(k);
    }
}

// Unordered pair (i, j), i < j, for the k-th pair in order of increasing j.
std::pair<long long, long long> triangle_pair(long long k)
{
    auto j = static_cast<long long>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
    while (j * (j - 1) / 2 > k) --j;
    while ((j + 1) * j / 2 <= k) ++j;
    return {k - j * (j - 1) / 2, j};
}

}  // namespace

SocialGraph generate_synthetic_graph(int n, double pi_A, double q_A, double q_B, double mean_degree,
                                     std::uint64_t seed)
{
    if (n < 2 || !(pi_A > 0.0 && pi_A < 1.0) || !(mean_degree > 0.0))
        throw Error(ErrorCode::InvalidParameter, "graph needs n >= 2, pi_A in (0, 1), positive degree");
    if (!(q_A > 0.0 && q_A <= 1.0 && q_B > 0.0 && q_B <= 1.0))
        throw Error(ErrorCode::InvalidParameter, "homophily must lie in (0, 1]");

    const long long n_A = std::llround(n * pi_A);
    const long long n_B = n - n_A;
    if (n_A < 2 || n_B < 2) throw Error(ErrorCode::InfeasibleHomophily, "a group has fewer than two nodes");

    // Cross edges balance: n_A d_A (1 - q_A) = n_B d_B (1 - q_B).
    double d_A = mean_degree;
    double d_B = mean_degree;
    if (q_A < 1.0 || q_B < 1.0) {
        if (q_A == 1.0 || q_B == 1.0)
            throw Error(ErrorCode::InfeasibleHomophily, "one group cannot have cross edges while the other does");
        d_A = mean_degree * n / (n_A * (1.0 + (1.0 - q_A) / (1.0 - q_B)));
        d_B = n_A * d_A * (1.0 - q_A) / (n_B * (1.0 - q_B));
    }
    const double p_AA = d_A * q_A / static_cast<double>(n_A - 1);
    const double p_BB = d_B * q_B / static_cast<double>(n_B - 1);
    const double p_AB = d_A * (1.0 - q_A) / static_cast<double>(n_B);
    for (double p : {p_AA, p_BB, p_AB})
        if (p > 1.0)
            throw Error(ErrorCode::InfeasibleHomophily, "requested homophily needs a block probability above 1");

    SocialGraph g;
    g.node_count = n;
    g.groups.assign(static_cast<std::size_t>(n), B);
    std::fill(g.groups.begin(), g.groups.begin() + n_A, A);

    Engine eng = make_engine(seed, 0);
    bernoulli_indices(eng, n_A * (n_A - 1) / 2, p_AA, [&](long long k) {
        const auto [i, j] = triangle_pair(k);
        g.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    });
    bernoulli_indices(eng, n_B * (n_B - 1) / 2, p_BB, [&](long long k) {
        const auto [i, j] = triangle_pair(k);
        g.edges.emplace_back(static_cast<int>(n_A + i), static_cast<int>(n_A + j));
    });
    bernoulli_indices(eng, n_A * n_B, p_AB, [&](long long k) {
        g.edges.emplace_back(static_cast<int>(k / n_B), static_cast<int>(n_A + k % n_B));
    });
    g.finalize();
    return g;
}

HomophilyReport realized_homophily(const SocialGraph& graph)
{
    std::array<double, 2> same{};
    std::array<double, 2> total{};
    for (int v = 0; v < graph.node_count; ++v) {
        const Group gv = graph.groups[static_cast<std::size_t>(v)];
        for (int w : graph.neighbors(v)) {
            total[index(gv)] += 1.0;
            same[index(gv)] += graph.groups[static_cast<std::size_t>(w)] == gv ? 1.0 : 0.0;
        }
    }
    HomophilyReport r;
    r.intra_A = total[0] > 0.0 ? same[0] / total[0] : 0.0;
    r.intra_B = total[1] > 0.0 ? same[1] / total[1] : 0.0;
    r.mean_degree = graph.node_count > 0 ? 2.0 * static_cast<double>(graph.edges.size()) / graph.node_count : 0.0;
    return r;
}

std::string_view to_string(GraphMode mode) { return mode == GraphMode::OneToOne ? "one-to-one" : "broadcast"; }

namespace {

TrialResult run_graph_trial(const SocialGraph& graph, const PreferenceTable& prefs, const Targeting& theta,
                            const SimConfig& cfg, GraphMode mode, int trial)
{
    Engine eng = make_engine(cfg.master_seed, static_cast<std::uint64_t>(trial));
    const auto n = static_cast<std::size_t>(graph.node_count);
    TrialResult out;
    out.steps.resize(static_cast<std::size_t>(cfg.horizon));

    std::vector<std::pair<int, Article>> viewers;
    {
        std::vector<Article> shown(n, b);
        for (Group g : kGroups) {
            std::vector<int> members;
            for (std::size_t v = 0; v < n; ++v)
                if (graph.groups[v] == g) members.push_back(static_cast<int>(v));
            std::shuffle(members.begin(), members.end(), eng);
            const auto count_a = static_cast<std::size_t>(
                std::llround(static_cast<double>(members.size()) * theta.theta(g, a)));
            for (std::size_t k = 0; k < count_a; ++k) shown[static_cast<std::size_t>(members[k])] = a;
        }
        for (std::size_t v = 0; v < n; ++v) viewers.emplace_back(static_cast<int>(v), shown[v]);
    }

    std::vector<int> arrivals_at(n, 0);
    std::vector<Article> kept(n, a);
    std::vector<int> touched;
    std::vector<std::pair<int, Article>> arrivals;
    for (int t = 1; t <= cfg.horizon; ++t) {
        StepCounts& step = out.steps[static_cast<std::size_t>(t - 1)];
        arrivals.clear();
        for (auto [v, s] : viewers) {
            const Group g = graph.groups[static_cast<std::size_t>(v)];
            Viewer viewer{&prefs(g, s)};
            double p = 0.0;
            const auto [clicked, liked] = viewer.view(eng, p);
            CellCounts& cell = step(g, s);
            ++cell.shown;
            cell.clicked += clicked;
            cell.liked += liked;
            if (!liked) continue;
            const auto nbrs = graph.neighbors(v);
            if (nbrs.empty()) continue;
            if (mode == GraphMode::OneToOne) {
                std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
                arrivals.emplace_back(nbrs[pick(eng)], s);
            } else {
                for (int w : nbrs) arrivals.emplace_back(w, s);
            }
        }
        if (t == cfg.horizon) {
            out.pending_shares = static_cast<long>(arrivals.size());
            break;
        }
        // One view per node per step: reservoir-pick one arrival uniformly.
        touched.clear();
        for (auto [w, s] : arrivals) {
            const auto wi = static_cast<std::size_t>(w);
            if (arrivals_at[wi] == 0) touched.push_back(w);
            ++arrivals_at[wi];
            std::uniform_int_distribution<int> pick(0, arrivals_at[wi] - 1);
            if (pick(eng) == 0) kept[wi] = s;
        }
        viewers.clear();
        for (int w : touched) {
            viewers.emplace_back(w, kept[static_cast<std::size_t>(w)]);
            arrivals_at[static_cast<std::size_t>(w)] = 0;
        }
    }
    return out;
}

}  // namespace

SimResult simulate_graph(const SocialGraph& graph, const PreferenceTable& prefs, const Targeting& theta,
                         const SimConfig& cfg, GraphMode mode)
{
    if (graph.node_count < 1) throw Error(ErrorCode::InvalidParameter, "graph has no nodes");
    check_config(cfg);
    validate(theta);
    for (const auto& spec : prefs.cells) validate(spec);

    SimResult res;
    res.n_agents = graph.node_count;
    res.horizon = cfg.horizon;
    res.theta = theta;
    res.trials.resize(static_cast<std::size_t>(cfg.trials));
    parallel_for(
        res.trials.size(),
        [&](std::size_t k) { res.trials[k] = run_graph_trial(graph, prefs, theta, cfg, mode, static_cast<int>(k)); },
        cfg.workers);
    return res;
}

// ---------------------------------------------------------------------------
// disparity summaries

Quartiles quartiles(std::vector<double> values)
{
    if (values.empty()) throw Error(ErrorCode::InvalidParameter, "quartiles of an empty sample");
    std::sort(values.begin(), values.end());
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

DisparityMetrics disparity_metrics(const SimResult& result)
{
    DisparityMetrics m;
    const double n = static_cast<double>(result.n_agents);
    for (const TrialResult& trial : result.trials) {
        GroupArticle<double> shown;
        GroupArticle<double> liked;
        for (const StepCounts& step : trial.steps)
            for (std::size_t c = 0; c < 4; ++c) {
                shown.cells[c] += static_cast<double>(step.cells[c].shown) / n;
                liked.cells[c] += static_cast<double>(step.cells[c].liked) / n;
            }
        m.exposure_gap.push_back(std::abs(shown(A, a) + shown(B, a) - shown(A, b) - shown(B, b)));
        m.like_gap.push_back(std::abs(liked(A, a) + liked(B, a) - liked(A, b) - liked(B, b)));
        m.intergroup_exposure.push_back(std::abs(shown(A, b) - shown(B, a)));
        m.intergroup_likes.push_back(std::abs(liked(A, b) - liked(B, a)));
        m.outgroup_exposure.push_back(shown(A, b) + shown(B, a));
        m.outgroup_likes.push_back(liked(A, b) + liked(B, a));
    }
    return m;
}

}  // namespace fairshare
