#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairshare/events.hpp"
#include "fairshare/fairness.hpp"
#include "fairshare/model.hpp"
#include "fairshare/propagation.hpp"

namespace fairshare {

enum class PolicyKind { Opt, Ratio, Half, Explicit };

struct Policy {
    PolicyKind kind = PolicyKind::Opt;
    Targeting theta;          // used by Explicit
    FairnessBounds bounds;    // used by Ratio
};

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view text);

/// Opt: agnostic optimum. Ratio: fair optimum under the bounds (throws InfeasibleProblem).
/// Half: (1/2, 1/2). Explicit: the stored targeting.
Targeting resolve_policy(const Policy& policy, const PropagationCoefficients& coeffs);

struct SimConfig {
    long n_agents = 100000;
    int trials = 25;
    int horizon = 10;
    std::uint64_t master_seed = 42;
    Policy policy;
    /// 0 means worker_count().
    unsigned workers = 0;
    /// Keep one EventRow per shown user (mass model only).
    bool record_events = false;
};

struct CellCounts {
    long shown = 0;
    long clicked = 0;
    long liked = 0;

    bool operator==(const CellCounts&) const = default;
};

using StepCounts = GroupArticle<CellCounts>;

struct TrialResult {
    std::vector<StepCounts> steps;  // index t - 1
    /// Shares produced at the last step, which fall past the horizon.
    long pending_shares = 0;

    bool operator==(const TrialResult&) const = default;
};

struct SimResult {
    long n_agents = 0;
    int horizon = 0;
    Targeting theta;
    std::vector<TrialResult> trials;
    EventLog events;
    std::optional<double> pof_empirical;

    const CellCounts& counts(int trial, Group g, Article s, int t) const
    {
        return trials[static_cast<std::size_t>(trial)].steps[static_cast<std::size_t>(t - 1)](g, s);
    }
    /// liked / n_agents averaged over trials: the estimate of l(g, s, t).
    double mean_liked_mass(Group g, Article s, int t) const;
    /// Sample standard error of that mean across trials.
    double stderr_liked_mass(Group g, Article s, int t) const;
    /// Trial-averaged total likes over all cells and steps, per agent.
    double mean_total_liked_mass() const;
};

/// Split n over weights so that rounding errors go to the largest remainders and the
/// parts sum to n exactly.
std::vector<long> largest_remainder(long n, std::span<const double> weights);

/// Agents seeded at t = 1 per (group, article) for n agents under theta.
GroupArticle<long> initial_allocation(long n, double pi_A, const Targeting& theta);

/// Agent-based run of the one-successor process. Trials run in parallel with
/// per-trial streams, so results do not depend on the worker count.
SimResult simulate_mass_model(const PreferenceTable& prefs, const ModelParams& params,
                              const Targeting& theta, const SimConfig& cfg);

/// Ratio of trial-averaged total likes: reference (usually opt) over policy.
double empirical_pof(const SimResult& reference, const SimResult& policy);

struct SocialGraph {
    int node_count = 0;
    std::vector<Group> groups;
    std::vector<std::pair<int, int>> edges;

    /// Builds the CSR adjacency from edges. Throws InvalidParameter on self-loops or
    /// out-of-range endpoints.
    void finalize();
    std::span<const int> neighbors(int v) const
    {
        return {adjacency_.data() + offsets_[static_cast<std::size_t>(v)],
                adjacency_.data() + offsets_[static_cast<std::size_t>(v) + 1]};
    }
    int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

private:
    std::vector<std::size_t> offsets_;
    std::vector<int> adjacency_;
};

/// Stochastic block model with group degrees chosen so that a fraction q_g of a
/// g-node's neighbours lie in g and the overall mean degree is mean_degree.
/// Throws InfeasibleHomophily if a block probability would exceed 1.
SocialGraph generate_synthetic_graph(int n, double pi_A, double q_A, double q_B, double mean_degree,
                                     std::uint64_t seed);

struct HomophilyReport {
    double intra_A = 0.0;  // fraction of A's neighbour slots in A
    double intra_B = 0.0;
    double mean_degree = 0.0;
};

HomophilyReport realized_homophily(const SocialGraph& graph);

/// Edge-list CSV (node_u,node_v) plus node-group CSV (node,group).
SocialGraph read_graph(const std::string& edges_path, const std::string& groups_path);
void write_graph(const SocialGraph& graph, const std::string& edges_path, const std::string& groups_path);

enum class GraphMode { OneToOne, Broadcast };
std::string_view to_string(GraphMode mode);

/// All nodes are shown an article at t = 1. Likers forward to one uniformly chosen
/// neighbour (OneToOne) or to all neighbours (Broadcast). A node views at most one
/// article per step; when several arrive, one is kept uniformly at random. Nodes may
/// view again at later steps and redraw their like probability each time.
SimResult simulate_graph(const SocialGraph& graph, const PreferenceTable& prefs, const Targeting& theta,
                         const SimConfig& cfg, GraphMode mode);

struct Quartiles {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

/// Linear-interpolation quartiles. Throws InvalidParameter on an empty input.
Quartiles quartiles(std::vector<double> values);

/// Per-trial disparities in mass units (counts / n_agents), summed over all steps:
///   exposure_gap        |shown a - shown b|
///   like_gap            |liked a - liked b|
///   intergroup_exposure |shown (A,b) - shown (B,a)|
///   intergroup_likes    |liked (A,b) - liked (B,a)|
/// plus the out-group levels shown (A,b) + shown (B,a) and liked (A,b) + liked (B,a).
struct DisparityMetrics {
    std::vector<double> exposure_gap;
    std::vector<double> like_gap;
    std::vector<double> intergroup_exposure;
    std::vector<double> intergroup_likes;
    std::vector<double> outgroup_exposure;
    std::vector<double> outgroup_likes;
};

DisparityMetrics disparity_metrics(const SimResult& result);

}  // namespace fairshare
