#include "fairshare/cli.hpp"

#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "fairshare/config.hpp"
#include "fairshare/error.hpp"
#include "fairshare/estimation.hpp"
#include "fairshare/optimizer.hpp"
#include "fairshare/simulator.hpp"

namespace fairshare {

using nlohmann::ordered_json;

namespace {

struct CommonOptions {
    std::string preset;
    std::string config;
    std::string out;
    std::uint64_t seed = 42;
};

struct Source {
    ModelParams params;
    std::optional<PreferenceTable> prefs;
    ValidationReport report;
    RunDefaults defaults;
    std::string label;
};

Source load_source(const CommonOptions& opt)
{
    if (opt.preset.empty() == opt.config.empty())
        throw Error(ErrorCode::ConfigError, "give exactly one of --preset or --config");
    Source src;
    if (!opt.preset.empty()) {
        Preset p = preset(opt.preset);
        src.params = p.params;
        src.prefs = p.prefs;
        src.report = std::move(p.report);
        src.defaults = p.defaults;
        src.label = "preset " + opt.preset;
    } else {
        ModelConfig cfg = load_config(opt.config);
        src.params = cfg.params;
        src.prefs = cfg.prefs;
        src.report = std::move(cfg.report);
        src.label = "config " + opt.config;
    }
    return src;
}

struct Manifest {
    std::string command;
    std::string source;
    std::string bounds;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;

    std::string comment_block() const
    {
        std::string s = fmt::format("# fairshare {}\n# command: {}\n# source: {}\n", kToolVersion, command, source);
        if (!bounds.empty()) s += fmt::format("# bounds: {}\n", bounds);
        if (seed) s += fmt::format("# seed: {}\n", *seed);
        s += fmt::format("# outputs: {}\n", fmt::join(outputs, ", "));
        return s;
    }

    ordered_json to_json() const
    {
        ordered_json j;
        j["tool"] = "fairshare";
        j["version"] = std::string(kToolVersion);
        j["command"] = command;
        j["source"] = source;
        if (!bounds.empty()) j["bounds"] = bounds;
        if (seed) j["seed"] = *seed;
        j["outputs"] = outputs;
        return j;
    }
};

// Writes to the named file, or to the fallback stream when the name is empty.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path)
    {
        if (path.empty()) {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
            stream_ = file_.get();
        }
    }
    std::ostream& stream() { return *stream_; }
    std::string name() const { return path_.empty() ? "stdout" : path_; }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

std::string bounds_label(const FairnessBounds& b) { return fmt::format("{},{}", b.delta_lo, b.delta_hi); }

void add_warnings(ordered_json& j, const std::vector<std::string>& warnings, std::ostream& err)
{
    j["warnings"] = warnings;
    for (const auto& w : warnings) fmt::print(err, "warning: {}\n", w);
}

ordered_json solution_json(const FairSolution& sol)
{
    ordered_json j;
    j["mode"] = std::string(to_string(sol.mode));
    j["feasible"] = sol.feasible;
    if (sol.feasible) {
        j["theta"] = {{"A_a", sol.theta.theta_A_a}, {"B_a", sol.theta.theta_B_a}};
        j["objective"] = sol.objective;
    } else {
        j["theta"] = nullptr;
        j["objective"] = nullptr;
    }
    j["vertex_class"] = sol.vertex_class ? ordered_json(*sol.vertex_class) : ordered_json(nullptr);
    ordered_json binding = ordered_json::array();
    for (ConstraintTag t : sol.binding) binding.push_back(std::string(to_string(t)));
    j["binding_constraints"] = binding;
    j["pof"] = sol.pof ? ordered_json(*sol.pof) : ordered_json(nullptr);
    j["tie"] = sol.tie;
    return j;
}

// ---------------------------------------------------------------------------

struct SolveOptions {
    std::string mode = "fair";
    std::optional<double> delta_lo;
    std::optional<double> delta_hi;
    int grid = 1001;
};

FairnessBounds bounds_from(const std::optional<double>& lo, const std::optional<double>& hi,
                           const RunDefaults& defaults)
{
    FairnessBounds b{lo.value_or(defaults.bounds.delta_lo), hi.value_or(defaults.bounds.delta_hi)};
    validate(b);
    return b;
}

int cmd_solve(const CommonOptions& common, const SolveOptions& opt, std::ostream& out, std::ostream& err)
{
    const Source src = load_source(common);
    const PropagationCoefficients coeffs = compute_coefficients(src.params);

    Manifest manifest{"solve", src.label, "", std::nullopt, {}};
    Sink sink(common.out, out);
    manifest.outputs = {sink.name()};

    FairSolution sol;
    std::optional<FairnessBounds> bounds;
    if (opt.mode == "agnostic") {
        sol = solve_agnostic(coeffs);
    } else if (opt.mode == "fair" || opt.mode == "grid") {
        bounds = bounds_from(opt.delta_lo, opt.delta_hi, src.defaults);
        manifest.bounds = bounds_label(*bounds);
        sol = opt.mode == "fair" ? solve_fair(coeffs, *bounds) : solve_grid(coeffs, *bounds, opt.grid);
    } else {
        throw Error(ErrorCode::ConfigError, "--mode must be agnostic, fair or grid");
    }

    ordered_json j;
    j["manifest"] = manifest.to_json();
    const ordered_json body = solution_json(sol);
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    if (bounds && !sol.feasible && opt.mode == "fair") {
        const FeasibilityReport rep = check_feasible(coeffs, *bounds);
        j["violated_case"] = rep.violated_case ? ordered_json(*rep.violated_case) : ordered_json(nullptr);
    }
    add_warnings(j, src.report.warnings, err);
    sink.stream() << j.dump(2) << '\n';
    return sol.feasible ? kExitOk : kExitInfeasible;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
    std::vector<double> delta_lo{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> delta_hi{1.01, 1.1, 1.25, 1.5, 2.0, 3.0, 4.0, 5.0, 7.5, 10.0};
    std::string mode = "fair";
    int grid = 201;
};

int cmd_sweep(const CommonOptions& common, const SweepOptions& opt, std::ostream& out, std::ostream& err)
{
    if (opt.delta_lo.empty() || opt.delta_hi.empty())
        throw Error(ErrorCode::ConfigError, "sweep grids must not be empty");
    if (opt.mode != "fair" && opt.mode != "grid")
        throw Error(ErrorCode::ConfigError, "--mode must be fair or grid for sweep");
    for (double lo : opt.delta_lo)
        for (double hi : opt.delta_hi) {
            try {
                validate(FairnessBounds{lo, hi});
            } catch (const Error& e) {
                throw Error(ErrorCode::ConfigError, std::string("malformed sweep grid: ") + e.what());
            }
        }

    const Source src = load_source(common);
    const PropagationCoefficients coeffs = compute_coefficients(src.params);
    Sink sink(common.out, out);
    Manifest manifest{"sweep", src.label,
                      fmt::format("lo={} hi={}", fmt::join(opt.delta_lo, ";"), fmt::join(opt.delta_hi, ";")),
                      std::nullopt, {sink.name()}};

    std::ostream& os = sink.stream();
    os << manifest.comment_block();
    for (const auto& w : src.report.warnings) fmt::print(err, "warning: {}\n", w);
    os << "delta_lo,delta_hi,feasible,theta_Aa,theta_Ba,objective,pof\n";
    for (double hi : opt.delta_hi)
        for (double lo : opt.delta_lo) {
            const FairnessBounds b{lo, hi};
            const FairSolution sol = opt.mode == "fair" ? solve_fair(coeffs, b) : solve_grid(coeffs, b, opt.grid);
            if (sol.feasible)
                fmt::print(os, "{},{},1,{},{},{},{}\n", lo, hi, sol.theta.theta_A_a, sol.theta.theta_B_a,
                           sol.objective, *sol.pof);
            else
                fmt::print(os, "{},{},0,,,,\n", lo, hi);
        }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string policy = "opt";
    std::string mode = "model";
    std::optional<double> delta_lo;
    std::optional<double> delta_hi;
    std::optional<int> trials;
    std::optional<long> agents;
    std::optional<int> horizon;
    std::string graph;
    std::string groups;
    double degree = 27.0;
    std::string summary;
    std::string events;
};

void write_sim_csv(std::ostream& os, const SimResult& res)
{
    os << "trial,t,group,article,shown,clicked,liked\n";
    for (std::size_t k = 0; k < res.trials.size(); ++k)
        for (int t = 1; t <= res.horizon; ++t)
            for (Group g : kGroups)
                for (Article s : kArticles) {
                    const CellCounts& c = res.counts(static_cast<int>(k), g, s, t);
                    fmt::print(os, "{},{},{},{},{},{},{}\n", k, t, to_string(g), to_string(s), c.shown, c.clicked,
                               c.liked);
                }
}

ordered_json quartiles_json(const std::vector<double>& v)
{
    const Quartiles q = quartiles(v);
    return {{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

std::string derived_path(const std::string& out, const std::string& suffix)
{
    if (out.empty()) return "";
    const auto dot = out.find_last_of('.');
    const auto slash = out.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? out.substr(0, dot) : out) + suffix;
}

int cmd_simulate(const CommonOptions& common, const SimulateOptions& opt, std::ostream& out, std::ostream& err)
{
    const Source src = load_source(common);
    if (!src.prefs) throw Error(ErrorCode::ConfigError, "simulation needs Beta preferences, not a bare psi table");

    const bool graph_mode = opt.mode != "model";
    GraphMode gmode = GraphMode::OneToOne;
    if (opt.mode == "one-to-one") gmode = GraphMode::OneToOne;
    else if (opt.mode == "broadcast") gmode = GraphMode::Broadcast;
    else if (opt.mode != "model") throw Error(ErrorCode::ConfigError, "--mode must be model, one-to-one or broadcast");
    if (!opt.events.empty() && graph_mode)
        throw Error(ErrorCode::ConfigError, "--events is only available in model mode");

    SimConfig cfg;
    cfg.master_seed = common.seed;
    cfg.trials = opt.trials.value_or(src.defaults.trials);
    cfg.horizon = opt.horizon.value_or(src.params.horizon);
    cfg.n_agents = opt.agents.value_or(graph_mode ? 10000 : src.defaults.n_agents);
    cfg.record_events = !opt.events.empty();
    cfg.policy.kind = parse_policy_kind(opt.policy);
    if (cfg.policy.kind == PolicyKind::Explicit)
        throw Error(ErrorCode::ConfigError, "--policy must be opt, ratio or half");

    ModelParams params = src.params;
    params.horizon = cfg.horizon;
    const PropagationCoefficients coeffs = compute_coefficients(params);
    Manifest manifest{"simulate " + opt.mode, src.label, "", common.seed, {}};
    if (cfg.policy.kind == PolicyKind::Ratio) {
        cfg.policy.bounds = bounds_from(opt.delta_lo, opt.delta_hi, src.defaults);
        manifest.bounds = bounds_label(cfg.policy.bounds);
    }
    const Targeting theta = resolve_policy(cfg.policy, coeffs);
    const Targeting opt_theta = solve_agnostic(coeffs).theta;

    std::optional<SocialGraph> graph;
    if (graph_mode) {
        if (!opt.graph.empty()) {
            if (opt.groups.empty()) throw Error(ErrorCode::ConfigError, "--graph needs --groups");
            graph = read_graph(opt.graph, opt.groups);
        } else {
            graph = generate_synthetic_graph(static_cast<int>(cfg.n_agents), params.pi_A, params.q_A, params.q_B,
                                             opt.degree, common.seed);
        }
    }
    auto run = [&](const Targeting& th, const SimConfig& c) {
        return graph ? simulate_graph(*graph, *src.prefs, th, c, gmode) : simulate_mass_model(*src.prefs, params, th, c);
    };

    SimResult result = run(theta, cfg);
    if (theta == opt_theta) {
        result.pof_empirical = 1.0;
    } else {
        SimConfig ref = cfg;
        ref.record_events = false;
        result.pof_empirical = empirical_pof(run(opt_theta, ref), result);
    }

    Sink sink(common.out, out);
    const std::string summary_path = opt.summary.empty() ? derived_path(common.out, "_summary.json") : opt.summary;
    manifest.outputs = {sink.name()};
    if (!summary_path.empty()) manifest.outputs.push_back(summary_path);
    if (!opt.events.empty()) manifest.outputs.push_back(opt.events);

    std::ostream& os = sink.stream();
    os << manifest.comment_block();
    fmt::print(os, "# policy: {} theta_Aa={} theta_Ba={}\n", opt.policy, theta.theta_A_a, theta.theta_B_a);
    write_sim_csv(os, result);

    if (!summary_path.empty()) {
        ordered_json j;
        j["manifest"] = manifest.to_json();
        j["policy"] = opt.policy;
        j["theta"] = {{"A_a", theta.theta_A_a}, {"B_a", theta.theta_B_a}};
        j["agents"] = result.n_agents;
        j["trials"] = result.trials.size();
        if (graph) {
            const HomophilyReport h = realized_homophily(*graph);
            j["graph"] = {{"nodes", graph->node_count}, {"edges", graph->edges.size()},
                          {"mean_degree", h.mean_degree}, {"intra_A", h.intra_A}, {"intra_B", h.intra_B}};
        }
        const MassTrajectory analytic = propagate_recursive(params, theta);
        ordered_json rows = ordered_json::array();
        for (Group g : kGroups)
            for (Article s : kArticles)
                for (int t = 1; t <= result.horizon; ++t)
                    rows.push_back({{"group", std::string(to_string(g))},
                                    {"article", std::string(to_string(s))},
                                    {"t", t},
                                    {"mean", result.mean_liked_mass(g, s, t)},
                                    {"stderr", result.stderr_liked_mass(g, s, t)},
                                    {"analytic", analytic(g, s, t)}});
        j["liked_mass"] = rows;
        const DisparityMetrics d = disparity_metrics(result);
        j["disparity"] = {{"exposure_gap", quartiles_json(d.exposure_gap)},
                          {"like_gap", quartiles_json(d.like_gap)},
                          {"intergroup_exposure", quartiles_json(d.intergroup_exposure)},
                          {"intergroup_likes", quartiles_json(d.intergroup_likes)},
                          {"outgroup_exposure", quartiles_json(d.outgroup_exposure)},
                          {"outgroup_likes", quartiles_json(d.outgroup_likes)}};
        j["pof_empirical"] = *result.pof_empirical;
        add_warnings(j, src.report.warnings, err);
        Sink summary(summary_path, out);
        summary.stream() << j.dump(2) << '\n';
    } else {
        for (const auto& w : src.report.warnings) fmt::print(err, "warning: {}\n", w);
    }

    if (!opt.events.empty()) {
        Sink events(opt.events, out);
        events.stream() << manifest.comment_block();
        write_event_log(events.stream(), result.events);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_fit(const CommonOptions& common, const std::string& events_path, std::ostream& out, std::ostream& err)
{
    const EventLog log = read_event_log(events_path);
    const EventFit fit = fit_events(log);

    Sink sink(common.out, out);
    Manifest manifest{"fit", "events " + events_path, "", std::nullopt, {sink.name()}};
    ordered_json j = ordered_json::parse(config_to_json(fit.params, fit.prefs));
    j["manifest"] = manifest.to_json();
    ordered_json cells;
    for (Group g : kGroups)
        for (Article s : kArticles) {
            const BetaFit& b = fit.shapes(g, s);
            cells[fmt::format("{}{}", to_string(g), to_string(s))] = {
                {"alpha", b.alpha},         {"beta", b.beta},
                {"log_likelihood", b.log_likelihood}, {"moments_log_likelihood", b.moments_log_likelihood},
                {"gradient_norm", b.gradient_norm},   {"iterations", b.iterations},
                {"samples", b.sample_count},          {"clipped", b.clipped}};
        }
    j["diagnostics"] = {{"rows", log.rows.size()},
                        {"cells", cells},
                        {"homophily", {{"q_A", fit.homophily.q_A},
                                       {"q_B", fit.homophily.q_B},
                                       {"shares_A", fit.homophily.shares_A},
                                       {"shares_B", fit.homophily.shares_B}}}};
    add_warnings(j, fit.warnings, err);
    sink.stream() << j.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct PropagateOptions {
    std::optional<double> theta_A_a;
    std::optional<double> theta_B_a;
    std::optional<int> horizon;
};

int cmd_propagate(const CommonOptions& common, const PropagateOptions& opt, std::ostream& out, std::ostream& err)
{
    const Source src = load_source(common);
    ModelParams params = src.params;
    if (opt.horizon) params.horizon = *opt.horizon;
    validate(params, ValidationMode::Simulation);
    const Targeting agn = solve_agnostic(compute_coefficients(params)).theta;
    const Targeting theta{opt.theta_A_a.value_or(agn.theta_A_a), opt.theta_B_a.value_or(agn.theta_B_a)};
    validate(theta);

    const MassTrajectory traj = propagate_recursive(params, theta);
    const ExposureSeries e = exposure_series(traj, params);
    Sink sink(common.out, out);
    Manifest manifest{"propagate", src.label, "", std::nullopt, {sink.name()}};
    std::ostream& os = sink.stream();
    os << manifest.comment_block();
    fmt::print(os, "# theta_Aa={} theta_Ba={}\n", theta.theta_A_a, theta.theta_B_a);
    for (const auto& w : src.report.warnings) fmt::print(err, "warning: {}\n", w);
    os << "t,group,article,mass,exposure\n";
    for (int t = 1; t <= params.horizon; ++t)
        for (Group g : kGroups)
            for (Article s : kArticles)
                fmt::print(os, "{},{},{},{},{}\n", t, to_string(g), to_string(s), traj(g, s, t), e(g, s, t));
    return kExitOk;
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InfeasibleProblem: return kExitInfeasible;
    case ErrorCode::DegenerateSample:
    case ErrorCode::NoEvents: return kExitEstimation;
    default: return kExitInput;
    }
}

void add_common(CLI::App* cmd, CommonOptions& common, bool with_source, bool with_seed)
{
    if (with_source) {
        cmd->add_option("--preset", common.preset, "built-in dataset preset")
            ->check(CLI::IsMember(preset_names()));
        cmd->add_option("--config", common.config, "parameter JSON file");
    }
    cmd->add_option("--out", common.out, "output file (default: stdout)");
    if (with_seed) cmd->add_option("--seed", common.seed, "master seed");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Two-group homophilic propagation: solve, sweep, simulate, fit", "fairshare"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    CommonOptions common;

    SolveOptions solve_opt;
    auto* solve = app.add_subcommand("solve", "optimal targeting with or without fairness bounds");
    add_common(solve, common, true, false);
    solve->add_option("--mode", solve_opt.mode, "agnostic | fair | grid")
        ->check(CLI::IsMember({"agnostic", "fair", "grid"}));
    solve->add_option("--delta-lo", solve_opt.delta_lo, "lower ratio bound");
    solve->add_option("--delta-hi", solve_opt.delta_hi, "upper ratio bound");
    solve->add_option("--grid", solve_opt.grid, "grid resolution for --mode grid")->check(CLI::Range(2, 100000));

    SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "fair optimum over a grid of bounds (CSV)");
    add_common(sweep, common, true, false);
    sweep->add_option("--delta-lo", sweep_opt.delta_lo, "comma-separated lower bounds")->delimiter(',');
    sweep->add_option("--delta-hi", sweep_opt.delta_hi, "comma-separated upper bounds")->delimiter(',');
    sweep->add_option("--mode", sweep_opt.mode, "fair | grid")->check(CLI::IsMember({"fair", "grid"}));
    sweep->add_option("--grid", sweep_opt.grid, "grid resolution for --mode grid")->check(CLI::Range(2, 100000));

    SimulateOptions sim_opt;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs of a targeting policy (CSV)");
    add_common(simulate, common, true, true);
    simulate->add_option("--policy", sim_opt.policy, "opt | ratio | half")
        ->check(CLI::IsMember({"opt", "ratio", "half"}));
    simulate->add_option("--mode", sim_opt.mode, "model | one-to-one | broadcast")
        ->check(CLI::IsMember({"model", "one-to-one", "broadcast"}));
    simulate->add_option("--delta-lo", sim_opt.delta_lo, "lower ratio bound for --policy ratio");
    simulate->add_option("--delta-hi", sim_opt.delta_hi, "upper ratio bound for --policy ratio");
    simulate->add_option("--trials", sim_opt.trials, "number of trials")->check(CLI::PositiveNumber);
    simulate->add_option("--agents", sim_opt.agents, "agents (model) or nodes (synthetic graph)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--horizon", sim_opt.horizon, "time steps")->check(CLI::PositiveNumber);
    simulate->add_option("--graph", sim_opt.graph, "edge-list CSV (node_u,node_v)");
    simulate->add_option("--groups", sim_opt.groups, "node-group CSV (node,group)");
    simulate->add_option("--degree", sim_opt.degree, "mean degree of the synthetic graph")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--summary", sim_opt.summary, "aggregate summary JSON");
    simulate->add_option("--events", sim_opt.events, "per-view event log CSV (model mode)");

    std::string events_path;
    auto* fit = app.add_subcommand("fit", "fit parameters from an event log (JSON)");
    add_common(fit, common, false, false);
    fit->add_option("events", events_path, "event log CSV")->required();

    PropagateOptions prop_opt;
    auto* propagate = app.add_subcommand("propagate", "exact mass trajectory for a targeting (CSV)");
    add_common(propagate, common, true, false);
    propagate->add_option("--theta-aa", prop_opt.theta_A_a, "fraction of A shown a (default: agnostic optimum)");
    propagate->add_option("--theta-ba", prop_opt.theta_B_a, "fraction of B shown a (default: agnostic optimum)");
    propagate->add_option("--horizon", prop_opt.horizon, "time steps")->check(CLI::PositiveNumber);

    std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv_tail.begin(), argv_tail.end());
    try {
        app.parse(argv_tail);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*solve) return cmd_solve(common, solve_opt, out, err);
        if (*sweep) return cmd_sweep(common, sweep_opt, out, err);
        if (*simulate) return cmd_simulate(common, sim_opt, out, err);
        if (*fit) return cmd_fit(common, events_path, out, err);
        if (*propagate) return cmd_propagate(common, prop_opt, out, err);
    } catch (const Error& e) {
        fmt::print(err, "error [{}]: {}\n", to_string(e.code()), e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace fairshare
