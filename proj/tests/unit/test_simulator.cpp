#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "../support/oracles.hpp"
#include "fairshare/error.hpp"
#include "fairshare/estimation.hpp"
#include "fairshare/optimizer.hpp"
#include "fairshare/rng.hpp"
#include "fairshare/simulator.hpp"

using namespace fairshare;

TEST_CASE("allocation by largest remainders")
{
    const std::vector<double> w{0.333, 0.333, 0.334};
    const auto parts = largest_remainder(10, w);
    CHECK(std::accumulate(parts.begin(), parts.end(), 0L) == 10);
    CHECK(parts[2] == 4);

    const auto alloc = initial_allocation(1001, 0.5, Targeting{1.0, 0.25});
    CHECK(alloc(Group::A, Article::b) == 0);
    CHECK(std::accumulate(alloc.cells.begin(), alloc.cells.end(), 0L) == 1001);
}

TEST_CASE("seeded beta draws")
{
    Engine a = make_engine(5, 3), b = make_engine(5, 3), c = make_engine(5, 4);
    CHECK(sample_beta(a, 2.0, 5.0) == sample_beta(b, 2.0, 5.0));
    CHECK(stream_seed(5, 3) != stream_seed(5, 4));
    double mean = 0.0;
    for (int i = 0; i < 20000; ++i) mean += sample_beta(c, 2.0, 5.0) / 20000;
    CHECK(mean == doctest::Approx(2.0 / 7.0).epsilon(0.02));
}

TEST_CASE("mass model agrees with the analytic trajectory")
{
    const auto prefs = testing::symmetric_preferences();
    const ModelParams p = params_from_preferences(prefs, 0.5, 0.8, 0.8, 10).params;
    SimConfig cfg;
    cfg.n_agents = 100000;
    cfg.trials = 25;
    const Targeting theta{0.7, 0.2};
    const auto res = simulate_mass_model(prefs, p, theta, cfg);
    const auto expect = testing::chain_expectation(p, theta, cfg.n_agents);
    for (Group g : kGroups)
        for (Article s : kArticles)
            for (int t = 1; t <= 10; ++t) {
                if (expect.mean(g, s, t) * cfg.n_agents * cfg.trials < 10) continue;
                const double se = expect.sd(g, s, t) / std::sqrt(cfg.trials);
                CHECK(std::abs(res.mean_liked_mass(g, s, t) - expect.mean(g, s, t)) <= 3 * se);
            }
    // Nobody in A sees b at the start when theta_Aa = 1.
    const auto all_a = simulate_mass_model(prefs, p, Targeting{1.0, 0.0}, SimConfig{1000, 2, 3});
    CHECK(all_a.counts(0, Group::A, Article::b, 1).shown == 0);
}

TEST_CASE("mass model is reproducible across worker counts")
{
    const Preset pr = preset("facebook");
    SimConfig cfg{20000, 6, 10, 99};
    cfg.record_events = true;
    cfg.workers = 1;
    const auto one = simulate_mass_model(pr.prefs, pr.params, Targeting{0.5, 0.5}, cfg);
    cfg.workers = 4;
    const auto four = simulate_mass_model(pr.prefs, pr.params, Targeting{0.5, 0.5}, cfg);
    CHECK(one.trials == four.trials);
    CHECK(one.events.rows.size() == four.events.rows.size());
    long shown = 0;
    for (int k = 0; k < 6; ++k)
        for (int t = 1; t <= 10; ++t)
            for (Group g : kGroups)
                for (Article s : kArticles) shown += one.counts(k, g, s, t).shown;
    CHECK(static_cast<long>(one.events.rows.size()) == shown);
}

TEST_CASE("synthetic graph homophily")
{
    const auto none = generate_synthetic_graph(10000, 0.5, 0.5, 0.5, 27.0, 1);
    const auto h0 = realized_homophily(none);
    CHECK(h0.intra_A == doctest::Approx(0.5).epsilon(0.04));
    CHECK(h0.intra_B == doctest::Approx(0.5).epsilon(0.04));

    const auto fb = generate_synthetic_graph(10000, 0.5, 0.72, 0.68, 27.0, 2);
    const auto h = realized_homophily(fb);
    CHECK(std::abs(h.intra_A - 0.72) <= 0.02);
    CHECK(std::abs(h.intra_B - 0.68) <= 0.02);
    CHECK(h.mean_degree == doctest::Approx(27.0).epsilon(0.02));

    CHECK_THROWS_AS(generate_synthetic_graph(10000, 0.01, 0.99, 0.9, 27.0, 3), Error);
}

TEST_CASE("graph simulation")
{
    const Preset pr = preset("twitter-abortion");
    SimConfig cfg{3000, 5, 10, 4};

    SocialGraph isolated;
    isolated.node_count = 50;
    isolated.groups.assign(50, Group::A);
    std::fill(isolated.groups.begin() + 25, isolated.groups.end(), Group::B);
    isolated.finalize();
    const auto quiet = simulate_graph(isolated, pr.prefs, Targeting{0.5, 0.5}, cfg, GraphMode::OneToOne);
    for (int k = 0; k < cfg.trials; ++k)
        for (int t = 2; t <= cfg.horizon; ++t)
            for (Group g : kGroups)
                for (Article s : kArticles) CHECK(quiet.counts(k, g, s, t).shown == 0);

    const auto graph = generate_synthetic_graph(3000, pr.params.pi_A, pr.params.q_A, pr.params.q_B, 27.0, 4);
    const auto broad = simulate_graph(graph, pr.prefs, Targeting{0.5, 0.5}, cfg, GraphMode::Broadcast);
    bool non_monotone = false;
    for (Group g : kGroups) {
        std::vector<double> series;
        for (int t = 1; t <= cfg.horizon; ++t)
            series.push_back(broad.mean_liked_mass(g, Article::a, t) + broad.mean_liked_mass(g, Article::b, t));
        bool up = false, down = false;
        for (std::size_t i = 1; i < series.size(); ++i) up |= series[i] > series[i - 1], down |= series[i] < series[i - 1];
        non_monotone |= up && down;
    }
    CHECK(non_monotone);

    cfg.workers = 1;
    const auto a = simulate_graph(graph, pr.prefs, Targeting{0.3, 0.6}, cfg, GraphMode::OneToOne);
    cfg.workers = 3;
    const auto b = simulate_graph(graph, pr.prefs, Targeting{0.3, 0.6}, cfg, GraphMode::OneToOne);
    CHECK(a.trials == b.trials);
}

TEST_CASE("quartiles")
{
    const auto q = quartiles({4.0, 1.0, 3.0, 2.0, 5.0});
    CHECK(q.min == 1.0);
    CHECK(q.q1 == 2.0);
    CHECK(q.median == 3.0);
    CHECK(q.q3 == 4.0);
    CHECK(q.max == 5.0);
    CHECK_THROWS_AS(quartiles({}), Error);
}

TEST_CASE("disparity metrics by hand")
{
    SimResult r;
    r.n_agents = 100;
    r.horizon = 1;
    r.trials.resize(2);
    for (auto& tr : r.trials) tr.steps.resize(1);
    auto set = [&](int k, Group g, Article s, long shown, long liked) {
        r.trials[k].steps[0](g, s) = {shown, liked, liked};
    };
    for (Group g : kGroups)
        for (Article s : kArticles) set(0, g, s, 25, 5);
    set(1, Group::A, Article::a, 40, 10);
    set(1, Group::A, Article::b, 10, 1);
    set(1, Group::B, Article::a, 20, 2);
    set(1, Group::B, Article::b, 30, 6);
    const auto d = disparity_metrics(r);
    CHECK(d.exposure_gap[0] == 0.0);
    CHECK(d.like_gap[0] == 0.0);
    CHECK(d.intergroup_exposure[0] == 0.0);
    CHECK(d.exposure_gap[1] == doctest::Approx(0.2));
    CHECK(d.like_gap[1] == doctest::Approx(0.05));
    CHECK(d.intergroup_exposure[1] == doctest::Approx(0.1));
    CHECK(d.intergroup_likes[1] == doctest::Approx(0.01));
    CHECK(d.outgroup_exposure[1] == doctest::Approx(0.3));
    CHECK(d.outgroup_likes[1] == doctest::Approx(0.03));
}

TEST_CASE("facebook policies: out-group exposure and the a/b gap follow the analytic means")
{
    const Preset pr = preset("facebook");
    const auto coeffs = compute_coefficients(pr.params);
    Policy ratio;
    ratio.kind = PolicyKind::Ratio;
    const Targeting th_ratio = resolve_policy(ratio, coeffs);
    const Targeting th_half{0.5, 0.5};
    SimConfig cfg{100000, 25, 10, 42};
    const auto half_run = simulate_mass_model(pr.prefs, pr.params, th_half, cfg);
    const auto ratio_run = simulate_mass_model(pr.prefs, pr.params, th_ratio, cfg);
    const auto dh = disparity_metrics(half_run), dr = disparity_metrics(ratio_run);

    // Randomised targeting shows far more out-group content.
    CHECK(quartiles(dh.outgroup_exposure).q1 > quartiles(dr.outgroup_exposure).q3);

    // Expected |shown a - shown b|: seeds at t = 1 plus the likes of steps 1..T-1.
    auto expected_gap = [&](const Targeting& th) {
        const auto traj = propagate_recursive(pr.params, th);
        double a = 0, b = 0;
        for (Group g : kGroups) {
            a += pr.params.pi(g) * th.theta(g, Article::a);
            b += pr.params.pi(g) * th.theta(g, Article::b);
            for (int t = 1; t < pr.params.horizon; ++t) a += traj(g, Article::a, t), b += traj(g, Article::b, t);
        }
        return std::abs(a - b);
    };
    CHECK(quartiles(dh.exposure_gap).median == doctest::Approx(expected_gap(th_half)).epsilon(0.05));
    CHECK(quartiles(dr.exposure_gap).median == doctest::Approx(expected_gap(th_ratio)).epsilon(0.05));
}

TEST_CASE("policy resolution")
{
    const auto coeffs = compute_coefficients(preset("facebook").params);
    CHECK(resolve_policy(Policy{PolicyKind::Half, {}, {}}, coeffs) == Targeting{0.5, 0.5});
    CHECK(resolve_policy(Policy{PolicyKind::Opt, {}, {}}, coeffs) == solve_agnostic(coeffs).theta);
    CHECK(resolve_policy(Policy{PolicyKind::Explicit, Targeting{0.2, 0.3}, {}}, coeffs) == Targeting{0.2, 0.3});
    CHECK_THROWS_AS(resolve_policy(Policy{PolicyKind::Ratio, {}, FairnessBounds{0.999, 1.001}}, coeffs), Error);
    CHECK(parse_policy_kind("ratio") == PolicyKind::Ratio);
    CHECK_THROWS_AS(parse_policy_kind("fair"), Error);
}
