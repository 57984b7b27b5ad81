#include <doctest.h>

#include <functional>

#include "../support/draws.hpp"
#include "fairshare/error.hpp"
#include "fairshare/estimation.hpp"
#include "fairshare/fairness.hpp"

using namespace fairshare;

namespace {

ModelParams balanced(double q, double psi_in, double psi_out, double pi_A = 0.5)
{
    ModelParams p;
    p.pi_A = pi_A;
    p.q_A = p.q_B = q;
    p.psi(Group::A, Article::a) = psi_in;
    p.psi(Group::B, Article::b) = psi_in;
    p.psi(Group::A, Article::b) = psi_out;
    p.psi(Group::B, Article::a) = psi_out;
    p.horizon = 10;
    return p;
}

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("bounds validation")
{
    CHECK_NOTHROW(validate(FairnessBounds{0.25, 2.0}));
    CHECK(code_of([] { validate(FairnessBounds{1.0, 2.0}); }) == ErrorCode::InvalidParameter);
    CHECK(code_of([] { validate(FairnessBounds{0.5, 1.0}); }) == ErrorCode::InvalidParameter);
    CHECK(code_of([] { validate(FairnessBounds{0.0, 2.0}); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("exposure ratios")
{
    const ModelParams sym = balanced(0.8, 0.6, 0.3);
    CHECK(exposure_ratios(propagate_recursive(sym, Targeting{1, 0})).preferred == doctest::Approx(1.0));

    ModelParams one = sym;
    one.horizon = 1;
    CHECK(code_of([&] { exposure_ratios(propagate_recursive(one, Targeting{1, 1})); }) == ErrorCode::ZeroDenominator);
    CHECK(std::isinf(ratio_violation(compute_coefficients(one), FairnessBounds{}, Targeting{1, 1})));

    const ModelParams fb = preset("facebook").params;
    const Targeting th{0.6, 0.3};
    const auto traj = propagate_recursive(fb, th);
    const auto from_traj = exposure_ratios(traj);
    const auto from_sums = exposure_ratios(compute_coefficients(fb), th);
    CHECK(from_sums.preferred == doctest::Approx(traj.sum(Group::A, Article::a) / traj.sum(Group::B, Article::b)));
    CHECK(from_sums.non_preferred == doctest::Approx(from_traj.non_preferred).epsilon(1e-12));
}

TEST_CASE("constant fair exposure")
{
    const auto sym = constant_fair_exposure_check(balanced(0.8, 0.5, 0.5), 0.4);
    CHECK(sym.feasible);
    REQUIRE(sym.required_theta);
    CHECK(sym.required_theta->theta_A_a == doctest::Approx(0.4));
    CHECK(sym.required_theta->theta_B_a == doctest::Approx(0.6));

    CHECK(constant_fair_exposure_check(balanced(0.7, 0.6, 0.3), 0.5).feasible);
    CHECK_FALSE(constant_fair_exposure_check(preset("facebook").params, 0.5).feasible);

    ModelParams nudged = balanced(0.8, 0.5, 0.5);
    nudged.psi(Group::A, Article::a) += 1e-3;
    CHECK_FALSE(constant_fair_exposure_check(nudged, 0.5).feasible);
}

TEST_CASE("maximum average exposure")
{
    ModelParams p = balanced(0.8, 0.5, 0.5);
    p.horizon = 1;
    for (Group g : kGroups)
        for (Article s : kArticles) CHECK(max_average_exposure(compute_coefficients(p), g, s) == doctest::Approx(0.5));

    p.horizon = 2;
    CHECK(max_average_exposure(compute_coefficients(p), Group::A, Article::a) == doctest::Approx(0.375));
    const auto traj = propagate_recursive(p, Targeting{1, 1});
    CHECK(average_exposure(traj, p, Group::A, Article::a) == doctest::Approx(0.375));
}

TEST_CASE("intergroup dominance ratios")
{
    ModelParams p = balanced(0.55, 0.5, 0.45, 0.1);
    const auto r = intergroup_dominance_ratios(p);
    CHECK(r.homophily == doctest::Approx(0.055 / 0.405));
    CHECK(r.homophily < 1.0);
    CHECK(r.preference == doctest::Approx(0.5 * 0.45 / (0.9 * 0.45 * 0.5)));

    CHECK(intergroup_dominance_ratios(balanced(0.9, 0.5, 0.4)).homophily == doctest::Approx(9.0));
    CHECK_FALSE(intergroup_dominance_condition(balanced(0.9, 0.5, 0.4)));
    CHECK_FALSE(intergroup_dominance_condition(preset("facebook").params));
}

TEST_CASE("dominance condition does not guarantee out-group dominance")
{
    // Counterexample search: the condition holds but e(A,b) <= e(A,a) at some t in 3..T.
    Engine rng = make_engine(31, 0);
    bool found = false;
    for (int k = 0; k < 200000 && !found; ++k) {
        const ModelParams p = testing::random_params(rng, 10);
        if (!intergroup_dominance_condition(p)) continue;
        const auto e = exposure_series(propagate_recursive(p, Targeting{1, 0}), p);
        for (int t = 3; t <= 10; ++t) found |= e(Group::A, Article::b, t) <= e(Group::A, Article::a, t);
    }
    CHECK(found);
}

TEST_CASE("constraint lines")
{
    const ModelParams fb = preset("facebook").params;
    const auto coeffs = compute_coefficients(fb);
    const auto geo = constraint_geometry(coeffs, FairnessBounds{0.25, 2.0});
    CHECK(geo.line(LineId::y1).intercept > geo.line(LineId::y2).intercept);
    CHECK(geo.line(LineId::y1).upper);
    CHECK_FALSE(geo.line(LineId::y2).upper);
    CHECK_FALSE(geo.line(LineId::y3).upper);
    CHECK(geo.line(LineId::y4).upper);

    // On a line the matching ratio sits exactly at its bound. Sums are linear in theta,
    // so this holds for any theta_Aa, inside the box or not.
    auto sum = [&](Group g, Article s, double x, double y) {
        const double own = s == Article::a ? (g == Group::A ? x : y) : (g == Group::A ? 1 - x : 1 - y);
        const double other = s == Article::a ? (g == Group::A ? y : x) : (g == Group::A ? 1 - y : 1 - x);
        return own * coeffs.sum_w(g, s) + other * coeffs.sum_u(g, s);
    };
    for (double x : {0.0, 0.3, 0.8}) {
        const double y1 = geo.line(LineId::y1).at(x), y2 = geo.line(LineId::y2).at(x);
        const double y3 = geo.line(LineId::y3).at(x), y4 = geo.line(LineId::y4).at(x);
        CHECK(sum(Group::A, Article::a, x, y1) == doctest::Approx(2.0 * sum(Group::B, Article::b, x, y1)));
        CHECK(sum(Group::A, Article::a, x, y2) == doctest::Approx(0.25 * sum(Group::B, Article::b, x, y2)));
        CHECK(sum(Group::A, Article::b, x, y3) == doctest::Approx(2.0 * sum(Group::B, Article::a, x, y3)));
        CHECK(sum(Group::A, Article::b, x, y4) == doctest::Approx(0.25 * sum(Group::B, Article::a, x, y4)));
    }
}

TEST_CASE("vacuous bounds leave the box untouched")
{
    Engine rng = make_engine(32, 0);
    for (int k = 0; k < 50; ++k) {
        const auto coeffs = compute_coefficients(testing::random_params(rng, 10));
        const auto loose = constraint_geometry(coeffs, FairnessBounds{1e-6, 1e6});
        const auto geo = constraint_geometry(coeffs, FairnessBounds::vacuous());
        // Lower intercepts shrink towards 0, upper ones stay at or above 1.
        CHECK(geo.line(LineId::y2).intercept <= loose.line(LineId::y2).intercept * 1e-5);
        CHECK(geo.line(LineId::y3).intercept <= 1e-3);
        CHECK(geo.line(LineId::y1).intercept >= 1.0);
        CHECK(geo.line(LineId::y4).intercept >= 1.0);
        for (double x : {0.0, 0.5, 1.0})
            for (double y : {0.0, 0.5, 1.0}) {
                // (0, 0) and (1, 1) zero a denominator, so they are feasible only in the limit.
                const bool limit_corner = x == y && x != 0.5;
                CHECK(geo.contains(Targeting{x, y}, limit_corner ? 1e-6 : 1e-12));
            }
    }
}

TEST_CASE("geometry is symmetric under group relabelling")
{
    // Symmetric groups with reciprocal bounds: theta feasible iff its mirror (1 - theta_Ba, 1 - theta_Aa) is.
    const ModelParams p = balanced(0.75, 0.6, 0.35);
    const FairnessBounds b{0.5, 2.0};
    const auto geo = constraint_geometry(compute_coefficients(p), b);
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const Targeting th{i / 20.0, j / 20.0};
            const Targeting mirror{1.0 - th.theta_B_a, 1.0 - th.theta_A_a};
            CHECK(geo.contains(th, 1e-12) == geo.contains(mirror, 1e-12));
        }
}
