#include <doctest.h>

#include <functional>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fairshare/error.hpp"
#include "fairshare/model.hpp"

using namespace fairshare;

namespace {

double psi_by_quadrature(const PreferenceSpec& spec)
{
    const boost::math::beta_distribution<double> dist(spec.alpha, spec.beta);
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate([&](double p) { return p * boost::math::pdf(dist, p); }, spec.threshold(), 1.0);
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

TEST_CASE("psi of Beta(2,2) above one half")
{
    const PreferenceSpec spec{2.0, 2.0, 1.0, 2.0};
    CHECK(compute_psi(spec) == doctest::Approx(0.34375).epsilon(1e-14));
    CHECK(psi_by_quadrature(spec) == doctest::Approx(0.34375).epsilon(1e-12));
    CHECK(click_fraction(spec) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("psi of the facebook in-group shapes")
{
    const PreferenceSpec spec{0.95, 1.35, 1.0, 2000.0};
    const double psi = compute_psi(spec);
    CHECK(std::abs(psi - 0.4130) <= 1e-3);
    CHECK(psi == doctest::Approx(psi_by_quadrature(spec)).epsilon(1e-10));
}

TEST_CASE("click mass splits into liked and not liked")
{
    for (const PreferenceSpec spec : {PreferenceSpec{0.7, 3.1, 1.0, 3.0}, PreferenceSpec{5.0, 1.2, 2.0, 2.5},
                                      PreferenceSpec{0.2, 0.4, 1.0, 200.0}})
        CHECK(compute_psi(spec) + click_no_like_fraction(spec) == doctest::Approx(click_fraction(spec)).epsilon(1e-12));
}

TEST_CASE("threshold edge cases")
{
    CHECK(code_of([] { compute_psi({2.0, 3.0, 2.0, 2.0}); }) == ErrorCode::ZeroPsi);
    CHECK(compute_psi({2.0, 3.0, 0.0, 2.0}) == doctest::Approx(0.4));
    CHECK(code_of([] { compute_psi({0.0, 3.0, 1.0, 2.0}); }) == ErrorCode::InvalidParameter);
    CHECK(code_of([] { compute_psi({1.0, 3.0, -1.0, 2.0}); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("strict validation rejects weak homophily, simulation mode warns")
{
    ModelParams p;
    p.q_A = 0.4;
    CHECK(code_of([&] { validate(p, ValidationMode::Strict); }) == ErrorCode::InvalidParameter);
    const auto report = validate(p, ValidationMode::Simulation);
    CHECK_FALSE(report.ok());

    p.q_A = 0.75;
    p.pi_A = 0.0;
    CHECK(code_of([&] { validate(p, ValidationMode::Simulation); }) == ErrorCode::InvalidParameter);
    p.pi_A = 0.5;
    p.horizon = 0;
    CHECK(code_of([&] { validate(p, ValidationMode::Strict); }) == ErrorCode::InvalidParameter);
    p.horizon = 5;
    p.psi(Group::A, Article::b) = 0.0;
    CHECK(code_of([&] { validate(p, ValidationMode::Strict); }) == ErrorCode::ZeroPsi);
}

TEST_CASE("preference ordering and share stationarity are soft checks")
{
    ModelParams p;
    p.psi(Group::A, Article::a) = 0.6;
    p.psi(Group::A, Article::b) = 0.2;
    p.psi(Group::B, Article::b) = 0.6;
    p.psi(Group::B, Article::a) = 0.2;
    CHECK(validate(p, ValidationMode::Strict).ok());
    CHECK(share_consistency_residual(p) == doctest::Approx(0.0));

    p.psi(Group::A, Article::b) = 0.7;
    CHECK_FALSE(validate(p, ValidationMode::Strict).ok());

    p.psi(Group::A, Article::b) = 0.2;
    p.q_A = 0.9;
    CHECK(share_consistency_residual(p) == doctest::Approx(0.075));
    CHECK_FALSE(validate(p, ValidationMode::Strict).ok());
}

TEST_CASE("parameters from preferences")
{
    PreferenceTable prefs = PreferenceTable::filled({2.0, 2.0, 1.0, 2.0});
    const auto built = params_from_preferences(prefs, 0.5, 0.8, 0.8, 4);
    for (double v : built.params.psi.cells) CHECK(v == doctest::Approx(0.34375));
    CHECK(built.params.horizon == 4);
}
