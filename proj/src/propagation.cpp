#include "fairshare/propagation.hpp"

#include <cmath>
#include <numeric>

#include "fairshare/error.hpp"

namespace fairshare {

namespace {

constexpr double kDefectiveGap = 1e-12;
// Below this relative root gap the amplitude form loses digits to cancellation.
constexpr double kAmplitudeFormGap = 1e-3;

struct PairState {
    double a = 0.0;  // group A
    double b = 0.0;  // group B
};

PairState step(const Matrix2& m, PairState x)
{
    return {m[0][0] * x.a + m[0][1] * x.b, m[1][0] * x.a + m[1][1] * x.b};
}

PairState seed_for(const ModelParams& params, Group g, Article s)
{
    const double mass = params.pi(g) * params.psi(g, s);
    return g == Group::A ? PairState{mass, 0.0} : PairState{0.0, mass};
}

double component(PairState x, Group g) { return g == Group::A ? x.a : x.b; }

void allocate(PropagationCoefficients& out, int horizon)
{
    for (auto& cell : out.w.cells) cell.assign(static_cast<std::size_t>(horizon), 0.0);
    for (auto& cell : out.u.cells) cell.assign(static_cast<std::size_t>(horizon), 0.0);
}

}  // namespace

MassTrajectory propagate_recursive(const ModelParams& params, const Targeting& theta)
{
    validate(theta);
    const int horizon = params.horizon;
    MassTrajectory traj(horizon);
    for (Article s : kArticles) {
        const Matrix2 m = propagation_matrix(params, s);
        PairState x{params.pi(Group::A) * theta.theta(Group::A, s) * params.psi(Group::A, s),
                    params.pi(Group::B) * theta.theta(Group::B, s) * params.psi(Group::B, s)};
        for (int t = 1; t <= horizon; ++t) {
            traj(Group::A, s, t) = x.a;
            traj(Group::B, s, t) = x.b;
            x = step(m, x);
        }
    }
    return traj;
}

ExposureSeries exposure_series(const MassTrajectory& traj, const ModelParams& params)
{
    ExposureSeries e(traj.horizon());
    for (Group g : kGroups) {
        const double share = params.pi(g);
        if (!(share > 0.0)) throw Error(ErrorCode::InvalidParameter, "group share must be positive");
        for (Article s : kArticles)
            for (int t = 1; t <= traj.horizon(); ++t) e(g, s, t) = traj(g, s, t) / share;
    }
    return e;
}

Matrix2 propagation_matrix(const ModelParams& params, Article s)
{
    const double psi_A = params.psi(Group::A, s);
    const double psi_B = params.psi(Group::B, s);
    return {{{psi_A * params.q_A, psi_A * (1.0 - params.q_B)},
             {psi_B * (1.0 - params.q_A), psi_B * params.q_B}}};
}

ArticleSpectrum article_spectrum(const ModelParams& params, Article s)
{
    const double psi_A = params.psi(Group::A, s);
    const double psi_B = params.psi(Group::B, s);
    const double trace = psi_A * params.q_A + psi_B * params.q_B;
    const double det = psi_A * psi_B * (params.q_A + params.q_B - 1.0);
    ArticleSpectrum out;
    out.discriminant = trace * trace - 4.0 * det;
    out.a1 = 0.5 * (trace + std::sqrt(std::max(out.discriminant, 0.0)));
    out.a2 = trace - out.a1;
    return out;
}

double PropagationCoefficients::sum_w(Group g, Article s) const
{
    const auto& v = w(g, s);
    return std::accumulate(v.begin(), v.end(), 0.0);
}

double PropagationCoefficients::sum_u(Group g, Article s) const
{
    const auto& v = u(g, s);
    return std::accumulate(v.begin(), v.end(), 0.0);
}

PropagationCoefficients coefficients_recursive(const ModelParams& params)
{
    PropagationCoefficients out;
    out.params = params;
    out.source = CoefficientSource::Recursive;
    allocate(out, params.horizon);
    for (Article s : kArticles) {
        out.spectrum[index(s)] = article_spectrum(params, s);
        const Matrix2 m = propagation_matrix(params, s);
        for (Group g : kGroups) {
            const Group other = opposite(g);
            PairState x = seed_for(params, g, s);
            for (int t = 1; t <= params.horizon; ++t) {
                out.w(g, s)[static_cast<std::size_t>(t - 1)] = component(x, g);
                out.u(other, s)[static_cast<std::size_t>(t - 1)] = component(x, other);
                x = step(m, x);
            }
        }
    }
    return out;
}

double power_divided_difference(double a1, double a2, int n)
{
    if (n <= 0) return 0.0;
    const double scale = std::max(std::abs(a1), std::abs(a2));
    if (std::abs(a1 - a2) > kAmplitudeFormGap * scale)
        return (std::pow(a1, n) - std::pow(a2, n)) / (a1 - a2);
    // Horner form of sum_{j<n} a1^(n-1-j) a2^j.
    double acc = 1.0;
    for (int k = 1; k < n; ++k) acc = acc * a1 + std::pow(a2, k);
    return acc;
}

Amplitudes eigen_amplitudes(const ModelParams& params, Group g, Article s)
{
    const ArticleSpectrum spec = article_spectrum(params, s);
    const double gap = spec.a1 - spec.a2;
    if (std::abs(gap) < kDefectiveGap)
        throw Error(ErrorCode::NearDefectiveMatrix, "propagation matrix has a repeated eigenvalue");
    const Matrix2 m = propagation_matrix(params, s);
    const PairState x1 = seed_for(params, g, s);
    const PairState x2 = step(m, x1);
    const Group other = opposite(g);
    Amplitudes amp;
    amp.w1 = (component(x2, g) - spec.a2 * component(x1, g)) / gap;
    amp.w2 = (spec.a1 * component(x1, g) - component(x2, g)) / gap;
    amp.u = component(x2, other) / gap;
    return amp;
}

Amplitudes printed_amplitudes(const ModelParams& params, Group g, Article s)
{
    const ArticleSpectrum spec = article_spectrum(params, s);
    const Group other = opposite(g);
    const double psi_g = params.psi(g, s);
    const double psi_o = params.psi(other, s);
    const double pi_g = params.pi(g);
    const double pi_o = params.pi(other);
    const double q_o = params.q(other);
    const double inner = psi_o * (pi_o * psi_o * (1.0 - q_o) - pi_g * psi_g * q_o);
    Amplitudes amp;
    amp.w1 = (pi_g * psi_g + inner / spec.a1) / (1.0 - spec.a2 / spec.a1);
    amp.w2 = (pi_g * psi_g + inner / spec.a2) / (1.0 - spec.a1 / spec.a2);
    amp.u = (inner / spec.a1) / (1.0 - spec.a2 / spec.a1);
    return amp;
}

PropagationCoefficients coefficients_closed_form(const ModelParams& params)
{
    PropagationCoefficients out;
    out.params = params;
    out.source = CoefficientSource::ClosedForm;
    allocate(out, params.horizon);
    for (Article s : kArticles) {
        const ArticleSpectrum spec = article_spectrum(params, s);
        out.spectrum[index(s)] = spec;
        const double gap = spec.a1 - spec.a2;
        if (std::abs(gap) < kDefectiveGap)
            throw Error(ErrorCode::NearDefectiveMatrix, "propagation matrix has a repeated eigenvalue");
        const bool separated = gap > kAmplitudeFormGap * std::abs(spec.a1);
        const double det = spec.a1 * spec.a2;
        const Matrix2 m = propagation_matrix(params, s);

        for (Group g : kGroups) {
            const Group other = opposite(g);
            auto& w = out.w(g, s);
            auto& u = out.u(other, s);
            if (separated) {
                const Amplitudes amp = eigen_amplitudes(params, g, s);
                double p1 = 1.0;
                double p2 = 1.0;
                for (int t = 1; t <= params.horizon; ++t) {
                    w[static_cast<std::size_t>(t - 1)] = amp.w1 * p1 + amp.w2 * p2;
                    u[static_cast<std::size_t>(t - 1)] = amp.u * (p1 - p2);
                    p1 *= spec.a1;
                    p2 *= spec.a2;
                }
            } else {
                // x(t) = x(2) D(t-1) - a1 a2 x(1) D(t-2), the same eigen form with the
                // amplitudes folded into divided differences.
                const PairState x1 = seed_for(params, g, s);
                const PairState x2 = step(m, x1);
                w[0] = component(x1, g);
                u[0] = component(x1, other);
                for (int t = 2; t <= params.horizon; ++t) {
                    const double d1 = power_divided_difference(spec.a1, spec.a2, t - 1);
                    const double d2 = power_divided_difference(spec.a1, spec.a2, t - 2);
                    w[static_cast<std::size_t>(t - 1)] = component(x2, g) * d1 - det * component(x1, g) * d2;
                    u[static_cast<std::size_t>(t - 1)] = component(x2, other) * d1;
                }
            }
        }
    }
    return out;
}

PropagationCoefficients compute_coefficients(const ModelParams& params)
{
    try {
        return coefficients_closed_form(params);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NearDefectiveMatrix) throw;
        return coefficients_recursive(params);
    }
}

MassTrajectory reconstruct(const PropagationCoefficients& coeffs, const Targeting& theta)
{
    MassTrajectory traj(coeffs.horizon());
    for (Group g : kGroups)
        for (Article s : kArticles) {
            const double own = theta.theta(g, s);
            const double cross = theta.theta(opposite(g), s);
            for (int t = 1; t <= coeffs.horizon(); ++t)
                traj(g, s, t) = own * coeffs.w_at(g, s, t) + cross * coeffs.u_at(g, s, t);
        }
    return traj;
}

ObjectiveCoefficients objective_coefficients(const PropagationCoefficients& coeffs)
{
    using enum Group;
    using enum Article;
    // Total mass carried by article s from a unit seeding of group g.
    auto reach = [&](Group g, Article s) { return coeffs.sum_w(g, s) + coeffs.sum_u(opposite(g), s); };
    ObjectiveCoefficients out;
    out.c_A_a = reach(A, a) - reach(A, b);
    out.c_B_a = reach(B, a) - reach(B, b);
    out.constant = reach(A, b) + reach(B, b);
    return out;
}

double total_mass(const PropagationCoefficients& coeffs, const Targeting& theta)
{
    return objective_coefficients(coeffs).evaluate(theta);
}

double total_mass(const ModelParams& params, const Targeting& theta)
{
    return propagate_recursive(params, theta).total();
}

}  // namespace fairshare
