#include "fairshare/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fairshare/error.hpp"

namespace fairshare {

using enum Group;
using enum Article;

void validate(const FairnessBounds& bounds)
{
    if (!(bounds.delta_lo > 0.0 && bounds.delta_lo < 1.0 && bounds.delta_hi > 1.0 &&
          std::isfinite(bounds.delta_hi)))
        throw Error(ErrorCode::InvalidParameter,
                    fmt::format("fairness bounds ({}, {}) must satisfy 0 < lo < 1 < hi",
                                bounds.delta_lo, bounds.delta_hi));
}

std::string_view to_string(LineId id)
{
    switch (id) {
    case LineId::y1: return "y1";
    case LineId::y2: return "y2";
    case LineId::y3: return "y3";
    case LineId::y4: return "y4";
    }
    return "?";
}

BoundSums bound_sums(const PropagationCoefficients& coeffs, const FairnessBounds& bounds)
{
    BoundSums out;
    for (Group g : kGroups)
        for (Article s : kArticles) {
            const Group go = opposite(g);
            const Article so = opposite(s);
            const double u = coeffs.sum_u(g, s);
            const double w = coeffs.sum_w(g, s);
            out.m_hi(g, s) = u + bounds.delta_hi * coeffs.sum_w(go, so);
            out.m_lo(g, s) = u + bounds.delta_lo * coeffs.sum_w(go, so);
            out.n_hi(g, s) = w + bounds.delta_hi * coeffs.sum_u(go, so);
            out.n_lo(g, s) = w + bounds.delta_lo * coeffs.sum_u(go, so);
            out.m(g, s) = u + w;
            out.w(g, s) = w;
            out.u(g, s) = u;
        }
    return out;
}

double ConstraintGeometry::lower_envelope(double x) const
{
    return std::max({line(LineId::y2).at(x), line(LineId::y3).at(x), 0.0});
}

double ConstraintGeometry::upper_envelope(double x) const
{
    return std::min({line(LineId::y1).at(x), line(LineId::y4).at(x), 1.0});
}

bool ConstraintGeometry::contains(const Targeting& theta, double tol) const
{
    const double x = theta.theta_A_a;
    const double y = theta.theta_B_a;
    if (x < -tol || x > 1.0 + tol || y < -tol || y > 1.0 + tol) return false;
    return lower_envelope(x) <= y + tol && y <= upper_envelope(x) + tol;
}

ConstraintGeometry constraint_geometry(const PropagationCoefficients& coeffs,
                                       const FairnessBounds& bounds)
{
    ConstraintGeometry geo;
    geo.bounds = bounds;
    geo.sums = bound_sums(coeffs, bounds);
    const BoundSums& k = geo.sums;

    for (double d : {k.m_hi(A, a), k.m_lo(A, a), k.m_hi(A, b), k.m_lo(A, b)})
        if (!(d > 0.0))
            throw Error(ErrorCode::DegenerateDenominator, "constraint line has a zero m sum");

    const double lo = bounds.delta_lo;
    const double hi = bounds.delta_hi;
    geo.lines[0] = {LineId::y1, true, hi * k.m(B, b) / k.m_hi(A, a), -k.n_hi(A, a) / k.m_hi(A, a)};
    geo.lines[1] = {LineId::y2, false, lo * k.m(B, b) / k.m_lo(A, a), -k.n_lo(A, a) / k.m_lo(A, a)};
    geo.lines[2] = {LineId::y3, false, k.m(A, b) / k.m_hi(A, b), -k.n_hi(A, b) / k.m_hi(A, b)};
    geo.lines[3] = {LineId::y4, true, k.m(A, b) / k.m_lo(A, b), -k.n_lo(A, b) / k.m_lo(A, b)};
    return geo;
}

ExposureRatios exposure_ratios(const MassTrajectory& traj)
{
    const double pref_den = traj.sum(B, b);
    const double non_den = traj.sum(B, a);
    if (!(pref_den > 0.0) || !(non_den > 0.0))
        throw Error(ErrorCode::ZeroDenominator, "exposure ratio has a zero denominator");
    return {traj.sum(A, a) / pref_den, traj.sum(A, b) / non_den};
}

namespace {

struct RatioParts {
    double pref_num, pref_den, non_num, non_den;
};

RatioParts ratio_parts(const PropagationCoefficients& coeffs, const Targeting& theta)
{
    auto summed = [&](Group g, Article s) {
        return theta.theta(g, s) * coeffs.sum_w(g, s) + theta.theta(opposite(g), s) * coeffs.sum_u(g, s);
    };
    return {summed(A, a), summed(B, b), summed(A, b), summed(B, a)};
}

double violation_of(double num, double den, const FairnessBounds& bounds)
{
    if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
    const double r = num / den;
    return std::max({bounds.delta_lo - r, r - bounds.delta_hi, 0.0});
}

}  // namespace

ExposureRatios exposure_ratios(const PropagationCoefficients& coeffs, const Targeting& theta)
{
    const RatioParts p = ratio_parts(coeffs, theta);
    if (!(p.pref_den > 0.0) || !(p.non_den > 0.0))
        throw Error(ErrorCode::ZeroDenominator, "exposure ratio has a zero denominator");
    return {p.pref_num / p.pref_den, p.non_num / p.non_den};
}

double ratio_violation(const PropagationCoefficients& coeffs, const FairnessBounds& bounds,
                       const Targeting& theta)
{
    const RatioParts p = ratio_parts(coeffs, theta);
    return std::max(violation_of(p.pref_num, p.pref_den, bounds),
                    violation_of(p.non_num, p.non_den, bounds));
}

ConstantExposureCheck constant_fair_exposure_check(const ModelParams& params, double level)
{
    if (!(level > 0.0 && level < 1.0))
        throw Error(ErrorCode::InvalidParameter, "exposure level must lie in (0, 1)");
    const double odds = params.pi(B) / params.pi(A);
    ConstantExposureCheck out;
    out.feasible = true;
    for (Article s : kArticles) {
        const double lhs = params.psi(A, s) * (params.q_A + odds * (1.0 - params.q_B));
        const double rhs = params.psi(B, opposite(s)) * (odds * params.q_B + (1.0 - params.q_A));
        out.lhs[index(s)] = lhs;
        out.rhs[index(s)] = rhs;
        if (std::abs(lhs - rhs) > 1e-9 * std::max(std::abs(lhs), std::abs(rhs))) out.feasible = false;
    }
    if (out.feasible) out.required_theta = Targeting{level, 1.0 - level};
    return out;
}

double constant_exposure_multiplier(const ModelParams& params, Article s)
{
    const double odds = params.pi(B) / params.pi(A);
    return params.psi(A, s) * (params.q_A + odds * (1.0 - params.q_B));
}

double max_average_exposure(const PropagationCoefficients& coeffs, Group g, Article s)
{
    return (coeffs.sum_w(g, s) + coeffs.sum_u(g, s)) / (coeffs.horizon() * coeffs.params.pi(g));
}

double average_exposure(const MassTrajectory& traj, const ModelParams& params, Group g, Article s)
{
    return traj.sum(g, s) / (traj.horizon() * params.pi(g));
}

DominanceRatios intergroup_dominance_ratios(const ModelParams& params)
{
    DominanceRatios r;
    r.homophily = params.q_A * params.pi(A) / ((1.0 - params.q_B) * params.pi(B));
    r.preference = params.psi(A, a) * params.psi(B, a) /
                   (params.pi(B) * params.psi(A, b) * params.psi(B, b));
    return r;
}

bool intergroup_dominance_condition(const ModelParams& params)
{
    return intergroup_dominance_ratios(params).holds();
}

}  // namespace fairshare
