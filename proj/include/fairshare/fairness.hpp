#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "fairshare/model.hpp"
#include "fairshare/propagation.hpp"

namespace fairshare {

/// Bounds on both average-exposure ratios: delta_lo <= ratio <= delta_hi.
struct FairnessBounds {
    double delta_lo = 0.25;
    double delta_hi = 2.0;

    /// Extreme bounds. The lines then leave the unit box, except that the two upper lines
    /// approach it at (1, 1) and (0, 0), where a ratio's denominator vanishes.
    static FairnessBounds vacuous() { return {1e-12, 1e12}; }

    bool operator==(const FairnessBounds&) const = default;
};

/// Throws InvalidParameter unless 0 < delta_lo < 1 < delta_hi.
void validate(const FairnessBounds& bounds);

/// Horizon sums of the coefficients combined with the bounds.
///   m_hi(g,s) = sum u(g,s) + delta_hi * sum w(g',s')    m_lo likewise with delta_lo
///   n_hi(g,s) = sum w(g,s) + delta_hi * sum u(g',s')    n_lo likewise with delta_lo
///   m(g,s)    = sum u(g,s) + sum w(g,s)
struct BoundSums {
    GroupArticle<double> w;  // sum_t w(g,s,t)
    GroupArticle<double> u;  // sum_t u(g,s,t)
    GroupArticle<double> m_hi;
    GroupArticle<double> m_lo;
    GroupArticle<double> n_hi;
    GroupArticle<double> n_lo;
    GroupArticle<double> m;
};

BoundSums bound_sums(const PropagationCoefficients& coeffs, const FairnessBounds& bounds);

enum class LineId { y1 = 0, y2 = 1, y3 = 2, y4 = 3 };
std::string_view to_string(LineId id);

/// theta_Ba = intercept + slope * theta_Aa. Upper lines bound theta_Ba from above.
struct ConstraintLine {
    LineId id = LineId::y1;
    bool upper = true;
    double intercept = 0.0;
    double slope = 0.0;

    double at(double theta_A_a) const { return intercept + slope * theta_A_a; }
    /// theta_Aa at which the line reaches theta_Ba; requires slope != 0.
    double inverse(double theta_B_a) const { return (theta_B_a - intercept) / slope; }
    /// theta_Aa where the line crosses theta_Ba = 0.
    double axis_intercept() const { return inverse(0.0); }
};

/// y1: upper, from the preferred-article ratio's delta_hi side.
/// y2: lower, from the preferred-article ratio's delta_lo side.
/// y3: lower, from the non-preferred ratio's delta_hi side.
/// y4: upper, from the non-preferred ratio's delta_lo side.
struct ConstraintGeometry {
    FairnessBounds bounds;
    BoundSums sums;
    std::array<ConstraintLine, 4> lines{};

    const ConstraintLine& line(LineId id) const { return lines[static_cast<std::size_t>(id)]; }

    /// max(y2, y3, 0) and min(y1, y4, 1).
    double lower_envelope(double theta_A_a) const;
    double upper_envelope(double theta_A_a) const;

    /// Inside the unit box and between the lines, with absolute slack tol.
    bool contains(const Targeting& theta, double tol = 1e-9) const;
};

/// Throws DegenerateDenominator if an m sum that divides a line is not positive.
ConstraintGeometry constraint_geometry(const PropagationCoefficients& coeffs,
                                       const FairnessBounds& bounds);

struct ExposureRatios {
    double preferred = 0.0;      // sum l(A,a) / sum l(B,b)
    double non_preferred = 0.0;  // sum l(A,b) / sum l(B,a)
};

/// Throws ZeroDenominator when either denominator vanishes.
ExposureRatios exposure_ratios(const MassTrajectory& traj);

/// Ratios straight from the coefficient sums, without building a trajectory.
ExposureRatios exposure_ratios(const PropagationCoefficients& coeffs, const Targeting& theta);

/// Largest amount by which theta breaks either ratio bound; 0 when satisfied.
/// A vanishing denominator counts as an infinite violation rather than an error.
double ratio_violation(const PropagationCoefficients& coeffs, const FairnessBounds& bounds,
                       const Targeting& theta);

struct ConstantExposureCheck {
    bool feasible = false;
    std::optional<Targeting> required_theta;
    /// Both sides of the equality condition, indexed by article.
    std::array<double, 2> lhs{};
    std::array<double, 2> rhs{};
};

/// Equality of psi(A,s) (q_A + (pi_B/pi_A)(1-q_B)) and psi(B,s') ((pi_B/pi_A) q_B + 1 - q_A)
/// for both s, tested with relative tolerance 1e-9.
ConstantExposureCheck constant_fair_exposure_check(const ModelParams& params, double level);

/// Per-step growth of the common exposure level when the constant-exposure condition holds.
/// Exposure is constant over time only when this equals 1.
double constant_exposure_multiplier(const ModelParams& params, Article s);

/// (1 / (T pi_g)) * sum_t (w(g,s,t) + u(g,s,t)).
double max_average_exposure(const PropagationCoefficients& coeffs, Group g, Article s);

/// (1 / (T pi_g)) * sum_t l(g,s,t).
double average_exposure(const MassTrajectory& traj, const ModelParams& params, Group g, Article s);

struct DominanceRatios {
    double homophily = 0.0;    // q_A pi_A / ((1 - q_B) pi_B)
    double preference = 0.0;   // psi_Aa psi_Ba / (pi_B psi_Ab psi_Bb)
    bool holds() const { return homophily < 1.0 && preference < 1.0; }
};

DominanceRatios intergroup_dominance_ratios(const ModelParams& params);

/// Both ratios strictly below 1: the stated condition under which group A ends up
/// seeing more of b than a when each group is seeded with its own article.
bool intergroup_dominance_condition(const ModelParams& params);

}  // namespace fairshare
