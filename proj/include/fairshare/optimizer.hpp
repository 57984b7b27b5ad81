#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairshare/fairness.hpp"
#include "fairshare/propagation.hpp"

namespace fairshare {

enum class SolveMode { Agnostic, FairAware, GridOracle };
std::string_view to_string(SolveMode mode);

enum class ConstraintTag { y1, y2, y3, y4, box };
std::string_view to_string(ConstraintTag tag);

struct FairSolution {
    Targeting theta;
    double objective = 0.0;
    SolveMode mode = SolveMode::Agnostic;
    bool feasible = true;
    /// Candidate family the optimum came from: 1-4 line pairs, 5 box edges and corners.
    std::optional<int> vertex_class;
    std::vector<ConstraintTag> binding;
    std::optional<double> pof;
    /// Set when the optimum was not unique and the tie-break below decided it.
    bool tie = false;
};

/// Corner rule: theta_ga = 1 iff its objective coefficient is positive. A coefficient
/// within 1e-12 of zero is a tie, resolved to 1 and flagged.
FairSolution solve_agnostic(const PropagationCoefficients& coeffs);

/// z1 = sum_{t=1..T} D(t), z2 = sum_{t=1..T} D(t-1) with D(n) = (a1^n - a2^n)/(a1 - a2).
struct ZSums {
    double z1 = 0.0;
    double z2 = 0.0;
};

/// Geometric closed sums. Throws ZFormSingular when a root equals 1 or the roots coincide.
ZSums z_sums(double a1, double a2, int horizon);

/// Agnostic decision from the eigenvalue sums. Seeding g with s reaches
///   pi_g psi_gs (z1_s + psi_g's (1 - q_g - q_g') z2_s)
/// users in total. Throws ZFormSingular.
FairSolution solve_agnostic_zform(const PropagationCoefficients& coeffs);

/// Same rule with the sign on the b-side correction term flipped, as it is commonly
/// printed. Kept only so tests can show where the two disagree.
Targeting zform_decision_flipped_sign(const PropagationCoefficients& coeffs);

struct FeasibilityReport {
    bool feasible = true;
    /// For infeasible problems: the first of the four classic line-ordering cases that
    /// fires, or 5 when infeasibility only shows inside the unit box.
    std::optional<int> violated_case;
};

/// Exact test on the unit box. The lower envelope max(y2, y3, 0) must stay below the
/// upper envelope min(y1, y4, 1) somewhere in [0, 1].
FeasibilityReport check_feasible(const PropagationCoefficients& coeffs, const FairnessBounds& bounds);
FeasibilityReport check_feasible(const ConstraintGeometry& geo);

/// The four classic disjunctive infeasibility cases evaluated literally. They compare
/// lines over the whole positive quadrant, so they can miss instances that are only
/// infeasible inside the unit box.
std::optional<int> classic_infeasibility_case(const ConstraintGeometry& geo);

struct Point2 {
    double x = 0.0;  // theta_Aa
    double y = 0.0;  // theta_Ba
};

/// Unit square clipped by the four half-planes. Empty when infeasible.
std::vector<Point2> feasible_polygon(const ConstraintGeometry& geo);

/// Half-plane clipping route to feasibility, independent of check_feasible.
bool feasible_by_clipping(const ConstraintGeometry& geo);

struct Candidate {
    Targeting theta;
    int vertex_class = 5;
};

/// Line-pair intersections (clamped), box-edge crossings, and corners, deduplicated
/// within 1e-12 and kept only if they satisfy every constraint within 1e-9.
/// Throws EmptyCandidateSet if nothing survives.
std::vector<Candidate> enumerate_vertices(const ConstraintGeometry& geo);

/// Constraints active at theta within tol.
std::vector<ConstraintTag> binding_constraints(const ConstraintGeometry& geo, const Targeting& theta,
                                               double tol = 1e-9);

/// Best enumerated vertex. Equal objectives go to the smaller
/// pi_A |theta_Aa - 1| + pi_B |theta_Ba|, then to the lexicographically smaller theta.
FairSolution solve_fair(const PropagationCoefficients& coeffs, const FairnessBounds& bounds);

/// total(agnostic optimum) / total(theta).
double price_of_fairness(const PropagationCoefficients& coeffs, const Targeting& theta);

/// POF of the fair optimum. Throws InfeasibleProblem.
double price_of_fairness(const PropagationCoefficients& coeffs, const FairnessBounds& bounds);

struct GridFeasibility {
    long feasible_points = 0;
    int resolution = 0;
    bool any() const { return feasible_points > 0; }
};

/// Counts grid points (resolution^2 over the unit box) meeting both ratio bounds.
GridFeasibility grid_feasibility(const PropagationCoefficients& coeffs, const FairnessBounds& bounds,
                                 int resolution = 201, double tol = 0.0);

/// Best grid point meeting both ratio bounds. Rows run in parallel; the result does not
/// depend on the worker count.
FairSolution solve_grid(const PropagationCoefficients& coeffs, const FairnessBounds& bounds,
                        int resolution = 1001);

}  // namespace fairshare
