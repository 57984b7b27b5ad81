#include "fairshare/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "fairshare/error.hpp"
#include "fairshare/parallel.hpp"

namespace fairshare {

using enum Group;
using enum Article;

namespace {

constexpr double kTieTol = 1e-12;
constexpr double kDedupTol = 1e-12;
constexpr double kFeasTol = 1e-9;
// Slack on lower-minus-upper line gaps in the exact feasibility test.
constexpr double kGapTol = 1e-12;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Clamp, and put points within the dedup tolerance of an edge exactly on it, so that a
// rounded line crossing and the box corner it stands for collapse to the corner.
double snap01(double v)
{
    if (std::abs(v) <= kDedupTol) return 0.0;
    if (std::abs(v - 1.0) <= kDedupTol) return 1.0;
    return clamp01(v);
}

double preference_distance(const ModelParams& params, const Targeting& t)
{
    return params.pi(A) * std::abs(t.theta_A_a - 1.0) + params.pi(B) * std::abs(t.theta_B_a);
}

// True if lhs should replace rhs among equal-objective points.
bool preferred_on_tie(const ModelParams& params, const Targeting& lhs, const Targeting& rhs)
{
    const double dl = preference_distance(params, lhs);
    const double dr = preference_distance(params, rhs);
    if (std::abs(dl - dr) > kTieTol) return dl < dr;
    if (lhs.theta_A_a != rhs.theta_A_a) return lhs.theta_A_a < rhs.theta_A_a;
    return lhs.theta_B_a < rhs.theta_B_a;
}

}  // namespace

std::string_view to_string(SolveMode mode)
{
    switch (mode) {
    case SolveMode::Agnostic: return "agnostic";
    case SolveMode::FairAware: return "fair";
    case SolveMode::GridOracle: return "grid";
    }
    return "?";
}

std::string_view to_string(ConstraintTag tag)
{
    switch (tag) {
    case ConstraintTag::y1: return "y1";
    case ConstraintTag::y2: return "y2";
    case ConstraintTag::y3: return "y3";
    case ConstraintTag::y4: return "y4";
    case ConstraintTag::box: return "box";
    }
    return "?";
}

FairSolution solve_agnostic(const PropagationCoefficients& coeffs)
{
    const ObjectiveCoefficients c = objective_coefficients(coeffs);
    FairSolution sol;
    sol.mode = SolveMode::Agnostic;
    sol.tie = std::abs(c.c_A_a) <= kTieTol || std::abs(c.c_B_a) <= kTieTol;
    sol.theta = {c.c_A_a > -kTieTol ? 1.0 : 0.0, c.c_B_a > -kTieTol ? 1.0 : 0.0};
    sol.objective = c.evaluate(sol.theta);
    sol.binding = {ConstraintTag::box};
    sol.pof = 1.0;
    return sol;
}

ZSums z_sums(double a1, double a2, int horizon)
{
    if (std::abs(a1 - a2) < 1e-12 || std::abs(1.0 - a1) < 1e-12 || std::abs(1.0 - a2) < 1e-12)
        throw Error(ErrorCode::ZFormSingular, "z-form sums need distinct roots away from 1");
    // sum_{t=1..n} a^t = a (1 - a^n) / (1 - a)
    auto geometric = [](double a, int n) { return a * (1.0 - std::pow(a, n)) / (1.0 - a); };
    const double gap = a1 - a2;
    return {(geometric(a1, horizon) - geometric(a2, horizon)) / gap,
            (geometric(a1, horizon - 1) - geometric(a2, horizon - 1)) / gap};
}

namespace {

// Total mass reached per unit pi_g when seeding group g with article s, up to the
// sign applied to the correction term.
double zform_reach(const PropagationCoefficients& coeffs, Group g, Article s, double sign)
{
    const ModelParams& p = coeffs.params;
    const ArticleSpectrum& spec = coeffs.spectrum_of(s);
    const ZSums z = z_sums(spec.a1, spec.a2, p.horizon);
    const Group go = opposite(g);
    return p.psi(g, s) * (z.z1 + sign * p.psi(go, s) * (1.0 - p.q(g) - p.q(go)) * z.z2);
}

}  // namespace

FairSolution solve_agnostic_zform(const PropagationCoefficients& coeffs)
{
    FairSolution sol;
    sol.mode = SolveMode::Agnostic;
    std::array<double, 2> pick{};
    for (Group g : kGroups) {
        const double ra = zform_reach(coeffs, g, a, 1.0);
        const double rb = zform_reach(coeffs, g, b, 1.0);
        const double diff = ra - rb;
        if (std::abs(diff) <= kTieTol * std::max(std::abs(ra), std::abs(rb))) sol.tie = true;
        pick[index(g)] = diff > -kTieTol * std::max(std::abs(ra), std::abs(rb)) ? 1.0 : 0.0;
    }
    sol.theta = {pick[0], pick[1]};
    sol.objective = objective_coefficients(coeffs).evaluate(sol.theta);
    sol.binding = {ConstraintTag::box};
    sol.pof = 1.0;
    return sol;
}

Targeting zform_decision_flipped_sign(const PropagationCoefficients& coeffs)
{
    std::array<double, 2> pick{};
    for (Group g : kGroups)
        pick[index(g)] =
            zform_reach(coeffs, g, a, 1.0) > zform_reach(coeffs, g, b, -1.0) ? 1.0 : 0.0;
    return {pick[0], pick[1]};
}

std::optional<int> classic_infeasibility_case(const ConstraintGeometry& geo)
{
    const BoundSums& k = geo.sums;
    const double lo = geo.bounds.delta_lo;
    const double hi = geo.bounds.delta_hi;
    const double mBb = k.m(B, b);
    const double mAb = k.m(A, b);

    if (lo * mBb / k.m_lo(A, a) > mAb / k.m_lo(A, b) && lo * mBb / k.n_lo(A, a) > mAb / k.n_lo(A, b))
        return 1;
    if (mAb / k.m_hi(A, b) > hi * mBb / k.m_hi(A, a) && mAb / k.n_hi(A, b) > hi * mBb / k.n_hi(A, a))
        return 2;
    if (lo * k.w(B, b) > k.w(A, a) && lo * mBb / k.m_lo(A, a) > lo * mBb / (lo * mBb - k.n_lo(A, a)))
        return 3;
    if (k.u(A, b) > hi * k.u(B, a) && mAb / k.m_hi(A, b) > mAb / (mAb - k.n_hi(A, b)))
        return 4;
    return std::nullopt;
}

FeasibilityReport check_feasible(const ConstraintGeometry& geo)
{
    const ConstraintLine zero{LineId::y2, false, 0.0, 0.0};
    const ConstraintLine one{LineId::y1, true, 1.0, 0.0};
    const std::array<ConstraintLine, 3> lowers{geo.line(LineId::y2), geo.line(LineId::y3), zero};
    const std::array<ConstraintLine, 3> uppers{geo.line(LineId::y1), geo.line(LineId::y4), one};

    // Each lower/upper pair is violated where lower - upper > 0. On [0, 1] that set is
    // empty, everything, a prefix [0, r) or a suffix (r, 1]. The box is infeasible iff
    // the union of those sets covers it.
    bool covered = false;
    double prefix_end = 0.0;
    double suffix_start = 1.0;
    for (const auto& lo : lowers)
        for (const auto& up : uppers) {
            const double d0 = lo.intercept - up.intercept;
            const double d1 = lo.slope - up.slope;
            const double v0 = d0 - kGapTol;
            const double v1 = d0 + d1 - kGapTol;
            if (v0 > 0.0 && v1 > 0.0) {
                covered = true;
            } else if (v0 > 0.0) {
                prefix_end = std::max(prefix_end, (kGapTol - d0) / d1);
            } else if (v1 > 0.0) {
                suffix_start = std::min(suffix_start, (kGapTol - d0) / d1);
            }
        }
    if (prefix_end > suffix_start) covered = true;

    FeasibilityReport report;
    report.feasible = !covered;
    if (covered) report.violated_case = classic_infeasibility_case(geo).value_or(5);
    return report;
}

FeasibilityReport check_feasible(const PropagationCoefficients& coeffs, const FairnessBounds& bounds)
{
    return check_feasible(constraint_geometry(coeffs, bounds));
}

std::vector<Point2> feasible_polygon(const ConstraintGeometry& geo)
{
    std::vector<Point2> poly{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    for (const ConstraintLine& line : geo.lines) {
        // Signed slack: non-negative on the admissible side.
        auto slack = [&](const Point2& p) { return line.upper ? line.at(p.x) - p.y : p.y - line.at(p.x); };
        std::vector<Point2> next;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Point2& cur = poly[i];
            const Point2& prev = poly[(i + poly.size() - 1) % poly.size()];
            const double sc = slack(cur);
            const double sp = slack(prev);
            const bool in_cur = sc >= -kGapTol;
            const bool in_prev = sp >= -kGapTol;
            if (in_cur != in_prev) {
                const double t = sp / (sp - sc);
                next.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
            }
            if (in_cur) next.push_back(cur);
        }
        poly = std::move(next);
        if (poly.empty()) break;
    }
    return poly;
}

bool feasible_by_clipping(const ConstraintGeometry& geo) { return !feasible_polygon(geo).empty(); }

std::vector<ConstraintTag> binding_constraints(const ConstraintGeometry& geo, const Targeting& theta,
                                               double tol)
{
    std::vector<ConstraintTag> out;
    for (const ConstraintLine& line : geo.lines)
        if (std::abs(theta.theta_B_a - line.at(theta.theta_A_a)) <= tol)
            out.push_back(static_cast<ConstraintTag>(static_cast<int>(line.id)));
    for (double v : {theta.theta_A_a, theta.theta_B_a})
        if (std::abs(v) <= tol || std::abs(v - 1.0) <= tol) {
            out.push_back(ConstraintTag::box);
            break;
        }
    return out;
}

std::vector<Candidate> enumerate_vertices(const ConstraintGeometry& geo)
{
    std::vector<Candidate> raw;
    auto add = [&](double x, double y, int cls) {
        if (std::isfinite(x) && std::isfinite(y)) raw.push_back({{x, y}, cls});
    };
    auto crossing = [](const ConstraintLine& p, const ConstraintLine& q) -> std::optional<double> {
        const double ds = p.slope - q.slope;
        if (std::abs(ds) <= 1e-14 * std::max({std::abs(p.slope), std::abs(q.slope), 1.0}))
            return std::nullopt;
        return (q.intercept - p.intercept) / ds;
    };

    // Families 1-4: clamped crossings of an upper with a lower line.
    const std::array<std::pair<LineId, LineId>, 4> families{
        {{LineId::y1, LineId::y4}, {LineId::y1, LineId::y3}, {LineId::y2, LineId::y4}, {LineId::y2, LineId::y3}}};
    for (std::size_t f = 0; f < families.size(); ++f) {
        const ConstraintLine& p = geo.line(families[f].first);
        const ConstraintLine& q = geo.line(families[f].second);
        const auto x = crossing(p, q);
        if (!x) continue;
        const double xc = clamp01(*x);
        const int cls = static_cast<int>(f) + 1;
        for (double y : {0.0, 1.0, p.at(xc), q.at(xc)}) add(xc, y, cls);
    }

    // Family 5: box edges against every line, and the corners.
    for (double edge : {0.0, 1.0}) {
        for (double x : {0.0, 1.0}) add(x, edge, 5);
        for (const ConstraintLine& line : geo.lines) {
            if (line.slope != 0.0) add(line.inverse(edge), edge, 5);
            add(edge, line.at(edge), 5);
        }
    }
    // Crossings of the two lines that come from the same ratio. They should never meet
    // inside the box; listing them keeps the set closed if rounding says otherwise.
    for (auto [i, j] : {std::pair{LineId::y1, LineId::y2}, std::pair{LineId::y3, LineId::y4}}) {
        const auto x = crossing(geo.line(i), geo.line(j));
        if (x) add(*x, geo.line(i).at(*x), 5);
    }

    std::vector<Candidate> out;
    for (const Candidate& c : raw) {
        if (!geo.contains(c.theta, kFeasTol)) continue;
        const Targeting t{snap01(c.theta.theta_A_a), snap01(c.theta.theta_B_a)};
        if (!geo.contains(t, kFeasTol)) continue;
        const bool dup = std::any_of(out.begin(), out.end(), [&](const Candidate& o) {
            return std::abs(o.theta.theta_A_a - t.theta_A_a) <= kDedupTol &&
                   std::abs(o.theta.theta_B_a - t.theta_B_a) <= kDedupTol;
        });
        if (!dup) out.push_back({t, c.vertex_class});
    }
    if (out.empty())
        throw Error(ErrorCode::EmptyCandidateSet, "no candidate vertex satisfies the constraints");
    return out;
}

FairSolution solve_fair(const PropagationCoefficients& coeffs, const FairnessBounds& bounds)
{
    const ConstraintGeometry geo = constraint_geometry(coeffs, bounds);
    FairSolution sol;
    sol.mode = SolveMode::FairAware;
    if (!check_feasible(geo).feasible) {
        sol.feasible = false;
        sol.objective = std::numeric_limits<double>::quiet_NaN();
        return sol;
    }

    const ObjectiveCoefficients obj = objective_coefficients(coeffs);
    const std::vector<Candidate> candidates = enumerate_vertices(geo);
    const Candidate* best = nullptr;
    double best_value = -std::numeric_limits<double>::infinity();
    for (const Candidate& c : candidates) {
        const double v = obj.evaluate(c.theta);
        const double tol = kTieTol * std::max(1.0, std::abs(best_value));
        if (best == nullptr || v > best_value + tol) {
            best = &c;
            best_value = v;
        } else if (v >= best_value - tol && preferred_on_tie(coeffs.params, c.theta, best->theta)) {
            best = &c;
            best_value = std::max(best_value, v);
        }
    }
    for (const Candidate& c : candidates)
        if (&c != best && std::abs(obj.evaluate(c.theta) - best_value) <=
                              kTieTol * std::max(1.0, std::abs(best_value)))
            sol.tie = true;

    sol.theta = best->theta;
    sol.objective = obj.evaluate(sol.theta);
    sol.vertex_class = best->vertex_class;
    sol.binding = binding_constraints(geo, sol.theta);
    sol.pof = price_of_fairness(coeffs, sol.theta);
    return sol;
}

double price_of_fairness(const PropagationCoefficients& coeffs, const Targeting& theta)
{
    const ObjectiveCoefficients obj = objective_coefficients(coeffs);
    const double denom = obj.evaluate(theta);
    if (!(denom > 0.0)) throw Error(ErrorCode::ZeroDenominator, "policy reaches no users");
    return obj.evaluate(solve_agnostic(coeffs).theta) / denom;
}

double price_of_fairness(const PropagationCoefficients& coeffs, const FairnessBounds& bounds)
{
    const FairSolution sol = solve_fair(coeffs, bounds);
    if (!sol.feasible) throw Error(ErrorCode::InfeasibleProblem, "fairness bounds admit no targeting");
    return *sol.pof;
}

namespace {

struct GridEval {
    double wAa, uAa, wBb, uBb, wAb, uAb, wBa, uBa;
    FairnessBounds bounds;
    double tol;

    // Ratio bounds evaluated directly, denominators multiplied through.
    bool feasible(double x, double y) const
    {
        const double num1 = x * wAa + y * uAa;
        const double den1 = (1.0 - y) * wBb + (1.0 - x) * uBb;
        const double num2 = (1.0 - x) * wAb + (1.0 - y) * uAb;
        const double den2 = y * wBa + x * uBa;
        if (!(den1 > 0.0) || !(den2 > 0.0)) return false;
        auto ok = [&](double num, double den) {
            const double r = num / den;
            return r >= bounds.delta_lo - tol && r <= bounds.delta_hi + tol;
        };
        return ok(num1, den1) && ok(num2, den2);
    }
};

GridEval grid_eval(const PropagationCoefficients& c, const FairnessBounds& bounds, double tol)
{
    return {c.sum_w(A, a), c.sum_u(A, a), c.sum_w(B, b), c.sum_u(B, b),
            c.sum_w(A, b), c.sum_u(A, b), c.sum_w(B, a), c.sum_u(B, a), bounds, tol};
}

double grid_coord(int i, int resolution) { return static_cast<double>(i) / (resolution - 1); }

}  // namespace

GridFeasibility grid_feasibility(const PropagationCoefficients& coeffs, const FairnessBounds& bounds,
                                 int resolution, double tol)
{
    if (resolution < 2) throw Error(ErrorCode::InvalidParameter, "grid resolution must be at least 2");
    const GridEval eval = grid_eval(coeffs, bounds, tol);
    std::vector<long> per_row(static_cast<std::size_t>(resolution), 0);
    parallel_for(per_row.size(), [&](std::size_t i) {
        const double x = grid_coord(static_cast<int>(i), resolution);
        long count = 0;
        for (int j = 0; j < resolution; ++j)
            if (eval.feasible(x, grid_coord(j, resolution))) ++count;
        per_row[i] = count;
    });
    GridFeasibility out;
    out.resolution = resolution;
    for (long c : per_row) out.feasible_points += c;
    return out;
}

FairSolution solve_grid(const PropagationCoefficients& coeffs, const FairnessBounds& bounds, int resolution)
{
    if (resolution < 2) throw Error(ErrorCode::InvalidParameter, "grid resolution must be at least 2");
    const GridEval eval = grid_eval(coeffs, bounds, 0.0);
    const ObjectiveCoefficients obj = objective_coefficients(coeffs);

    struct RowBest {
        bool found = false;
        int j = 0;
        double value = 0.0;
    };
    std::vector<RowBest> rows(static_cast<std::size_t>(resolution));
    parallel_for(rows.size(), [&](std::size_t i) {
        const double x = grid_coord(static_cast<int>(i), resolution);
        RowBest best;
        for (int j = 0; j < resolution; ++j) {
            const double y = grid_coord(j, resolution);
            if (!eval.feasible(x, y)) continue;
            const double v = obj.evaluate({x, y});
            if (!best.found || v > best.value) best = {true, j, v};
        }
        rows[i] = best;
    });

    FairSolution sol;
    sol.mode = SolveMode::GridOracle;
    sol.feasible = false;
    sol.objective = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].found) continue;
        if (!sol.feasible || rows[i].value > sol.objective) {
            sol.feasible = true;
            sol.objective = rows[i].value;
            sol.theta = {grid_coord(static_cast<int>(i), resolution), grid_coord(rows[i].j, resolution)};
        }
    }
    if (sol.feasible) {
        sol.binding = binding_constraints(constraint_geometry(coeffs, bounds), sol.theta,
                                          1.0 / (resolution - 1));
        sol.pof = price_of_fairness(coeffs, sol.theta);
    }
    return sol;
}

}  // namespace fairshare
