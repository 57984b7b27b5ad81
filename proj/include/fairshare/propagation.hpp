#pragma once

#include <array>
#include <span>
#include <vector>

#include "fairshare/model.hpp"
#include "fairshare/types.hpp"

namespace fairshare {

/// Per (group, article) time series over t = 1..T. Time indices are 1-based.
template <class Tag>
class SeriesTable {
public:
    SeriesTable() = default;
    explicit SeriesTable(int horizon) : horizon_(horizon)
    {
        for (auto& cell : data_.cells) cell.assign(static_cast<std::size_t>(horizon), 0.0);
    }

    int horizon() const { return horizon_; }

    double& operator()(Group g, Article s, int t) { return data_(g, s)[static_cast<std::size_t>(t - 1)]; }
    double operator()(Group g, Article s, int t) const
    {
        return data_(g, s)[static_cast<std::size_t>(t - 1)];
    }

    std::span<const double> series(Group g, Article s) const { return data_(g, s); }

    double sum(Group g, Article s) const
    {
        double total = 0.0;
        for (double v : data_(g, s)) total += v;
        return total;
    }

    double total() const
    {
        double acc = 0.0;
        for (Group g : kGroups)
            for (Article s : kArticles) acc += sum(g, s);
        return acc;
    }

private:
    int horizon_ = 0;
    GroupArticle<std::vector<double>> data_;
};

struct MassTag {};
struct ExposureTag {};

/// l(g, s, t): mass of group-g users arriving at t who clicked and liked article s.
using MassTrajectory = SeriesTable<MassTag>;
/// e(g, s, t) = l(g, s, t) / pi_g.
using ExposureSeries = SeriesTable<ExposureTag>;

/// Runs the mass recursion forward from the t = 1 seeding pi_g * theta_gs * psi_gs.
MassTrajectory propagate_recursive(const ModelParams& params, const Targeting& theta);

ExposureSeries exposure_series(const MassTrajectory& traj, const ModelParams& params);

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Per-article transition on (l_A, l_B): row g is psi_gs * (q_g, 1 - q_g') in group order.
Matrix2 propagation_matrix(const ModelParams& params, Article s);

/// Roots of z^2 - (psi_A q_A + psi_B q_B) z + psi_A psi_B (q_A + q_B - 1), a1 >= a2.
struct ArticleSpectrum {
    double a1 = 0.0;
    double a2 = 0.0;
    double discriminant = 0.0;
};

ArticleSpectrum article_spectrum(const ModelParams& params, Article s);

enum class CoefficientSource { Recursive, ClosedForm };

/// Linear decomposition l(g, s, t) = theta_gs * w(g, s, t) + theta_g's * u(g, s, t).
struct PropagationCoefficients {
    ModelParams params;
    CoefficientSource source = CoefficientSource::Recursive;
    GroupArticle<std::vector<double>> w;
    GroupArticle<std::vector<double>> u;
    std::array<ArticleSpectrum, 2> spectrum{};

    int horizon() const { return params.horizon; }
    double w_at(Group g, Article s, int t) const { return w(g, s)[static_cast<std::size_t>(t - 1)]; }
    double u_at(Group g, Article s, int t) const { return u(g, s)[static_cast<std::size_t>(t - 1)]; }
    double sum_w(Group g, Article s) const;
    double sum_u(Group g, Article s) const;
    const ArticleSpectrum& spectrum_of(Article s) const { return spectrum[index(s)]; }
};

/// w from unit targeting of (g, s) alone, u from unit targeting of (g', s) alone.
PropagationCoefficients coefficients_recursive(const ModelParams& params);

/// Eigen form with amplitudes fitted to w(1) = pi_g psi_gs, u(1) = 0.
/// Throws NearDefectiveMatrix when |a1 - a2| < 1e-12.
PropagationCoefficients coefficients_closed_form(const ModelParams& params);

/// Closed form, falling back to the recursion for near-defective spectra.
PropagationCoefficients compute_coefficients(const ModelParams& params);

/// Amplitudes of w(t) = w1 a1^(t-1) + w2 a2^(t-1) and u(t) = u1 (a1^(t-1) - a2^(t-1)).
struct Amplitudes {
    double w1 = 0.0;
    double w2 = 0.0;
    double u = 0.0;
};

/// Amplitudes consistent with the recursion's initial conditions.
Amplitudes eigen_amplitudes(const ModelParams& params, Group g, Article s);

/// Amplitudes exactly as printed in the closed-form theorem; kept for discrepancy reports.
Amplitudes printed_amplitudes(const ModelParams& params, Group g, Article s);

/// (a1^n - a2^n) / (a1 - a2), evaluated without cancellation for close roots. D(0) = 0.
double power_divided_difference(double a1, double a2, int n);

/// l reconstructed from coefficients for a given targeting.
MassTrajectory reconstruct(const PropagationCoefficients& coeffs, const Targeting& theta);

struct ObjectiveCoefficients {
    double c_A_a = 0.0;
    double c_B_a = 0.0;
    double constant = 0.0;

    double evaluate(const Targeting& theta) const
    {
        return c_A_a * theta.theta_A_a + c_B_a * theta.theta_B_a + constant;
    }
};

/// Total engagement sum_t sum_g sum_s l = c_Aa theta_Aa + c_Ba theta_Ba + constant.
ObjectiveCoefficients objective_coefficients(const PropagationCoefficients& coeffs);

double total_mass(const PropagationCoefficients& coeffs, const Targeting& theta);
double total_mass(const ModelParams& params, const Targeting& theta);

}  // namespace fairshare
