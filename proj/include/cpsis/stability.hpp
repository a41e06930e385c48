#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "cpsis/cp_system.hpp"
#include "cpsis/eigen_small.hpp"
#include "cpsis/equilibria.hpp"
#include "cpsis/integrator.hpp"

namespace cpsis {

struct DfeSpectrum {
    double repeated_eig;       // -gamma
    std::size_t multiplicity;  // L
    std::array<std::complex<double>, 2> quad_roots;  // roots of the (L+2)-block quadratic
    double alpha;              // tau (<n^2>-<n>)/<n> - (tau + gamma)
    bool stable;               // alpha + tau < 0, equivalently tau < tau_c
};

/// Analytic spectrum of the reduced-system Jacobian at the disease-free state.
DfeSpectrum dfe_spectrum(const EpidemicParams& params, const DegreeDistribution& dist);

/// Analytic reduced-system Jacobian at the disease-free state (block form).
Matrix dfe_jacobian(const EpidemicParams& params, const DegreeDistribution& dist);

/// Jacobian of the infected-variables system at the bifurcation point tau = tau_c.
Matrix critical_jacobian(const DegreeDistribution& dist, double gamma);

struct NullEigenvectors {
    std::vector<double> w;  // right null vector of J_c, length L+2
    std::vector<double> v;  // left null vector, length L+2
};

NullEigenvectors null_eigenvectors(const DegreeDistribution& dist, double gamma);

struct BifurcationCoefficients {
    double b;  // quadratic normal-form coefficient, closed form (< 0)
    double d;  // parameter-crossing coefficient, closed form (> 0)
    double b_from_sums;  // recomputed from the defining sums over second partials
    double d_from_sums;
    std::vector<double> w, v;
};

/// Evaluates the closed forms for b and d and cross-checks them against the
/// sum-based definition; throws Error if the two routes disagree beyond
/// 1e-9 relative.
BifurcationCoefficients bifurcation_coefficients(const DegreeDistribution& dist, double gamma);

/// Centered-difference Jacobian with steps h_j = h_rel * max(|y_j|, step_floor).
Matrix numeric_jacobian(const OdeRhs& rhs, std::span<const double> y, double h_rel,
                        double step_floor);

enum class StabilityVerdict { Stable, Unstable, Marginal };

StabilityVerdict classify(double leading_re, double gamma, double tol_scale = 1e-8);

struct StabilityReport {
    EquilibriumKind kind;
    std::complex<double> leading;
    StabilityVerdict verdict;
    bool analytic;  // false when the verdict comes from a numeric Jacobian
};

struct SweepRow {
    double tau;
    double dfe_lead_re;
    std::optional<double> endemic_sum_I;
    std::optional<double> endemic_lead_re;
};

/// Per-tau table of DFE and endemic-branch diagnostics. Endemic columns are
/// empty for tau <= tau_c unless allow_virtual is set.
std::vector<SweepRow> bifurcation_sweep(const DegreeDistribution& dist, double gamma,
                                        std::span<const double> tau_grid,
                                        bool allow_virtual = false);

}  // namespace cpsis
