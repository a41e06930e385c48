#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "cpsis/degree_model.hpp"

namespace cpsis {

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct IntegrationConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-8;
    double t_max = 50.0;
    long long max_steps = 1000000;
    double equilibrium_tol = 1e-9;
    /// Ascending times the stepper must land on exactly (no interpolation;
    /// steps are clipped). May be empty.
    std::vector<double> sample_times;

    /// Scale-aware defaults: abs_tol = 1e-8 N, equilibrium_tol = 1e-9 N max(tau, gamma).
    static IntegrationConfig for_model(const DegreeDistribution& dist, const EpidemicParams& params,
                                       double t_max, double rel_tol = 1e-8);
};

struct Trajectory {
    std::vector<double> times;                // strictly increasing, every accepted step
    std::vector<std::vector<double>> states;  // matching flat state snapshots
    bool converged = false;                   // terminal RHS max-norm < equilibrium_tol
    double terminal_rhs_norm = 0.0;
};

/// Adaptive Dormand-Prince 5(4) with PI step-size control. Integrates over
/// [0, t_max] and retains every accepted step.
Trajectory integrate(const OdeRhs& rhs, std::span<const double> y0, const IntegrationConfig& cfg);

/// As integrate, but returns early as soon as the RHS max-norm drops below
/// equilibrium_tol. Returns the terminal state and the convergence flag.
std::pair<std::vector<double>, bool> integrate_to_equilibrium(const OdeRhs& rhs, std::span<const double> y0,
                                                              const IntegrationConfig& cfg);

}  // namespace cpsis
