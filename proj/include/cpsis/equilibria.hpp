#pragma once

#include "cpsis/cp_system.hpp"

namespace cpsis {

/// The disease-free steady state: [S_l] = N_l, [SI] = [II] = 0, [SS] = nN.
CPState disease_free(const DegreeDistribution& dist);

/// Unique nonnegative root Z of gamma nN U = gamma Z^2 + Z U (tau + 2 gamma) + gamma U^2,
/// evaluated in a cancellation-safe conjugate form. Domain U in [0, nN].
double g_of_U(double U, const EpidemicParams& params, const DegreeDistribution& dist);

/// First and second derivatives of g. Domain U in (0, nN].
double g_prime(double U, const EpidemicParams& params, const DegreeDistribution& dist);
double g_double_prime(double U, const EpidemicParams& params, const DegreeDistribution& dist);

/// Auxiliary function whose unique unit value locates the endemic [SS]:
/// f(U) = (tau U / (U + g)) sum_l n_l (n_l - 1) N_l / (gamma (U + g) + tau n_l g).
/// Domain U in (0, nN].
double f_of_U(double U, const EpidemicParams& params, const DegreeDistribution& dist);

enum class EquilibriumKind { DiseaseFree, Endemic };

struct EndemicCoordinates {
    std::vector<double> X;  // steady [S_l]
    double Z;               // steady [SI]
    double U;               // steady [SS]
    double V;               // steady [II]
};

struct EquilibriumReport {
    EquilibriumKind kind = EquilibriumKind::Endemic;
    CPState coordinates;
    EndemicCoordinates endemic;
    double residual_norm = 0.0;  // max-norm of the full-system RHS, always measured
    int iterations = 0;          // bisection count
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

/// Bisection for f(U) = 1 on (0, nN), then Z = g(U), X_l by back-substitution
/// and V from pair conservation. Requires tau > tau_c; with allow_virtual the
/// unphysical subcritical branch (U > nN, Z < 0) is returned instead of
/// throwing BelowThreshold.
EquilibriumReport endemic_equilibrium(const EpidemicParams& params, const DegreeDistribution& dist,
                                      bool allow_virtual = false);

/// Max-norm of the full-system RHS at the given state.
double residual(const CPState& state, const EpidemicParams& params, const DegreeDistribution& dist);

}  // namespace cpsis
