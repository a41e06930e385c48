#pragma once

#include <span>
#include <vector>

#include "cpsis/degree_model.hpp"

namespace cpsis {

/// Full model state: per-class singles [S_l], [I_l] plus the aggregate
/// pair counts [SI], [SS], [II]. All entries are absolute counts.
struct CPState {
    std::vector<double> S;
    std::vector<double> I;
    double SI = 0.0;
    double SS = 0.0;
    double II = 0.0;
};

/// (L+2)-dimensional form with [I_l] and [SS] removed via conservation.
struct ReducedState {
    std::vector<double> S;
    double SI = 0.0;
    double II = 0.0;
};

/// (L+1)-dimensional form in the edge prevalence ratio theta = [SI]/S_s.
struct ThetaState {
    std::vector<double> S;
    double theta = 0.0;
};

struct DerivedAggregates {
    double S_s;   // sum n_l S_l, susceptible stubs
    double D;     // sum n_l^2 S_l
    double I_s;   // sum n_l I_l, infected stubs
    double Q_cp;  // (1/S_s^2) sum (n_l - 1) n_l S_l; NaN when S_s = 0
    bool stubs_available;  // S_s > 0
};

CPState rhs_full(const CPState& state, const EpidemicParams& params, const DegreeDistribution& dist);
ReducedState rhs_reduced(const ReducedState& state, const EpidemicParams& params, const DegreeDistribution& dist);
ThetaState rhs_theta(const ThetaState& state, const EpidemicParams& params, const DegreeDistribution& dist);

DerivedAggregates aggregates(const CPState& state, const DegreeDistribution& dist);
DerivedAggregates aggregates(const ThetaState& state, const DegreeDistribution& dist);

struct ConservationResiduals {
    std::vector<double> singles;  // S_l + I_l - N_l per class
    double pairs;                 // SS + 2 SI + II - nN
    double stubs;                 // S_s - SS - SI
};

ConservationResiduals conservation_residuals(const CPState& state, const DegreeDistribution& dist);

/// State with the given number of infected per class and pair counts seeded
/// by random mixing: SI = S_s I_s / nN, SS = S_s^2 / nN, II = I_s^2 / nN.
/// Satisfies both pair conservation identities exactly.
CPState initial_condition(const DegreeDistribution& dist, std::span<const double> infected_per_class);

ReducedState reduce(const CPState& state);
CPState lift(const ReducedState& state, const DegreeDistribution& dist);
ThetaState theta_projection(const CPState& state, const DegreeDistribution& dist);

// Flat layouts used by the integrator:
//   full:    [S_1..S_L, I_1..I_L, SI, SS, II]
//   reduced: [S_1..S_L, SI, II]
//   theta:   [S_1..S_L, theta]
std::vector<double> pack(const CPState& state);
std::vector<double> pack(const ReducedState& state);
std::vector<double> pack(const ThetaState& state);
CPState unpack_full(std::span<const double> y, std::size_t L);
ReducedState unpack_reduced(std::span<const double> y, std::size_t L);
ThetaState unpack_theta(std::span<const double> y, std::size_t L);

// Allocation-free right-hand sides on the flat layouts. All three throw
// SusceptibleStubsExhausted when S_s < 1e-12 nN; that regime is outside
// the model's admissible set and integration must abort rather than clamp.
void rhs_full_into(std::span<const double> y, std::span<double> dydt,
                   const EpidemicParams& params, const DegreeDistribution& dist);
void rhs_reduced_into(std::span<const double> y, std::span<double> dydt,
                      const EpidemicParams& params, const DegreeDistribution& dist);
void rhs_theta_into(std::span<const double> y, std::span<double> dydt,
                    const EpidemicParams& params, const DegreeDistribution& dist);

}  // namespace cpsis
