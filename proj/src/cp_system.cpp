#include "cpsis/cp_system.hpp"

#include <cmath>
#include <limits>

namespace cpsis {

namespace {

struct StubSums {
    double S_s;  // sum n_l S_l
    double D;    // sum n_l^2 S_l
};

StubSums stub_sums(std::span<const double> S, const DegreeDistribution& dist) {
    StubSums sums{0.0, 0.0};
    for (std::size_t l = 0; l < dist.num_classes(); ++l) {
        const double n_l = dist.degree(l);
        sums.S_s += n_l * S[l];
        sums.D += n_l * n_l * S[l];
    }
    return sums;
}

double require_stubs(const StubSums& sums, const DegreeDistribution& dist) {
    if (!(sums.S_s >= 1e-12 * dist.moments().stub_count)) throw SusceptibleStubsExhausted{};
    return sums.S_s;
}

}  // namespace

void rhs_full_into(std::span<const double> y, std::span<double> dydt,
                   const EpidemicParams& params, const DegreeDistribution& dist) {
    const std::size_t L = dist.num_classes();
    const auto S = y.subspan(0, L);
    const auto I = y.subspan(L, L);
    const double SI = y[2 * L], SS = y[2 * L + 1], II = y[2 * L + 2];

    const StubSums sums = stub_sums(S, dist);
    const double S_s = require_stubs(sums, dist);
    const double Q = (sums.D - S_s) / (S_s * S_s);
    const double pressure = params.tau * SI / S_s;

    for (std::size_t l = 0; l < L; ++l) {
        const double infection = dist.degree(l) * S[l] * pressure;
        dydt[l] = params.gamma * I[l] - infection;
        dydt[L + l] = infection - params.gamma * I[l];
    }
    dydt[2 * L] = params.gamma * (II - SI) + params.tau * (SS - SI) * SI * Q - params.tau * SI;
    dydt[2 * L + 1] = 2.0 * params.gamma * SI - 2.0 * params.tau * SS * SI * Q;
    dydt[2 * L + 2] = 2.0 * params.tau * SI - 2.0 * params.gamma * II + 2.0 * params.tau * SI * SI * Q;
}

void rhs_reduced_into(std::span<const double> y, std::span<double> dydt,
                      const EpidemicParams& params, const DegreeDistribution& dist) {
    const std::size_t L = dist.num_classes();
    const auto S = y.subspan(0, L);
    const double SI = y[L], II = y[L + 1];
    const double nN = dist.moments().stub_count;

    const StubSums sums = stub_sums(S, dist);
    const double S_s = require_stubs(sums, dist);
    const double Q = (sums.D - S_s) / (S_s * S_s);
    const double pressure = params.tau * SI / S_s;

    for (std::size_t l = 0; l < L; ++l)
        dydt[l] = params.gamma * (dist.class_count(l) - S[l]) - dist.degree(l) * S[l] * pressure;
    // [SS] - [SI] = nN - 3[SI] - [II] under pair conservation.
    dydt[L] = params.gamma * (II - SI) + params.tau * (nN - 3.0 * SI - II) * SI * Q - params.tau * SI;
    dydt[L + 1] = 2.0 * params.tau * SI - 2.0 * params.gamma * II + 2.0 * params.tau * SI * SI * Q;
}

void rhs_theta_into(std::span<const double> y, std::span<double> dydt,
                    const EpidemicParams& params, const DegreeDistribution& dist) {
    const std::size_t L = dist.num_classes();
    const auto S = y.subspan(0, L);
    const double theta = y[L];
    const double nN = dist.moments().stub_count;

    const StubSums sums = stub_sums(S, dist);
    const double S_s = require_stubs(sums, dist);

    for (std::size_t l = 0; l < L; ++l)
        dydt[l] = params.gamma * (dist.class_count(l) - S[l]) -
                  params.tau * dist.degree(l) * S[l] * theta;
    dydt[L] = params.gamma * (nN / S_s) * (1.0 - theta) - params.gamma * (1.0 + theta) +
              params.tau * (sums.D / S_s - 2.0) * theta * (1.0 - theta);
}

CPState rhs_full(const CPState& state, const EpidemicParams& params, const DegreeDistribution& dist) {
    std::vector<double> y = pack(state);
    std::vector<double> dydt(y.size());
    rhs_full_into(y, dydt, params, dist);
    return unpack_full(dydt, dist.num_classes());
}

ReducedState rhs_reduced(const ReducedState& state, const EpidemicParams& params, const DegreeDistribution& dist) {
    std::vector<double> y = pack(state);
    std::vector<double> dydt(y.size());
    rhs_reduced_into(y, dydt, params, dist);
    return unpack_reduced(dydt, dist.num_classes());
}

ThetaState rhs_theta(const ThetaState& state, const EpidemicParams& params, const DegreeDistribution& dist) {
    std::vector<double> y = pack(state);
    std::vector<double> dydt(y.size());
    rhs_theta_into(y, dydt, params, dist);
    return unpack_theta(dydt, dist.num_classes());
}

namespace {

DerivedAggregates make_aggregates(std::span<const double> S, std::span<const double> I,
                                  const DegreeDistribution& dist) {
    DerivedAggregates agg{};
    const StubSums sums = stub_sums(S, dist);
    agg.S_s = sums.S_s;
    agg.D = sums.D;
    agg.I_s = 0.0;
    for (std::size_t l = 0; l < dist.num_classes(); ++l) agg.I_s += dist.degree(l) * I[l];
    agg.stubs_available = sums.S_s > 0.0;
    agg.Q_cp = agg.stubs_available ? (sums.D - sums.S_s) / (sums.S_s * sums.S_s)
                                   : std::numeric_limits<double>::quiet_NaN();
    return agg;
}

}  // namespace

DerivedAggregates aggregates(const CPState& state, const DegreeDistribution& dist) {
    return make_aggregates(state.S, state.I, dist);
}

DerivedAggregates aggregates(const ThetaState& state, const DegreeDistribution& dist) {
    std::vector<double> I(dist.num_classes());
    for (std::size_t l = 0; l < I.size(); ++l) I[l] = dist.class_count(l) - state.S[l];
    return make_aggregates(state.S, I, dist);
}

ConservationResiduals conservation_residuals(const CPState& state, const DegreeDistribution& dist) {
    ConservationResiduals res;
    res.singles.resize(dist.num_classes());
    double S_s = 0.0;
    for (std::size_t l = 0; l < dist.num_classes(); ++l) {
        res.singles[l] = state.S[l] + state.I[l] - dist.class_count(l);
        S_s += dist.degree(l) * state.S[l];
    }
    res.pairs = state.SS + 2.0 * state.SI + state.II - dist.moments().stub_count;
    res.stubs = S_s - state.SS - state.SI;
    return res;
}

CPState initial_condition(const DegreeDistribution& dist, std::span<const double> infected_per_class) {
    const std::size_t L = dist.num_classes();
    if (infected_per_class.size() != L)
        throw CountExceedsClass("expected " + std::to_string(L) + " infected counts, got " +
                                std::to_string(infected_per_class.size()));
    CPState state;
    state.S.resize(L);
    state.I.resize(L);
    double S_s = 0.0, I_s = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        const double N_l = dist.class_count(l);
        const double I_l = infected_per_class[l];
        if (!(I_l >= 0.0) || I_l > N_l)
            throw CountExceedsClass("infected count " + std::to_string(I_l) + " outside [0, " +
                                    std::to_string(static_cast<long long>(N_l)) + "] for class " +
                                    std::to_string(l + 1));
        state.I[l] = I_l;
        state.S[l] = N_l - I_l;
        S_s += dist.degree(l) * state.S[l];
        I_s += dist.degree(l) * state.I[l];
    }
    const double nN = dist.moments().stub_count;
    state.SI = S_s * I_s / nN;
    state.SS = S_s * S_s / nN;
    state.II = I_s * I_s / nN;
    return state;
}

ReducedState reduce(const CPState& state) { return {state.S, state.SI, state.II}; }

CPState lift(const ReducedState& state, const DegreeDistribution& dist) {
    CPState full;
    full.S = state.S;
    full.I.resize(state.S.size());
    for (std::size_t l = 0; l < state.S.size(); ++l)
        full.I[l] = dist.class_count(l) - state.S[l];
    full.SI = state.SI;
    full.SS = dist.moments().stub_count - 2.0 * state.SI - state.II;
    full.II = state.II;
    return full;
}

ThetaState theta_projection(const CPState& state, const DegreeDistribution& dist) {
    double S_s = 0.0;
    for (std::size_t l = 0; l < state.S.size(); ++l) S_s += dist.degree(l) * state.S[l];
    if (!(S_s > 0.0)) throw SusceptibleStubsExhausted{};
    return {state.S, state.SI / S_s};
}

std::vector<double> pack(const CPState& state) {
    std::vector<double> y;
    y.reserve(2 * state.S.size() + 3);
    y.insert(y.end(), state.S.begin(), state.S.end());
    y.insert(y.end(), state.I.begin(), state.I.end());
    y.push_back(state.SI);
    y.push_back(state.SS);
    y.push_back(state.II);
    return y;
}

std::vector<double> pack(const ReducedState& state) {
    std::vector<double> y;
    y.reserve(state.S.size() + 2);
    y.insert(y.end(), state.S.begin(), state.S.end());
    y.push_back(state.SI);
    y.push_back(state.II);
    return y;
}

std::vector<double> pack(const ThetaState& state) {
    std::vector<double> y;
    y.reserve(state.S.size() + 1);
    y.insert(y.end(), state.S.begin(), state.S.end());
    y.push_back(state.theta);
    return y;
}

CPState unpack_full(std::span<const double> y, std::size_t L) {
    CPState state;
    state.S.assign(y.begin(), y.begin() + L);
    state.I.assign(y.begin() + L, y.begin() + 2 * L);
    state.SI = y[2 * L];
    state.SS = y[2 * L + 1];
    state.II = y[2 * L + 2];
    return state;
}

ReducedState unpack_reduced(std::span<const double> y, std::size_t L) {
    ReducedState state;
    state.S.assign(y.begin(), y.begin() + L);
    state.SI = y[L];
    state.II = y[L + 1];
    return state;
}

ThetaState unpack_theta(std::span<const double> y, std::size_t L) {
    ThetaState state;
    state.S.assign(y.begin(), y.begin() + L);
    state.theta = y[L];
    return state;
}

}  // namespace cpsis
