#include "cpsis/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cpsis {

namespace {

double discriminant_root(double U, const EpidemicParams& p, double nN) {
    return std::sqrt(U * U * (p.tau * p.tau + 4.0 * p.gamma * p.tau) +
                     4.0 * U * nN * p.gamma * p.gamma);
}

// g without the domain check; the conjugate form stays exact for U > nN,
// where the virtual endemic branch lives (Z < 0).
double g_raw(double U, const EpidemicParams& p, double nN) {
    if (U == 0.0) return 0.0;
    const double s = discriminant_root(U, p, nN);
    return 2.0 * p.gamma * U * (nN - U) / (U * (p.tau + 2.0 * p.gamma) + s);
}

double f_raw(double U, const EpidemicParams& p, const DegreeDistribution& dist) {
    const double g = g_raw(U, p, dist.moments().stub_count);
    const double Ug = U + g;
    double sum = 0.0;
    for (std::size_t l = 0; l < dist.num_classes(); ++l) {
        const double n_l = dist.degree(l);
        sum += n_l * (n_l - 1.0) * dist.class_count(l) / (p.gamma * Ug + p.tau * n_l * g);
    }
    return p.tau * U / Ug * sum;
}

void check_domain(double U, double nN, bool allow_zero) {
    const double lo = allow_zero ? 0.0 : std::numeric_limits<double>::min();
    if (!(U >= lo) || !(U <= nN))
        throw OutOfDomain("U outside " + std::string(allow_zero ? "[0, nN]" : "(0, nN]"));
}

}  // namespace

CPState disease_free(const DegreeDistribution& dist) {
    CPState state;
    state.S.resize(dist.num_classes());
    state.I.assign(dist.num_classes(), 0.0);
    for (std::size_t l = 0; l < dist.num_classes(); ++l) state.S[l] = dist.class_count(l);
    state.SI = 0.0;
    state.SS = dist.moments().stub_count;
    state.II = 0.0;
    return state;
}

double g_of_U(double U, const EpidemicParams& params, const DegreeDistribution& dist) {
    const double nN = dist.moments().stub_count;
    check_domain(U, nN, true);
    return g_raw(U, params, nN);
}

double g_prime(double U, const EpidemicParams& params, const DegreeDistribution& dist) {
    const double nN = dist.moments().stub_count;
    check_domain(U, nN, false);
    const double s = discriminant_root(U, params, nN);
    const double tau = params.tau, gamma = params.gamma;
    return (-(tau + 2.0 * gamma) +
            (2.0 * U * (tau * tau + 4.0 * gamma * tau) + 4.0 * nN * gamma * gamma) / (2.0 * s)) /
           (2.0 * gamma);
}

double g_double_prime(double U, const EpidemicParams& params, const DegreeDistribution& dist) {
    const double nN = dist.moments().stub_count;
    check_domain(U, nN, false);
    const double s = discriminant_root(U, params, nN);
    const double g3 = params.gamma * params.gamma * params.gamma;
    return -2.0 * nN * nN * g3 / (s * s * s);
}

double f_of_U(double U, const EpidemicParams& params, const DegreeDistribution& dist) {
    check_domain(U, dist.moments().stub_count, false);
    return f_raw(U, params, dist);
}

namespace {

struct Bisection {
    double root;
    int iterations;
    double lo, hi;
};

// Plain bisection for f(U) = 1: f is strictly increasing with a sign
// change on the bracket, so this is deterministic and robust.
Bisection bisect_unit_crossing(double lo, double hi, const EpidemicParams& p,
                               const DegreeDistribution& dist, double width_tol) {
    double f_lo = f_raw(lo, p, dist);
    double f_hi = f_raw(hi, p, dist);
    if (!(f_lo < 1.0) || !(f_hi >= 1.0))
        throw BracketFailure("f(U) - 1 does not change sign on the bracket: f(lo) = " +
                             std::to_string(f_lo) + ", f(hi) = " + std::to_string(f_hi));
    int it = 0;
    while (hi - lo > width_tol && it < 80) {
        const double mid = 0.5 * (lo + hi);
        if (f_raw(mid, p, dist) < 1.0)
            lo = mid;
        else
            hi = mid;
        ++it;
    }
    return {0.5 * (lo + hi), it, lo, hi};
}

EquilibriumReport assemble(double U, const Bisection& bis, const EpidemicParams& p,
                           const DegreeDistribution& dist) {
    const double nN = dist.moments().stub_count;
    const double Z = g_raw(U, p, nN);
    const double ratio = Z / (Z + U);

    EquilibriumReport report;
    report.kind = EquilibriumKind::Endemic;
    report.endemic.U = U;
    report.endemic.Z = Z;
    report.endemic.V = nN - U - 2.0 * Z;
    report.endemic.X.resize(dist.num_classes());
    for (std::size_t l = 0; l < dist.num_classes(); ++l)
        report.endemic.X[l] =
            p.gamma * dist.class_count(l) / (p.gamma + p.tau * dist.degree(l) * ratio);

    report.coordinates.S = report.endemic.X;
    report.coordinates.I.resize(dist.num_classes());
    for (std::size_t l = 0; l < dist.num_classes(); ++l)
        report.coordinates.I[l] = dist.class_count(l) - report.endemic.X[l];
    report.coordinates.SI = Z;
    report.coordinates.SS = U;
    report.coordinates.II = report.endemic.V;

    report.iterations = bis.iterations;
    report.bracket_lo = bis.lo;
    report.bracket_hi = bis.hi;
    report.residual_norm = residual(report.coordinates, p, dist);
    return report;
}

}  // namespace

EquilibriumReport endemic_equilibrium(const EpidemicParams& params, const DegreeDistribution& dist,
                                      bool allow_virtual) {
    validate(params);
    const double nN = dist.moments().stub_count;
    const double critical = tau_c(dist, params.gamma);
    const double width_tol = 1e-12 * nN;

    if (params.tau > critical) {
        // f(eps nN) is close to the U -> 0 limit (< 1), f(nN) = tau/tau_c > 1.
        const Bisection bis = bisect_unit_crossing(1e-12 * nN, nN, params, dist, width_tol);
        return assemble(bis.root, bis, params, dist);
    }

    if (!allow_virtual) throw BelowThreshold{};

    // Subcritical virtual branch: the unit crossing of f sits beyond nN,
    // where Z = g(U) < 0. Expand the upper endpoint until f exceeds 1.
    double lo = nN, hi = 1.5 * nN;
    for (int i = 0; i < 64 && f_raw(hi, params, dist) < 1.0; ++i) {
        lo = hi;
        hi *= 1.5;
        if (hi > 50.0 * nN)
            throw BracketFailure("virtual branch bracket expansion failed (tau far below tau_c)");
    }
    const Bisection bis = bisect_unit_crossing(lo, hi, params, dist, width_tol);
    return assemble(bis.root, bis, params, dist);
}

double residual(const CPState& state, const EpidemicParams& params, const DegreeDistribution& dist) {
    const CPState d = rhs_full(state, params, dist);
    double norm = 0.0;
    for (std::size_t l = 0; l < d.S.size(); ++l)
        norm = std::max({norm, std::abs(d.S[l]), std::abs(d.I[l])});
    return std::max({norm, std::abs(d.SI), std::abs(d.SS), std::abs(d.II)});
}

}  // namespace cpsis
