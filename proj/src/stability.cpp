#include "cpsis/stability.hpp"

#include <algorithm>
#include <cmath>

namespace cpsis {

DfeSpectrum dfe_spectrum(const EpidemicParams& params, const DegreeDistribution& dist) {
    validate(params);
    const Moments& m = dist.moments();
    DfeSpectrum spec;
    spec.repeated_eig = -params.gamma;
    spec.multiplicity = dist.num_classes();
    spec.alpha = params.tau * (m.n2 - m.n) / m.n - (params.tau + params.gamma);
    spec.stable = spec.alpha + params.tau < 0.0;

    // lambda^2 + p lambda + q with p = 2 gamma - alpha, q = -2 gamma (alpha + tau)
    const double p = 2.0 * params.gamma - spec.alpha;
    const double q = -2.0 * params.gamma * (spec.alpha + params.tau);
    const double disc = p * p - 4.0 * q;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double big = -0.5 * (p + std::copysign(sq, p));
        const double r1 = big;
        const double r2 = big != 0.0 ? q / big : -p - big;
        spec.quad_roots = {std::complex<double>(r1), std::complex<double>(r2)};
    } else {
        const double re = -0.5 * p;
        const double im = 0.5 * std::sqrt(-disc);
        spec.quad_roots = {std::complex<double>(re, im), std::complex<double>(re, -im)};
    }
    return spec;
}

Matrix dfe_jacobian(const EpidemicParams& params, const DegreeDistribution& dist) {
    const std::size_t L = dist.num_classes();
    const Moments& m = dist.moments();
    const double alpha = params.tau * (m.n2 - m.n) / m.n - (params.tau + params.gamma);
    Matrix j(L + 2, L + 2);
    for (std::size_t l = 0; l < L; ++l) {
        j(l, l) = -params.gamma;
        j(l, L) = -params.tau * dist.degree(l) * dist.class_count(l) / m.stub_count;
    }
    j(L, L) = alpha;
    j(L, L + 1) = params.gamma;
    j(L + 1, L) = 2.0 * params.tau;
    j(L + 1, L + 1) = -2.0 * params.gamma;
    return j;
}

Matrix critical_jacobian(const DegreeDistribution& dist, double gamma) {
    const std::size_t L = dist.num_classes();
    const double tc = tau_c(dist, gamma);
    const double nN = dist.moments().stub_count;
    Matrix j(L + 2, L + 2);
    for (std::size_t l = 0; l < L; ++l) {
        j(l, l) = -gamma;
        j(l, L) = tc * dist.degree(l) * dist.class_count(l) / nN;
    }
    j(L, L) = -tc;
    j(L, L + 1) = gamma;
    j(L + 1, L) = 2.0 * tc;
    j(L + 1, L + 1) = -2.0 * gamma;
    return j;
}

NullEigenvectors null_eigenvectors(const DegreeDistribution& dist, double gamma) {
    const std::size_t L = dist.num_classes();
    const double tc = tau_c(dist, gamma);
    const double nN = dist.moments().stub_count;
    NullEigenvectors vecs;
    vecs.w.resize(L + 2);
    vecs.v.assign(L + 2, 0.0);
    for (std::size_t l = 0; l < L; ++l)
        vecs.w[l] = tc * dist.degree(l) * dist.class_count(l) / nN;
    vecs.w[L] = gamma;
    vecs.w[L + 1] = tc;
    vecs.v[L] = 2.0;
    vecs.v[L + 1] = 1.0;
    return vecs;
}

BifurcationCoefficients bifurcation_coefficients(const DegreeDistribution& dist, double gamma) {
    const std::size_t L = dist.num_classes();
    const Moments& m = dist.moments();
    const double n = m.n, n2 = m.n2, n3 = m.n3, nN = m.stub_count;
    const double tc = tau_c(dist, gamma);
    const double ratio = (n2 - n) / n;

    BifurcationCoefficients coeffs;
    auto vecs = null_eigenvectors(dist, gamma);
    coeffs.w = std::move(vecs.w);
    coeffs.v = std::move(vecs.v);

    coeffs.d = 2.0 * gamma * ratio;
    coeffs.b = 4.0 * gamma * gamma * tc / nN / (n2 - n) * (-n3 + 2.0 * n2 - n);

    // Sum-based recomputation from the second partials of the infected-variables
    // system at the disease-free point. Components with v_k = 0 drop out.
    Matrix h_si(L + 2, L + 2);   // Hessian of the [SI] equation
    Matrix h_ii(L + 2, L + 2);   // Hessian of the [II] equation
    for (std::size_t l = 0; l < L; ++l) {
        const double n_l = dist.degree(l);
        const double cross = -tc / nN * ((n_l * n_l - n_l) * n - (n2 - n) * 2.0 * n_l) / n;
        h_si(l, L) = cross;
        h_si(L, l) = cross;
    }
    h_si(L, L) = -6.0 * tc / nN * ratio;
    h_si(L, L + 1) = h_si(L + 1, L) = -tc / nN * ratio;
    h_ii(L, L) = 4.0 * tc / nN * ratio;

    double b_sum = 0.0;
    for (std::size_t i = 0; i < L + 2; ++i)
        for (std::size_t j = 0; j < L + 2; ++j)
            b_sum += coeffs.w[i] * coeffs.w[j] *
                     (coeffs.v[L] * h_si(i, j) + coeffs.v[L + 1] * h_ii(i, j));
    coeffs.b_from_sums = b_sum;

    // phi-crossing partials: only the [SI] rows of the last two equations.
    coeffs.d_from_sums = coeffs.v[L] * coeffs.w[L] * (ratio - 1.0) +
                         coeffs.v[L + 1] * coeffs.w[L] * 2.0;

    const double b_scale = std::max(std::abs(coeffs.b), 1e-300);
    const double d_scale = std::max(std::abs(coeffs.d), 1e-300);
    if (std::abs(coeffs.b - coeffs.b_from_sums) > 1e-9 * b_scale ||
        std::abs(coeffs.d - coeffs.d_from_sums) > 1e-9 * d_scale)
        throw Error("bifurcation coefficients: closed form and sum-based routes disagree");
    return coeffs;
}

Matrix numeric_jacobian(const OdeRhs& rhs, std::span<const double> y, double h_rel,
                        double step_floor) {
    const std::size_t n = y.size();
    Matrix j(n, n);
    std::vector<double> yp(y.begin(), y.end()), ym(y.begin(), y.end());
    std::vector<double> fp(n), fm(n);
    for (std::size_t col = 0; col < n; ++col) {
        const double h = h_rel * std::max(std::abs(y[col]), step_floor);
        yp[col] = y[col] + h;
        ym[col] = y[col] - h;
        rhs(0.0, yp, fp);
        rhs(0.0, ym, fm);
        for (std::size_t row = 0; row < n; ++row) j(row, col) = (fp[row] - fm[row]) / (2.0 * h);
        yp[col] = y[col];
        ym[col] = y[col];
    }
    return j;
}

StabilityVerdict classify(double leading_re, double gamma, double tol_scale) {
    const double tol = tol_scale * gamma;
    if (std::abs(leading_re) < tol) return StabilityVerdict::Marginal;
    return leading_re < 0.0 ? StabilityVerdict::Stable : StabilityVerdict::Unstable;
}

std::vector<SweepRow> bifurcation_sweep(const DegreeDistribution& dist, double gamma,
                                        std::span<const double> tau_grid, bool allow_virtual) {
    const std::size_t L = dist.num_classes();
    const double step_floor = 1e-6 * static_cast<double>(dist.node_count());

    std::vector<double> dfe_state(L + 2, 0.0);
    for (std::size_t l = 0; l < L; ++l) dfe_state[l] = dist.class_count(l);

    std::vector<SweepRow> rows;
    rows.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        const EpidemicParams params{tau, gamma};
        validate(params);
        const OdeRhs rhs = [&params, &dist](double, std::span<const double> y, std::span<double> dydt) {
            rhs_reduced_into(y, dydt, params, dist);
        };

        SweepRow row;
        row.tau = tau;
        row.dfe_lead_re =
            leading_eigenvalue(numeric_jacobian(rhs, dfe_state, 1e-6, step_floor)).real();

        try {
            const EquilibriumReport report = endemic_equilibrium(params, dist, allow_virtual);
            double sum_I = 0.0;
            for (double i_l : report.coordinates.I) sum_I += i_l;
            row.endemic_sum_I = sum_I;
            const std::vector<double> reduced = pack(reduce(report.coordinates));
            row.endemic_lead_re =
                leading_eigenvalue(numeric_jacobian(rhs, reduced, 1e-6, step_floor)).real();
        } catch (const BelowThreshold&) {
            // subcritical: endemic columns stay empty
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.tau < b.tau; });
    return rows;
}

}  // namespace cpsis
