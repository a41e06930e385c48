#include "cpsis/global_cert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cpsis {

namespace {

void check_x(double x) {
    if (!(x > 0.0) || !(x <= 1.0)) throw OutOfDomain("x must lie in (0, 1]");
}

// Precomputed constants for the per-iterate z*(x) evaluation.
struct ZStarEval {
    double a, B, gamma;
    Assumption variant;
    // A1: b(x) = q2 (1 + Bx) with q2 = <n^2>/<n>.
    double q2 = 0.0;
    // A2: b(x) = (p1 + u p2)/(p3 + u p4), u = 1 + a n_1 x.
    double n1 = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0, p4 = 0.0;

    static ZStarEval make(const DegreeDistribution& dist, double gamma, Assumption variant) {
        const AssumptionReport rep = check_assumptions(dist);
        ZStarEval ev;
        ev.a = rep.a;
        ev.B = rep.B;
        ev.gamma = gamma;
        ev.variant = variant;
        if (variant == Assumption::A1) {
            ev.q2 = dist.moments().n2 / dist.moments().n;
        } else {
            if (dist.num_classes() != 2)
                throw VariantNotApplicable("A2 bound requires a bimodal network (L = 2)");
            const double n1 = dist.degree(0), n2 = dist.degree(1);
            const double N1 = dist.class_count(0), N2 = dist.class_count(1);
            ev.n1 = n1;
            ev.p1 = n1 * n1 * N1;
            ev.p2 = n2 * n2 * N2;
            ev.p3 = n1 * N1;
            ev.p4 = n2 * N2;
        }
        return ev;
    }

    double b_of_x(double x) const {
        if (variant == Assumption::A1) return q2 * (1.0 + B * x);
        const double u = 1.0 + a * n1 * x;
        return (p1 + u * p2) / (p3 + u * p4);
    }

    // p_x(z)/gamma = Bx + z (c - 2 - Bx) - c z^2 with c = a (b(x) - 2).
    double p_over_gamma(double x, double z) const {
        const double c = a * (b_of_x(x) - 2.0);
        return B * x + z * (c - 2.0 - B * x) - c * z * z;
    }

    double root_in_unit_interval(double x) const {
        const double bx = B * x;
        const double c = a * (b_of_x(x) - 2.0);
        if (std::abs(c) < 1e-300) return bx / (2.0 + bx);  // quadratic term vanished

        const double qa = -c;
        const double qb = c - 2.0 - bx;
        const double qc = bx;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double big = -0.5 * (qb + std::copysign(sq, qb));
            const double r1 = big / qa;
            const double r2 = big != 0.0 ? qc / big : 0.0;
            // p_x(0) > 0 > p_x(1) puts exactly one root inside (0,1);
            // fall back to bisection if rounding pushed it outside.
            for (double r : {r1, r2})
                if (r > 0.0 && r < 1.0) return r;
            for (double r : {r1, r2})
                if (r > -1e-10 && r < 1.0 + 1e-10) return bisect(x);
        }
        return bisect(x);
    }

    double bisect(double x) const {
        double lo = 0.0, hi = 1.0;
        const double p_lo = p_over_gamma(x, lo);
        const double p_hi = p_over_gamma(x, hi);
        if (!(p_lo > 0.0) || !(p_hi < 0.0))
            throw RootNotBracketed("p_x does not change sign on [0, 1]");
        for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
            const double mid = 0.5 * (lo + hi);
            (p_over_gamma(x, mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

}  // namespace

std::vector<double> s_lower_bound(double x, const DegreeDistribution& dist) {
    check_x(x);
    const double a = check_assumptions(dist).a;
    std::vector<double> bounds(dist.num_classes());
    for (std::size_t l = 0; l < bounds.size(); ++l)
        bounds[l] = dist.class_count(l) / (1.0 + a * dist.degree(l) * x);
    return bounds;
}

double jensen_bound(double x, const DegreeDistribution& dist) {
    check_x(x);
    return 1.0 + check_assumptions(dist).B * x;
}

double susceptible_stub_lower_sum(double x, const DegreeDistribution& dist) {
    check_x(x);
    const double a = check_assumptions(dist).a;
    double sum = 0.0;
    for (std::size_t l = 0; l < dist.num_classes(); ++l)
        sum += dist.degree(l) * dist.class_count(l) / (1.0 + a * dist.degree(l) * x);
    return sum;
}

double d_over_ss_bound(double x, const DegreeDistribution& dist, Assumption variant) {
    check_x(x);
    return ZStarEval::make(dist, 1.0, variant).b_of_x(x);
}

double z_star(double x, const DegreeDistribution& dist, double gamma, Assumption variant) {
    check_x(x);
    if (!(gamma > 0.0)) throw InvalidParameter("recovery rate gamma must be positive");
    return ZStarEval::make(dist, gamma, variant).root_in_unit_interval(x);
}

StabilityCertificate iterate_certificate(const DegreeDistribution& dist, double gamma, double tau,
                                         double target_eps, long long max_iter) {
    validate(EpidemicParams{tau, gamma});
    if (!(target_eps > 0.0) || max_iter <= 0)
        throw InvalidParameter("target_eps and max_iter must be positive");

    StabilityCertificate cert;
    cert.tau = tau;
    cert.gamma = gamma;

    const AssumptionReport rep = check_assumptions(dist);
    if (!(tau < gamma * rep.a)) return cert;  // supercritical: nothing to certify
    if (rep.a1_holds)
        cert.assumption_used = Assumption::A1;
    else if (rep.a2_holds)
        cert.assumption_used = Assumption::A2;
    else
        return cert;  // neither assumption holds

    const ZStarEval eval = ZStarEval::make(dist, gamma, *cert.assumption_used);

    double x = 1.0;
    long long stride = 1;
    long long at_current_stride = 0;
    double last_x = 1.0, last_z = 0.0;
    bool last_recorded = false;

    while (true) {
        if (x < target_eps) {
            cert.verdict = CertificateVerdict::Certified;
            break;
        }
        if (cert.iterations >= max_iter) {
            cert.verdict = CertificateVerdict::IterationCapReached;
            break;
        }
        const double z = eval.root_in_unit_interval(x);
        last_x = x;
        last_z = z;
        last_recorded = false;
        if (cert.iterations % stride == 0) {
            cert.sequence.emplace_back(x, z);
            last_recorded = true;
            if (++at_current_stride == 2048) {
                stride *= 2;
                at_current_stride = 0;
            }
        }
        const double next = 0.5 * (x + z);
        if (!(next < x)) {  // z*(x) >= x: contraction lost (cannot happen under A1/A2)
            cert.verdict = CertificateVerdict::IterationCapReached;
            break;
        }
        x = next;
        ++cert.iterations;
    }
    if (!last_recorded && cert.iterations > 0) cert.sequence.emplace_back(last_x, last_z);
    cert.final_x = x;
    return cert;
}

BoundChainReport verify_bound_chain(const Trajectory& theta_trajectory,
                                    const StabilityCertificate& certificate,
                                    const DegreeDistribution& dist, const EpidemicParams& params) {
    BoundChainReport report;
    report.levels_total = certificate.sequence.size();
    if (!certificate.assumption_used.has_value() ||
        certificate.verdict == CertificateVerdict::NotApplicable ||
        !(params.tau < tau_c(dist, params.gamma))) {
        report.refused = true;
        return report;
    }

    const std::size_t L = dist.num_classes();
    const std::size_t points = theta_trajectory.times.size();
    const AssumptionReport rep = check_assumptions(dist);
    const ZStarEval eval = ZStarEval::make(dist, params.gamma, *certificate.assumption_used);
    const double nN = dist.moments().stub_count;

    for (std::size_t level = 0; level < certificate.sequence.size(); ++level) {
        const double x_n = certificate.sequence[level].first;

        // T_n: last sampled time with theta above this level.
        std::size_t start = 0;
        for (std::size_t k = points; k-- > 0;) {
            if (theta_trajectory.states[k][L] > x_n) {
                start = k + 1;
                break;
            }
        }
        if (start >= points) break;  // level never entered within the horizon

        const std::vector<double> s_bounds = s_lower_bound(x_n, dist);
        const double jensen = 1.0 + rep.B * x_n;
        const double ratio_bound = eval.b_of_x(x_n);

        // A theta bound forces the S_l bound only after a transient: the
        // comparison solution y' = gamma N_l - y (gamma + tau n_l x) crosses
        // the bound at a computable time; start each class's check there.
        const double t_entry = theta_trajectory.times[start];
        std::vector<double> check_from(L, t_entry);
        for (std::size_t l = 0; l < L; ++l) {
            const double rate = params.gamma + params.tau * dist.degree(l) * x_n;
            const double limit = params.gamma * dist.class_count(l) / rate;
            const double y0 = theta_trajectory.states[start][l];
            if (y0 >= s_bounds[l]) continue;
            if (!(limit > s_bounds[l])) {  // cannot happen for tau < gamma a
                check_from[l] = std::numeric_limits<double>::infinity();
                continue;
            }
            check_from[l] = t_entry + std::log((limit - y0) / (limit - s_bounds[l])) / rate;
        }
        // The Jensen and D/S_s bounds are consequences of all L class bounds.
        const double aggregates_from = *std::max_element(check_from.begin(), check_from.end());

        ++report.levels_verified;
        report.entry_times.push_back(t_entry);

        for (std::size_t k = start; k < points; ++k) {
            const auto& y = theta_trajectory.states[k];
            const double t = theta_trajectory.times[k];
            for (std::size_t l = 0; l < L; ++l) {
                const double slack = 1e-9 * dist.class_count(l);
                if (t > check_from[l] && y[l] + slack < s_bounds[l])
                    report.violations.push_back({level, t, "s_lower", l, y[l], s_bounds[l]});
            }
            if (t > aggregates_from) {
                double S_s = 0.0, D = 0.0;
                for (std::size_t l = 0; l < L; ++l) {
                    const double n_l = dist.degree(l);
                    S_s += n_l * y[l];
                    D += n_l * n_l * y[l];
                }
                if (nN / S_s > jensen * (1.0 + 1e-9))
                    report.violations.push_back({level, t, "jensen", 0, nN / S_s, jensen});
                if (D / S_s > ratio_bound * (1.0 + 1e-9))
                    report.violations.push_back({level, t, "d_over_ss", 0, D / S_s, ratio_bound});
            }
            ++report.checked_points;
        }
    }
    return report;
}

}  // namespace cpsis
