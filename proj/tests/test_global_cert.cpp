#include <cmath>
#include <random>

#include <doctest.h>

#include "cpsis/equilibria.hpp"
#include "cpsis/global_cert.hpp"
#include "cpsis/integrator.hpp"
#include "test_util.hpp"

using namespace cpsis;

namespace {

OdeRhs theta_rhs(const EpidemicParams& params, const DegreeDistribution& dist) {
    return [&params, &dist](double, std::span<const double> y, std::span<double> dydt) {
        rhs_theta_into(y, dydt, params, dist);
    };
}

// Literal form of the bounding polynomial, used as an oracle against the
// solved root.
double p_x(double x, double z, double gamma, double a, double B, double b) {
    return gamma * (1.0 + B * x) * (1.0 - z) - gamma * (1.0 + z) +
           gamma * a * (b - 2.0) * z * (1.0 - z);
}

Trajectory subcritical_theta_run(const DegreeDistribution& dist, const EpidemicParams& params,
                                 const std::vector<double>& seed, double t_max) {
    IntegrationConfig cfg = IntegrationConfig::for_model(dist, params, t_max);
    return integrate(theta_rhs(params, dist), pack(theta_projection(initial_condition(dist, seed), dist)),
                     cfg);
}

}  // namespace

TEST_CASE("per-class susceptible lower bounds") {
    const auto dist = testutil::trimodal();
    SUBCASE("x -> 0 recovers the class sizes") {
        const auto bounds = s_lower_bound(1e-12, dist);
        CHECK(bounds[0] == doctest::Approx(850.0).epsilon(1e-8));
        CHECK(bounds[1] == doctest::Approx(100.0).epsilon(1e-8));
        CHECK(bounds[2] == doctest::Approx(50.0).epsilon(1e-8));
    }
    SUBCASE("x = 1 by hand: a = 22/29, bound_1 = 850/(1 + 2a) = 24650/73") {
        const auto bounds = s_lower_bound(1.0, dist);
        CHECK(bounds[0] == doctest::Approx(24650.0 / 73.0).epsilon(1e-13));
        CHECK(bounds[1] == doctest::Approx(2900.0 / 95.0).epsilon(1e-13));
        CHECK(bounds[2] == doctest::Approx(1450.0 / 117.0).epsilon(1e-13));
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(s_lower_bound(0.0, dist), OutOfDomain);
        CHECK_THROWS_AS(s_lower_bound(1.5, dist), OutOfDomain);
    }
    SUBCASE("holds along a subcritical trajectory once theta stays below x") {
        const EpidemicParams params{0.5, 1.0};
        const Trajectory traj =
            subcritical_theta_run(dist, params, std::vector<double>{90, 50, 10}, 50.0);
        const double x = 0.05;
        const std::size_t L = dist.num_classes();
        std::size_t start = 0;
        for (std::size_t k = traj.times.size(); k-- > 0;) {
            if (traj.states[k][L] > x) {
                start = k + 1;
                break;
            }
        }
        REQUIRE(start < traj.times.size());
        const auto bounds = s_lower_bound(x, dist);
        for (std::size_t k = start; k < traj.times.size(); ++k)
            for (std::size_t l = 0; l < L; ++l) CHECK(traj.states[k][l] > bounds[l]);
    }
}

TEST_CASE("Jensen bound") {
    SUBCASE("trimodal at x = 0.5: 1 + B/2 = 109/58") {
        CHECK(jensen_bound(0.5, testutil::trimodal()) ==
              doctest::Approx(109.0 / 58.0).epsilon(1e-14));
        CHECK(jensen_bound(0.5, testutil::trimodal()) == doctest::Approx(1.8793).epsilon(1e-4));
    }
    SUBCASE("regular networks attain equality") {
        const auto reg = testutil::regular4();
        for (double x : {0.1, 0.4, 0.9, 1.0}) {
            const double g = susceptible_stub_lower_sum(x, reg);
            CHECK(reg.moments().stub_count / g ==
                  doctest::Approx(jensen_bound(x, reg)).epsilon(1e-12));
        }
    }
    SUBCASE("inequality nN/g(x) <= 1 + Bx over random distributions") {
        std::mt19937 rng(53);
        std::uniform_real_distribution<double> xs(1e-6, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            const auto dist = testutil::random_distribution(rng);
            const double x = xs(rng);
            const double lhs = dist.moments().stub_count / susceptible_stub_lower_sum(x, dist);
            CHECK(lhs <= jensen_bound(x, dist) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("D over S_s bounds") {
    SUBCASE("both variants reduce to <n^2>/n as x -> 0") {
        const auto tri = testutil::trimodal();
        const auto bi = testutil::bimodal();
        CHECK(d_over_ss_bound(1e-12, tri, Assumption::A1) ==
              doctest::Approx(5.1 / 2.2).epsilon(1e-8));
        CHECK(d_over_ss_bound(1e-12, bi, Assumption::A1) ==
              doctest::Approx(10.0 / 3.0).epsilon(1e-8));
        CHECK(d_over_ss_bound(1e-12, bi, Assumption::A2) ==
              doctest::Approx(10.0 / 3.0).epsilon(1e-8));
    }
    SUBCASE("bimodal x = 1 by hand: a = 3/7, bound = 118/33") {
        CHECK(d_over_ss_bound(1.0, testutil::bimodal(), Assumption::A2) ==
              doctest::Approx(118.0 / 33.0).epsilon(1e-13));
    }
    SUBCASE("A2 variant refuses non-bimodal networks") {
        CHECK_THROWS_AS(d_over_ss_bound(0.5, testutil::trimodal(), Assumption::A2),
                        VariantNotApplicable);
    }
    SUBCASE("holds along a subcritical bimodal trajectory") {
        const auto dist = testutil::bimodal();
        const EpidemicParams params{0.9 * tau_c(dist, 1.0), 1.0};
        const Trajectory traj =
            subcritical_theta_run(dist, params, std::vector<double>{50, 50}, 50.0);
        const std::size_t L = dist.num_classes();
        for (double x : {0.2, 0.05}) {
            std::size_t start = 0;
            for (std::size_t k = traj.times.size(); k-- > 0;) {
                if (traj.states[k][L] > x) {
                    start = k + 1;
                    break;
                }
            }
            REQUIRE(start < traj.times.size());
            const double bound = d_over_ss_bound(x, dist, Assumption::A2);
            for (std::size_t k = start; k < traj.times.size(); ++k) {
                double S_s = 0.0, D = 0.0;
                for (std::size_t l = 0; l < L; ++l) {
                    S_s += dist.degree(l) * traj.states[k][l];
                    D += dist.degree(l) * dist.degree(l) * traj.states[k][l];
                }
                CHECK(D / S_s <= bound * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("z_star") {
    const auto reg = testutil::regular4();
    const auto bi = testutil::bimodal();
    const double gamma = 1.0;

    SUBCASE("sign structure of p_x at the interval ends") {
        const auto rep = check_assumptions(reg);
        for (double x : {0.01, 0.3, 1.0}) {
            const double b = d_over_ss_bound(x, reg, Assumption::A1);
            CHECK(p_x(x, 0.0, gamma, rep.a, rep.B, b) == doctest::Approx(gamma * rep.B * x));
            CHECK(p_x(x, 1.0, gamma, rep.a, rep.B, b) == doctest::Approx(-2.0 * gamma));
        }
    }
    SUBCASE("root residual against the literal polynomial") {
        std::mt19937 rng(59);
        std::uniform_real_distribution<double> xs(1e-6, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const double x = xs(rng);
            const auto rep = check_assumptions(reg);
            const double z = z_star(x, reg, gamma, Assumption::A1);
            CHECK(z > 0.0);
            CHECK(z < 1.0);
            const double b = d_over_ss_bound(x, reg, Assumption::A1);
            CHECK(std::abs(p_x(x, z, gamma, rep.a, rep.B, b)) < 1e-12 * gamma * 10.0);
        }
    }
    SUBCASE("contraction z*(x) < x under A1 and A2") {
        std::mt19937 rng(61);
        std::uniform_real_distribution<double> xs(1e-6, 1.0);
        for (int trial = 0; trial < 1000; ++trial) {
            const double x = xs(rng);
            CHECK(z_star(x, reg, gamma, Assumption::A1) < x);
            CHECK(z_star(x, bi, gamma, Assumption::A2) < x);
        }
    }
}

TEST_CASE("certificate iteration") {
    SUBCASE("regular degree-4 network is certified under A1") {
        const auto reg = testutil::regular4();
        const auto cert = iterate_certificate(reg, 1.0, 0.3, 1e-6, 30000000);
        CHECK(cert.verdict == CertificateVerdict::Certified);
        REQUIRE(cert.assumption_used.has_value());
        CHECK(*cert.assumption_used == Assumption::A1);
        CHECK(cert.final_x < 1e-6);
        CHECK(cert.sequence.front().first == 1.0);  // x_0 = 1
        for (std::size_t i = 1; i < cert.sequence.size(); ++i)
            CHECK(cert.sequence[i].first < cert.sequence[i - 1].first);
        for (const auto& [x, z] : cert.sequence) CHECK(z < x);
    }
    SUBCASE("bimodal network is certified under A2") {
        const auto bi = testutil::bimodal();
        const auto cert = iterate_certificate(bi, 1.0, 0.3, 1e-6, 30000000);
        CHECK(cert.verdict == CertificateVerdict::Certified);
        REQUIRE(cert.assumption_used.has_value());
        CHECK(*cert.assumption_used == Assumption::A2);
        CHECK(cert.final_x < 1e-6);
    }
    SUBCASE("benchmark trimodal satisfies neither assumption") {
        const auto cert = iterate_certificate(testutil::trimodal(), 1.0, 0.5);
        CHECK(cert.verdict == CertificateVerdict::NotApplicable);
        CHECK_FALSE(cert.assumption_used.has_value());
        CHECK(cert.iterations == 0);
    }
    SUBCASE("supercritical tau is not certifiable") {
        const auto cert = iterate_certificate(testutil::regular4(), 1.0, 0.5);
        CHECK(cert.verdict == CertificateVerdict::NotApplicable);
    }
    SUBCASE("iteration cap verdict") {
        const auto cert = iterate_certificate(testutil::regular4(), 1.0, 0.3, 1e-6, 10);
        CHECK(cert.verdict == CertificateVerdict::IterationCapReached);
        CHECK(cert.iterations == 10);
        CHECK(cert.final_x > 1e-6);
        CHECK(cert.sequence.size() == 10);
    }
}

TEST_CASE("the map F(x) = (x + z*(x))/2 contracts towards zero") {
    const auto reg = testutil::regular4();
    for (int i = 1; i <= 500; ++i) {
        const double x = i / 500.0;
        const double F = 0.5 * (x + z_star(x, reg, 1.0, Assumption::A1));
        CHECK(F < x);
        CHECK(F > 0.0);
        CHECK(F <= 1.0);
    }
    // the iteration itself is strictly decreasing from x_0 = 1
    double x = 1.0;
    for (int n = 0; n < 100; ++n) {
        const double next = 0.5 * (x + z_star(x, reg, 1.0, Assumption::A1));
        CHECK(next < x);
        x = next;
    }
}

TEST_CASE("sign machinery of p_x(x) as a cubic in x (A1 route)") {
    // q(x) := p_x(x) has q(0) = 0, q'(0) = 0, sign(q''(0)) decided by A1,
    // and q'''(0) = -6 gamma <n^2>/(<n^2> - n)^2.
    const double gamma = 1.0;
    auto q = [&](const DegreeDistribution& dist, double x) {
        const auto rep = check_assumptions(dist);
        const Moments& m = dist.moments();
        const double b = (m.n2 / m.n) * (1.0 + rep.B * x);  // A1 form, any sign of x
        return p_x(x, x, gamma, rep.a, rep.B, b);
    };
    auto check_dist = [&](const DegreeDistribution& dist, bool a1_expected) {
        const Moments& m = dist.moments();
        CHECK(check_assumptions(dist).a1_holds == a1_expected);
        const double h = 1e-3;
        CHECK(std::abs(q(dist, 0.0)) < 1e-14);
        // q'(0) via a high-order central difference: O(h^4) truncation
        const double d1 = (8.0 * (q(dist, h) - q(dist, -h)) - (q(dist, 2 * h) - q(dist, -2 * h))) /
                          (12.0 * h);
        CHECK(std::abs(d1) < 1e-8);
        const double d2 = (q(dist, h) - 2.0 * q(dist, 0.0) + q(dist, -h)) / (h * h);
        const double d2_analytic = -2.0 * gamma *
                                   (m.n2 * m.n2 - 4.0 * m.n2 * m.n + 2.0 * m.n * m.n) /
                                   ((m.n2 - m.n) * (m.n2 - m.n));
        CHECK(d2 == doctest::Approx(d2_analytic).epsilon(1e-4));
        CHECK((d2_analytic <= 0.0) == a1_expected);
        // cubic coefficient of q is -B^2, so q'''(0) = -6 gamma <n^2>^2/(<n^2> - n)^2
        // (expanding q with B = a <n^2>/n; always negative)
        const double d3 = (q(dist, 2 * h) - 2.0 * q(dist, h) + 2.0 * q(dist, -h) -
                           q(dist, -2 * h)) /
                          (2.0 * h * h * h);
        const double d3_analytic =
            -6.0 * gamma * m.n2 * m.n2 / ((m.n2 - m.n) * (m.n2 - m.n));
        CHECK(d3 == doctest::Approx(d3_analytic).epsilon(1e-4));
        CHECK(d3_analytic < 0.0);
        CHECK(d3 < 0.0);
    };
    check_dist(testutil::regular4(), true);    // A1 holds
    check_dist(testutil::trimodal(), false);   // A1 violated: q''(0) > 0
}

TEST_CASE("sign machinery of the bimodal cubic r and the V identity") {
    const double gamma = 1.0;
    auto r_of = [&](const DegreeDistribution& dist, double x) {
        const auto rep = check_assumptions(dist);
        const double n1 = dist.degree(0), n2 = dist.degree(1);
        const double N1 = dist.class_count(0), N2 = dist.class_count(1);
        const double u = n1 * N1 + (1.0 + rep.a * n1 * x) * n2 * N2;
        const double b = (n1 * n1 * N1 + (1.0 + rep.a * n1 * x) * n2 * n2 * N2) / u;
        return p_x(x, x, gamma, rep.a, rep.B, b) * u;
    };
    auto v_direct = [](const DegreeDistribution& dist) {
        const double n1 = dist.degree(0), n2 = dist.degree(1);
        const double N1 = dist.class_count(0), N2 = dist.class_count(1);
        return 2.0 * n1 * n1 * N1 * N1 * (n1 - 1.0) * (n1 - 1.0) +
               2.0 * n2 * n2 * N2 * N2 * (n2 - 1.0) * (n2 - 1.0) +
               N1 * N2 * n1 * n2 * (n1 - 2.0) * (n1 - 2.0) +
               N1 * N2 * n1 * n2 * n2 * (3.0 * n1 - 4.0);
    };
    auto v_from_moments = [](const DegreeDistribution& dist) {
        const Moments& m = dist.moments();
        const double N = static_cast<double>(dist.node_count());
        const double n2deg = dist.degree(1);
        const double N2 = dist.class_count(1);
        const double n1deg = dist.degree(0);
        return 2.0 * N * N * (m.n2 - m.n) * (m.n2 - m.n) +
               N * (m.n2 - m.n * n2deg) * N2 * n1deg * n2deg;
    };

    std::mt19937 rng(67);
    std::uniform_int_distribution<long long> deg(2, 15), cnt(1, 5000);
    int checked_regimes = 0;
    for (int trial = 0; trial < 200; ++trial) {
        long long n1 = deg(rng), n2 = deg(rng);
        if (n1 == n2) continue;
        if (n1 > n2) std::swap(n1, n2);
        const auto dist = build_distribution({{n1, cnt(rng)}, {n2, cnt(rng)}});
        // the closed form V matches the moment expression for every bimodal network
        CHECK(v_direct(dist) == doctest::Approx(v_from_moments(dist)).epsilon(1e-12));
        // and is nonnegative when n2 > n1 >= 2
        CHECK(v_direct(dist) >= 0.0);
        ++checked_regimes;
    }
    CHECK(checked_regimes > 50);

    // n1 = 1 regime with the connectivity constraint n2 N2 >= N1
    std::uniform_int_distribution<long long> deg2(2, 15);
    for (int trial = 0; trial < 100; ++trial) {
        const long long n2 = deg2(rng);
        const long long N2 = cnt(rng);
        std::uniform_int_distribution<long long> leaf_count(1, std::max<long long>(1, n2 * N2));
        const long long N1 = leaf_count(rng);
        const auto dist = build_distribution({{1, N1}, {n2, N2}});
        CHECK(v_direct(dist) == doctest::Approx(v_from_moments(dist)).epsilon(1e-12));
        CHECK(v_direct(dist) >= 0.0);

        // FD derivative signs of the cubic r at 0
        const double h = 1e-3;
        CHECK(std::abs(r_of(dist, 0.0)) < 1e-9 * dist.moments().stub_count);
        const double d2 = (r_of(dist, h) - 2.0 * r_of(dist, 0.0) + r_of(dist, -h)) / (h * h);
        CHECK(d2 <= 1e-6 * dist.moments().stub_count);
        const double d3 = (r_of(dist, 2 * h) - 2.0 * r_of(dist, h) + 2.0 * r_of(dist, -h) -
                           r_of(dist, -2 * h)) /
                          (2.0 * h * h * h);
        CHECK(d3 < 0.0);
    }
}

TEST_CASE("comparison principle sanity: S_l dominates the scalar bound solution") {
    const auto reg = testutil::regular4();
    const EpidemicParams params{0.3, 1.0};
    const Trajectory traj = subcritical_theta_run(reg, params, std::vector<double>{100}, 40.0);
    const std::size_t L = reg.num_classes();

    // x = running bound on theta over the whole run
    double x = 0.0;
    for (const auto& y : traj.states) x = std::max(x, y[L]);

    const double N = reg.class_count(0);
    const double rate = params.gamma + params.tau * reg.degree(0) * x;
    const double limit = params.gamma * N / rate;
    const double y0 = traj.states.front()[0];
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double y_exact = limit + (y0 - limit) * std::exp(-rate * traj.times[k]);
        CHECK(traj.states[k][0] >= y_exact - 1e-6 * N);
    }
}

TEST_CASE("bound chain verification along trajectories") {
    SUBCASE("regular-4 certificate verifies with zero violations") {
        const auto reg = testutil::regular4();
        const EpidemicParams params{0.3, 1.0};
        const auto cert = iterate_certificate(reg, 1.0, params.tau, 1e-6, 30000000);
        REQUIRE(cert.verdict == CertificateVerdict::Certified);
        const Trajectory traj = subcritical_theta_run(reg, params, std::vector<double>{100}, 50.0);
        // theta never exceeds x_0 = 1
        for (const auto& y : traj.states) CHECK(y[reg.num_classes()] <= 1.0 + 1e-12);

        const auto report = verify_bound_chain(traj, cert, reg, params);
        CHECK_FALSE(report.refused);
        CHECK(report.levels_verified > 100);
        CHECK(report.levels_verified <= report.levels_total);
        CHECK(report.violations.empty());
        CHECK(report.checked_points > 0);
    }
    SUBCASE("bimodal certificate verifies with zero violations") {
        const auto bi = testutil::bimodal();
        const EpidemicParams params{0.9 * tau_c(bi, 1.0), 1.0};
        const auto cert = iterate_certificate(bi, 1.0, params.tau, 1e-6, 30000000);
        REQUIRE(cert.verdict == CertificateVerdict::Certified);
        const Trajectory traj = subcritical_theta_run(bi, params, std::vector<double>{50, 50}, 50.0);
        const auto report = verify_bound_chain(traj, cert, bi, params);
        CHECK_FALSE(report.refused);
        CHECK(report.violations.empty());
    }
    SUBCASE("supercritical certificates are refused") {
        const auto reg = testutil::regular4();
        const EpidemicParams params{0.5, 1.0};  // above tau_c = 1/3
        const auto cert = iterate_certificate(reg, 1.0, params.tau);
        const Trajectory traj = subcritical_theta_run(reg, params, std::vector<double>{100}, 5.0);
        const auto report = verify_bound_chain(traj, cert, reg, params);
        CHECK(report.refused);
    }
}
