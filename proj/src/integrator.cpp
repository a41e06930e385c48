#include "cpsis/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpsis/errors.hpp"

namespace cpsis {

IntegrationConfig IntegrationConfig::for_model(const DegreeDistribution& dist, const EpidemicParams& params,
                                               double t_max, double rel_tol) {
    IntegrationConfig cfg;
    cfg.rel_tol = rel_tol;
    cfg.t_max = t_max;
    const double N = static_cast<double>(dist.node_count());
    // abs_tol tracks rel_tol so tightening one tightens both; at the default
    // rel_tol = 1e-8 this is the usual 1e-8 N. Note the RHS norm at a tracked
    // equilibrium bottoms out near the tolerance scale, so equilibrium
    // detection needs tolerances below equilibrium_tol / (N max(tau, gamma)).
    cfg.abs_tol = rel_tol * N;
    cfg.equilibrium_tol = 1e-9 * N * std::max(params.tau, params.gamma);
    return cfg;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// PI step-size controller constants (Hairer's DOPRI5 defaults).
constexpr double kBeta = 0.04;
constexpr double kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kSafe = 0.9;
constexpr double kMaxShrink = 5.0;  // h may shrink by at most this factor
constexpr double kMaxGrow = 10.0;   // and grow by at most this factor

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

class Dopri5 {
public:
    Dopri5(const OdeRhs& rhs, std::span<const double> y0, const IntegrationConfig& cfg)
        : rhs_(rhs), cfg_(cfg), n_(y0.size()), y_(y0.begin(), y0.end()) {
        if (!(cfg.rel_tol >= 1e-14) || !(cfg.abs_tol > 0.0) || !(cfg.t_max > 0.0) ||
            cfg.max_steps <= 0 || !(cfg.equilibrium_tol > 0.0))
            throw InvalidParameter("integration config entries must be positive (rel_tol >= 1e-14)");
        k1_.resize(n_);
        k2_.resize(n_);
        k3_.resize(n_);
        k4_.resize(n_);
        k5_.resize(n_);
        k6_.resize(n_);
        k7_.resize(n_);
        ytmp_.resize(n_);
        ynew_.resize(n_);
    }

    Trajectory run(bool stop_on_equilibrium) {
        Trajectory traj;
        double t = 0.0;
        rhs_(t, y_, k1_);
        traj.times.push_back(t);
        traj.states.push_back(y_);
        double rhs_norm = max_abs(k1_);
        if (rhs_norm < cfg_.equilibrium_tol && stop_on_equilibrium) {
            traj.converged = true;
            traj.terminal_rhs_norm = rhs_norm;
            return traj;
        }

        std::size_t next_sample = 0;
        while (next_sample < cfg_.sample_times.size() && cfg_.sample_times[next_sample] <= 0.0)
            ++next_sample;

        double h = initial_step(next_sample);
        double facold = 1e-4;
        long long steps = 0;
        const double t_end = cfg_.t_max;

        while (t < t_end) {
            if (++steps > cfg_.max_steps) throw StepCapExceeded(cfg_.max_steps);
            if (!(h > 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)))
                throw StepSizeUnderflow{};

            double target = t_end;
            bool target_is_sample = false;
            if (next_sample < cfg_.sample_times.size() && cfg_.sample_times[next_sample] < target) {
                target = cfg_.sample_times[next_sample];
                target_is_sample = true;
            }
            bool hit_target = false;
            if (t + 1.01 * h >= target) {
                h = target - t;
                hit_target = true;
            }

            const double err = attempt_step(t, h);
            const double fac11 = std::pow(err, kExpo1);
            if (err <= 1.0) {
                // Accept: FSAL reuses the last stage as the next first stage.
                t = hit_target ? target : t + h;
                y_.swap(ynew_);
                k1_.swap(k7_);
                if (hit_target && target_is_sample) ++next_sample;
                traj.times.push_back(t);
                traj.states.push_back(y_);

                rhs_norm = max_abs(k1_);
                if (stop_on_equilibrium && rhs_norm < cfg_.equilibrium_tol) {
                    traj.converged = true;
                    traj.terminal_rhs_norm = rhs_norm;
                    return traj;
                }

                double fac = fac11 / std::pow(facold, kBeta);
                fac = std::max(1.0 / kMaxGrow, std::min(kMaxShrink, fac / kSafe));
                h = h / fac;
                facold = std::max(err, 1e-4);
            } else {
                h = h / std::min(kMaxShrink, fac11 / kSafe);
            }
        }

        traj.terminal_rhs_norm = rhs_norm;
        traj.converged = rhs_norm < cfg_.equilibrium_tol;
        return traj;
    }

private:
    // Scaled RMS norm used by both the error test and the initial step guess.
    double scaled_norm(std::span<const double> v, std::span<const double> scale_ref) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(scale_ref[i]);
            const double q = v[i] / sk;
            sum += q * q;
        }
        return std::sqrt(sum / static_cast<double>(n_));
    }

    double initial_step(std::size_t next_sample) const {
        const double d0 = scaled_norm(y_, y_);
        const double d1 = scaled_norm(k1_, y_);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, cfg_.t_max);

        std::vector<double> y1(n_), f1(n_);
        for (std::size_t i = 0; i < n_; ++i) y1[i] = y_[i] + h0 * k1_[i];
        rhs_(h0, y1, f1);
        for (std::size_t i = 0; i < n_; ++i) f1[i] -= k1_[i];
        const double d2 = scaled_norm(f1, y_) / h0;

        const double d12 = std::max(d1, d2);
        const double h1 = d12 <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / d12, 0.2);
        double h = std::min({100.0 * h0, h1, cfg_.t_max});
        if (next_sample < cfg_.sample_times.size())
            h = std::min(h, cfg_.sample_times[next_sample]);
        return h;
    }

    // One trial step of size h from time t; fills ynew_ and k7_ and returns
    // the scaled error norm.
    double attempt_step(double t, double h) {
        for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y_[i] + h * a21 * k1_[i];
        rhs_(t + c2 * h, ytmp_, k2_);
        for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        rhs_(t + c3 * h, ytmp_, k3_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        rhs_(t + c4 * h, ytmp_, k4_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        rhs_(t + c5 * h, ytmp_, k5_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                                    a65 * k5_[i]);
        rhs_(t + h, ytmp_, k6_);
        for (std::size_t i = 0; i < n_; ++i)
            ynew_[i] = y_[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] +
                                    b6 * k6_[i]);
        rhs_(t + h, ynew_, k7_);

        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                                  e6 * k6_[i] + e7 * k7_[i]);
            const double sk = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
            const double q = e / sk;
            sum += q * q;
        }
        return std::sqrt(sum / static_cast<double>(n_));
    }

    const OdeRhs& rhs_;
    const IntegrationConfig& cfg_;
    std::size_t n_;
    std::vector<double> y_;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_;
    std::vector<double> ytmp_, ynew_;
};

}  // namespace

Trajectory integrate(const OdeRhs& rhs, std::span<const double> y0, const IntegrationConfig& cfg) {
    Dopri5 stepper(rhs, y0, cfg);
    return stepper.run(false);
}

std::pair<std::vector<double>, bool> integrate_to_equilibrium(const OdeRhs& rhs, std::span<const double> y0,
                                                              const IntegrationConfig& cfg) {
    Dopri5 stepper(rhs, y0, cfg);
    Trajectory traj = stepper.run(true);
    return {traj.states.back(), traj.converged};
}

}  // namespace cpsis
