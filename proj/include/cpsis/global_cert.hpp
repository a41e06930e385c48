#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpsis/cp_system.hpp"
#include "cpsis/integrator.hpp"

namespace cpsis {

/// Which D/S_s upper bound backs the certificate: the Jensen-based bound
/// (valid under (2+sqrt(2))<n> <= <n^2>) or the bimodal closed form (L = 2).
enum class Assumption { A1, A2 };

/// Per-class lower bound N_l / (1 + a n_l x) implied by theta <= x, x in (0,1].
std::vector<double> s_lower_bound(double x, const DegreeDistribution& dist);

/// Jensen bound: nN / S_s <= 1 + B x once the S_l lower bounds hold.
double jensen_bound(double x, const DegreeDistribution& dist);

/// The sharper sum it majorizes: g(x) = sum_l n_l N_l / (1 + a n_l x) < S_s.
double susceptible_stub_lower_sum(double x, const DegreeDistribution& dist);

/// Upper bound on D/S_s for the chosen variant.
double d_over_ss_bound(double x, const DegreeDistribution& dist, Assumption variant);

/// Unique root in (0,1) of p_x(z) = gamma(1+Bx)(1-z) - gamma(1+z) + gamma a (b(x)-2) z (1-z).
double z_star(double x, const DegreeDistribution& dist, double gamma, Assumption variant);

enum class CertificateVerdict { Certified, NotApplicable, IterationCapReached };

struct StabilityCertificate {
    std::optional<Assumption> assumption_used;
    double tau = 0.0;
    double gamma = 0.0;
    /// Recorded (x_n, z*(x_n)) pairs. Long runs are thinned: the recording
    /// stride doubles after every 2048 stored entries; the last computed
    /// pair is always stored. iterations and final_x are exact.
    std::vector<std::pair<double, double>> sequence;
    long long iterations = 0;
    double final_x = 1.0;
    CertificateVerdict verdict = CertificateVerdict::NotApplicable;
};

/// Monotone iteration x_0 = 1, x_{n+1} = (x_n + z*(x_n))/2, stopping below
/// target_eps (Certified) or at max_iter (IterationCapReached). Requires
/// tau < tau_c and one of the two assumptions, else NotApplicable.
StabilityCertificate iterate_certificate(const DegreeDistribution& dist, double gamma, double tau,
                                         double target_eps = 1e-6, long long max_iter = 10000);

struct BoundViolation {
    std::size_t level;  // index into the recorded sequence
    double time;
    std::string kind;   // "s_lower" | "jensen" | "d_over_ss"
    std::size_t class_index;
    double observed;
    double bound;
};

struct BoundChainReport {
    bool refused = false;  // certificate not applicable or run supercritical
    std::size_t levels_total = 0;
    std::size_t levels_verified = 0;      // levels whose entry time lies inside the trajectory
    std::vector<double> entry_times;      // first checked time per verified level
    long long checked_points = 0;
    std::vector<BoundViolation> violations;
};

/// Empirical check of the bound chain along a theta-form trajectory: per
/// recorded level n, locates the last sampled time with theta > x_n and
/// verifies the S_l, Jensen and D/S_s bounds at all later samples.
BoundChainReport verify_bound_chain(const Trajectory& theta_trajectory,
                                    const StabilityCertificate& certificate,
                                    const DegreeDistribution& dist, const EpidemicParams& params);

}  // namespace cpsis
