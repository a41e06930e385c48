#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cpsis {

/// Effective configuration for one CLI command. File and flag forms carry
/// the same keys; flags override the file.
struct RunConfig {
    std::vector<std::pair<long long, long long>> degrees;
    double gamma = 1.0;
    double tau = 1.0;
    std::vector<double> initial_infected;  // empty: seed 10% of each class (at least one node)
    double t_max = 50.0;
    double rel_tol = 1e-8;
    std::optional<double> abs_tol;  // default: 1e-8 N

    // sweep
    double tau_min = 0.0;
    double tau_max = 0.0;
    int steps = 0;

    // certify
    double eps = 1e-6;
    long long max_iter = 10000;
    bool verify = false;

    // equilibrium / sweep
    bool allow_virtual = false;
};

RunConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const RunConfig& config);

/// `degree:count` tokens, e.g. "2:850,3:100,4:50".
std::vector<std::pair<long long, long long>> parse_degree_tokens(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);

// Command entry points. Each returns the process exit code:
// 0 ok, 2 validation error, 3 integration failure, 4 equilibrium not applicable.
int run_moments(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_simulate(const RunConfig& config, std::ostream& csv, std::ostream& summary, std::ostream& err);
int run_equilibrium(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_sweep(const RunConfig& config, std::ostream& csv, std::ostream& err);
int run_certify(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace cpsis
