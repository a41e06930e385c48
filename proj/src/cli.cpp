#include "cpsis/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cpsis/cp_system.hpp"
#include "cpsis/equilibria.hpp"
#include "cpsis/global_cert.hpp"
#include "cpsis/integrator.hpp"
#include "cpsis/stability.hpp"

namespace cpsis {

using nlohmann::json;

namespace {

// 17 significant digits: round-trip exact for doubles.
std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

long long to_ll(const json& j, const char* key) {
    if (!j.is_number_integer())
        throw ValidationError(std::string("config key '") + key + "' must be an integer");
    return j.get<long long>();
}

}  // namespace

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a JSON object");

    RunConfig cfg;
    if (j.contains("degrees")) {
        if (!j["degrees"].is_array()) throw ValidationError("config key 'degrees' must be an array");
        for (const auto& entry : j["degrees"]) {
            if (!entry.is_object() || !entry.contains("degree") || !entry.contains("count"))
                throw ValidationError("each degrees entry must be {degree, count}");
            cfg.degrees.emplace_back(to_ll(entry["degree"], "degree"), to_ll(entry["count"], "count"));
        }
    }
    if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
    if (j.contains("tau")) cfg.tau = j["tau"].get<double>();
    if (j.contains("initial_infected")) cfg.initial_infected = j["initial_infected"].get<std::vector<double>>();
    if (j.contains("t_max")) cfg.t_max = j["t_max"].get<double>();
    if (j.contains("rel_tol")) cfg.rel_tol = j["rel_tol"].get<double>();
    if (j.contains("abs_tol")) cfg.abs_tol = j["abs_tol"].get<double>();
    if (j.contains("tau_min")) cfg.tau_min = j["tau_min"].get<double>();
    if (j.contains("tau_max")) cfg.tau_max = j["tau_max"].get<double>();
    if (j.contains("steps")) cfg.steps = j["steps"].get<int>();
    if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
    if (j.contains("max_iter")) cfg.max_iter = to_ll(j["max_iter"], "max_iter");
    if (j.contains("verify")) cfg.verify = j["verify"].get<bool>();
    if (j.contains("allow_virtual")) cfg.allow_virtual = j["allow_virtual"].get<bool>();
    return cfg;
}

std::string config_to_json_text(const RunConfig& cfg) {
    json j;
    json degrees = json::array();
    for (const auto& [degree, count] : cfg.degrees)
        degrees.push_back({{"degree", degree}, {"count", count}});
    j["degrees"] = degrees;
    j["gamma"] = cfg.gamma;
    j["tau"] = cfg.tau;
    j["initial_infected"] = cfg.initial_infected;
    j["t_max"] = cfg.t_max;
    j["rel_tol"] = cfg.rel_tol;
    if (cfg.abs_tol) j["abs_tol"] = *cfg.abs_tol;
    j["tau_min"] = cfg.tau_min;
    j["tau_max"] = cfg.tau_max;
    j["steps"] = cfg.steps;
    j["eps"] = cfg.eps;
    j["max_iter"] = cfg.max_iter;
    j["verify"] = cfg.verify;
    j["allow_virtual"] = cfg.allow_virtual;
    return j.dump(2) + "\n";
}

std::vector<std::pair<long long, long long>> parse_degree_tokens(const std::string& text) {
    std::vector<std::pair<long long, long long>> pairs;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const auto colon = token.find(':');
        if (colon == std::string::npos)
            throw ValidationError("malformed degrees token '" + token + "', expected degree:count");
        try {
            std::size_t used = 0;
            const long long degree = std::stoll(token.substr(0, colon), &used);
            if (used != colon) throw std::invalid_argument(token);
            const std::string count_text = token.substr(colon + 1);
            const long long count = std::stoll(count_text, &used);
            if (used != count_text.size()) throw std::invalid_argument(token);
            pairs.emplace_back(degree, count);
        } catch (const std::logic_error&) {
            throw ValidationError("malformed degrees token '" + token + "', expected degree:count");
        }
    }
    if (pairs.empty()) throw ValidationError("no degree classes given");
    return pairs;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::logic_error&) {
            throw ValidationError("malformed number '" + token + "'");
        }
    }
    return values;
}

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const IntegrationError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const SusceptibleStubsExhausted& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const BelowThreshold& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

DegreeDistribution dist_from(const RunConfig& cfg) {
    return build_distribution(std::span(cfg.degrees.data(), cfg.degrees.size()));
}

std::vector<double> effective_infected(const RunConfig& cfg, const DegreeDistribution& dist) {
    if (!cfg.initial_infected.empty()) return cfg.initial_infected;
    std::vector<double> seeded(dist.num_classes());
    for (std::size_t l = 0; l < seeded.size(); ++l)
        seeded[l] = std::max(1.0, std::round(0.1 * dist.class_count(l)));
    return seeded;
}

IntegrationConfig integration_config(const RunConfig& cfg, const DegreeDistribution& dist,
                                     const EpidemicParams& params) {
    IntegrationConfig icfg = IntegrationConfig::for_model(dist, params, cfg.t_max, cfg.rel_tol);
    if (cfg.abs_tol) icfg.abs_tol = *cfg.abs_tol;
    return icfg;
}

json state_to_json(const CPState& state) {
    return {{"S", state.S}, {"I", state.I}, {"SI", state.SI}, {"SS", state.SS}, {"II", state.II}};
}

double state_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

const char* verdict_name(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::Stable: return "Stable";
        case StabilityVerdict::Unstable: return "Unstable";
        default: return "Marginal";
    }
}

json stability_to_json(const DegreeDistribution& dist, const EpidemicParams& params,
                       const CPState& state) {
    const OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dydt) {
        rhs_reduced_into(y, dydt, params, dist);
    };
    const std::vector<double> reduced = pack(reduce(state));
    const auto leading = leading_eigenvalue(
        numeric_jacobian(rhs, reduced, 1e-6, 1e-6 * static_cast<double>(dist.node_count())));
    return {{"leading_re", leading.real()},
            {"leading_im", leading.imag()},
            {"verdict", verdict_name(classify(leading.real(), params.gamma))},
            {"method", "numerical"}};
}

}  // namespace

int run_moments(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const DegreeDistribution dist = dist_from(cfg);
        if (!(cfg.gamma > 0.0)) throw InvalidParameter("recovery rate gamma must be positive");
        const Moments& m = dist.moments();
        const AssumptionReport rep = check_assumptions(dist);
        const json j = {{"n", m.n},
                        {"n2", m.n2},
                        {"n3", m.n3},
                        {"tau_c", tau_c(dist, cfg.gamma)},
                        {"a", rep.a},
                        {"B", rep.B},
                        {"a1", rep.a1_holds},
                        {"a2", rep.a2_holds}};
        out << j.dump(2) << "\n";
    });
}

int run_simulate(const RunConfig& cfg, std::ostream& csv, std::ostream& summary, std::ostream& err) {
    return guarded(err, [&] {
        const DegreeDistribution dist = dist_from(cfg);
        const EpidemicParams params{cfg.tau, cfg.gamma};
        validate(params);
        const std::size_t L = dist.num_classes();
        const std::vector<double> infected = effective_infected(cfg, dist);
        const CPState state0 = initial_condition(dist, infected);

        const OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dydt) {
            rhs_full_into(y, dydt, params, dist);
        };
        const Trajectory traj = integrate(rhs, pack(state0), integration_config(cfg, dist, params));

        csv << "t";
        for (std::size_t l = 1; l <= L; ++l) csv << ",I_" << l;
        for (std::size_t l = 1; l <= L; ++l) csv << ",S_" << l;
        csv << ",SI,SS,II,theta\n";
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const auto& y = traj.states[k];
            double S_s = 0.0;
            for (std::size_t l = 0; l < L; ++l) S_s += dist.degree(l) * y[l];
            csv << num17(traj.times[k]);
            for (std::size_t l = 0; l < L; ++l) csv << ',' << num17(y[L + l]);
            for (std::size_t l = 0; l < L; ++l) csv << ',' << num17(y[l]);
            csv << ',' << num17(y[2 * L]) << ',' << num17(y[2 * L + 1]) << ',' << num17(y[2 * L + 2])
                << ',' << num17(y[2 * L] / S_s) << '\n';
        }

        const std::vector<double>& terminal = traj.states.back();
        const CPState terminal_state = unpack_full(terminal, L);
        double sum_I = 0.0;
        for (std::size_t l = 0; l < L; ++l) sum_I += terminal_state.I[l];

        const double dist_dfe = state_distance(terminal, pack(disease_free(dist)));
        std::optional<double> dist_endemic;
        try {
            dist_endemic =
                state_distance(terminal, pack(endemic_equilibrium(params, dist).coordinates));
        } catch (const BelowThreshold&) {
        }

        json j = {{"converged", traj.converged},
                  {"t_end", traj.times.back()},
                  {"terminal_rhs_norm", traj.terminal_rhs_norm},
                  {"terminal", state_to_json(terminal_state)},
                  {"sum_I", sum_I},
                  {"theta", theta_projection(terminal_state, dist).theta},
                  {"distance_to_dfe", dist_dfe},
                  {"distance_to_endemic", dist_endemic ? json(*dist_endemic) : json(nullptr)},
                  {"nearest_equilibrium",
                   (!dist_endemic || dist_dfe <= *dist_endemic) ? "disease_free" : "endemic"}};
        summary << j.dump(2) << "\n";
    });
}

int run_equilibrium(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const DegreeDistribution dist = dist_from(cfg);
        const EpidemicParams params{cfg.tau, cfg.gamma};
        validate(params);
        const EquilibriumReport report = endemic_equilibrium(params, dist, cfg.allow_virtual);
        const json j = {{"kind", report.kind == EquilibriumKind::Endemic ? "endemic" : "disease_free"},
                        {"coordinates", state_to_json(report.coordinates)},
                        {"endemic",
                         {{"X", report.endemic.X},
                          {"Z", report.endemic.Z},
                          {"U", report.endemic.U},
                          {"V", report.endemic.V}}},
                        {"residual_norm", report.residual_norm},
                        {"iterations", report.iterations},
                        {"bracket", {report.bracket_lo, report.bracket_hi}},
                        {"stability", stability_to_json(dist, params, report.coordinates)}};
        out << j.dump(2) << "\n";
    });
}

int run_sweep(const RunConfig& cfg, std::ostream& csv, std::ostream& err) {
    return guarded(err, [&] {
        const DegreeDistribution dist = dist_from(cfg);
        if (!(cfg.gamma > 0.0)) throw InvalidParameter("recovery rate gamma must be positive");
        if (cfg.steps < 1) throw InvalidParameter("sweep needs steps >= 1");
        if (!(cfg.tau_min > 0.0) || !(cfg.tau_max >= cfg.tau_min))
            throw InvalidParameter("sweep needs 0 < tau_min <= tau_max");

        std::vector<double> grid(static_cast<std::size_t>(cfg.steps));
        if (cfg.steps == 1) {
            grid[0] = cfg.tau_min;
        } else {
            const double dt = (cfg.tau_max - cfg.tau_min) / (cfg.steps - 1);
            for (int i = 0; i < cfg.steps; ++i) grid[i] = cfg.tau_min + dt * i;
        }

        const auto rows = bifurcation_sweep(dist, cfg.gamma, grid, cfg.allow_virtual);
        csv << "tau,dfe_lead_re,endemic_sum_I,endemic_lead_re\n";
        for (const auto& row : rows) {
            csv << num17(row.tau) << ',' << num17(row.dfe_lead_re) << ',';
            if (row.endemic_sum_I) csv << num17(*row.endemic_sum_I);
            csv << ',';
            if (row.endemic_lead_re) csv << num17(*row.endemic_lead_re);
            csv << '\n';
        }
    });
}

int run_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const DegreeDistribution dist = dist_from(cfg);
        const EpidemicParams params{cfg.tau, cfg.gamma};
        validate(params);
        const StabilityCertificate cert =
            iterate_certificate(dist, cfg.gamma, cfg.tau, cfg.eps, cfg.max_iter);

        json j;
        j["assumption"] = cert.assumption_used
                              ? json(*cert.assumption_used == Assumption::A1 ? "A1" : "A2")
                              : json(nullptr);
        j["tau"] = cert.tau;
        j["gamma"] = cert.gamma;
        j["iterations"] = cert.iterations;
        j["final_x"] = cert.final_x;
        json seq = json::array();
        for (const auto& [x, z] : cert.sequence) seq.push_back({x, z});
        j["sequence"] = std::move(seq);
        switch (cert.verdict) {
            case CertificateVerdict::Certified: j["verdict"] = "Certified"; break;
            case CertificateVerdict::IterationCapReached: j["verdict"] = "IterationCapReached"; break;
            default: j["verdict"] = "NotApplicable"; break;
        }

        if (cfg.verify) {
            json verification;
            if (cert.verdict == CertificateVerdict::NotApplicable) {
                verification["refused"] = true;
            } else {
                const CPState state0 = initial_condition(dist, effective_infected(cfg, dist));
                const OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dydt) {
                    rhs_theta_into(y, dydt, params, dist);
                };
                const Trajectory traj = integrate(rhs, pack(theta_projection(state0, dist)),
                                                  integration_config(cfg, dist, params));
                const BoundChainReport report = verify_bound_chain(traj, cert, dist, params);
                verification["refused"] = report.refused;
                verification["levels_total"] = report.levels_total;
                verification["levels_verified"] = report.levels_verified;
                verification["checked_points"] = report.checked_points;
                verification["violation_count"] = report.violations.size();
                json violations = json::array();
                for (std::size_t i = 0; i < report.violations.size() && i < 100; ++i) {
                    const auto& v = report.violations[i];
                    violations.push_back({{"level", v.level},
                                          {"time", v.time},
                                          {"kind", v.kind},
                                          {"class_index", v.class_index},
                                          {"observed", v.observed},
                                          {"bound", v.bound}});
                }
                verification["violations"] = std::move(violations);
            }
            j["verification"] = std::move(verification);
        }
        out << j.dump(2) << "\n";
    });
}

}  // namespace cpsis
