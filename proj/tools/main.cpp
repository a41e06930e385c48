#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cpsis/errors.hpp"
#include "cpsis/run_config.hpp"

namespace {

struct CliOptions {
    std::string degrees;
    std::string config_path;
    std::string initial_infected;
    std::string out_path;
    std::string emit_config_path;
    double abs_tol = 1e-5;
    cpsis::RunConfig cfg;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cpsis::ValidationError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Common flags shared by every subcommand. Values set on the command line
// override the config file, so defaults are applied only after parsing.
void add_common(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--degrees", opt.degrees, "degree classes as degree:count tokens, e.g. 2:850,3:100,4:50");
    cmd->add_option("--config", opt.config_path, "JSON config file; flags override its keys");
    cmd->add_option("--gamma", opt.cfg.gamma, "recovery rate");
    cmd->add_option("--tau", opt.cfg.tau, "infection rate per SI edge");
    cmd->add_option("--out", opt.out_path, "output path (default: stdout; simulate: simulate.csv)");
    cmd->add_option("--emit-config", opt.emit_config_path, "write the effective config JSON to this path and exit");
}

void add_integration(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--initial-infected", opt.initial_infected, "initial infected per class, e.g. 90,50,10");
    cmd->add_option("--t-max", opt.cfg.t_max, "integration horizon");
    cmd->add_option("--rel-tol", opt.cfg.rel_tol, "relative tolerance");
    cmd->add_option("--abs-tol", opt.abs_tol, "absolute tolerance (default 1e-8 N)");
}

// Merge order: config file first, then any flag the user actually passed.
cpsis::RunConfig effective_config(const CLI::App* cmd, const CliOptions& opt) {
    cpsis::RunConfig cfg;
    if (!opt.config_path.empty()) cfg = cpsis::config_from_json_text(slurp(opt.config_path));

    auto passed = [&](const std::string& name) {
        const CLI::Option* o = cmd->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };
    if (passed("--degrees")) cfg.degrees = cpsis::parse_degree_tokens(opt.degrees);
    if (passed("--gamma")) cfg.gamma = opt.cfg.gamma;
    if (passed("--tau")) cfg.tau = opt.cfg.tau;
    if (passed("--initial-infected")) cfg.initial_infected = cpsis::parse_number_list(opt.initial_infected);
    if (passed("--t-max")) cfg.t_max = opt.cfg.t_max;
    if (passed("--rel-tol")) cfg.rel_tol = opt.cfg.rel_tol;
    if (passed("--abs-tol")) cfg.abs_tol = opt.abs_tol;
    if (passed("--tau-min")) cfg.tau_min = opt.cfg.tau_min;
    if (passed("--tau-max")) cfg.tau_max = opt.cfg.tau_max;
    if (passed("--steps")) cfg.steps = opt.cfg.steps;
    if (passed("--eps")) cfg.eps = opt.cfg.eps;
    if (passed("--max-iter")) cfg.max_iter = opt.cfg.max_iter;
    if (passed("--verify")) cfg.verify = opt.cfg.verify;
    if (passed("--allow-virtual")) cfg.allow_virtual = opt.cfg.allow_virtual;
    return cfg;
}

class FileOrStdout {
public:
    explicit FileOrStdout(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw cpsis::ValidationError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compact pairwise SIS epidemic engine"};
    app.require_subcommand(1);

    CliOptions opt;

    CLI::App* moments = app.add_subcommand("moments", "degree moments, epidemic threshold and assumption flags");
    add_common(moments, opt);

    CLI::App* simulate = app.add_subcommand("simulate", "integrate the full system; CSV trajectory plus JSON summary");
    add_common(simulate, opt);
    add_integration(simulate, opt);

    CLI::App* equilibrium = app.add_subcommand("equilibrium", "solve for the endemic steady state");
    add_common(equilibrium, opt);
    equilibrium->add_flag("--allow-virtual", opt.cfg.allow_virtual, "return the unphysical subcritical branch");

    CLI::App* sweep = app.add_subcommand("sweep", "bifurcation table over a tau grid");
    add_common(sweep, opt);
    sweep->add_option("--tau-min", opt.cfg.tau_min, "first tau value")->required();
    sweep->add_option("--tau-max", opt.cfg.tau_max, "last tau value")->required();
    sweep->add_option("--steps", opt.cfg.steps, "number of grid points")->required();
    sweep->add_flag("--allow-virtual", opt.cfg.allow_virtual, "include the virtual endemic branch below tau_c");

    CLI::App* certify = app.add_subcommand("certify", "monotone-iteration global stability certificate");
    add_common(certify, opt);
    add_integration(certify, opt);
    certify->add_option("--eps", opt.cfg.eps, "target bound on the iterates x_n");
    certify->add_option("--max-iter", opt.cfg.max_iter, "iteration cap");
    certify->add_flag("--verify", opt.cfg.verify, "cross-check the bound chain along a simulated trajectory");

    CLI11_PARSE(app, argc, argv);
    CLI::App* cmd = app.get_subcommands().front();

    try {
        const cpsis::RunConfig cfg = effective_config(cmd, opt);

        if (!opt.emit_config_path.empty()) {
            std::ofstream out(opt.emit_config_path);
            if (!out) throw cpsis::ValidationError("cannot open '" + opt.emit_config_path + "'");
            out << cpsis::config_to_json_text(cfg);
            return 0;
        }

        if (cmd == moments) {
            FileOrStdout out(opt.out_path);
            return cpsis::run_moments(cfg, out.stream(), std::cerr);
        }
        if (cmd == simulate) {
            const std::string csv_path = opt.out_path.empty() ? "simulate.csv" : opt.out_path;
            std::ofstream csv(csv_path);
            if (!csv) throw cpsis::ValidationError("cannot open output file '" + csv_path + "'");
            return cpsis::run_simulate(cfg, csv, std::cout, std::cerr);
        }
        if (cmd == equilibrium) {
            FileOrStdout out(opt.out_path);
            return cpsis::run_equilibrium(cfg, out.stream(), std::cerr);
        }
        if (cmd == sweep) {
            FileOrStdout out(opt.out_path);
            return cpsis::run_sweep(cfg, out.stream(), std::cerr);
        }
        FileOrStdout out(opt.out_path);
        return cpsis::run_certify(cfg, out.stream(), std::cerr);
    } catch (const cpsis::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
