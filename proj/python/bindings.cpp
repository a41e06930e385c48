#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/complex.h>

#include "cpsis/cp_system.hpp"
#include "cpsis/degree_model.hpp"
#include "cpsis/equilibria.hpp"
#include "cpsis/global_cert.hpp"
#include "cpsis/integrator.hpp"
#include "cpsis/run_config.hpp"
#include "cpsis/stability.hpp"

namespace py = pybind11;
using namespace cpsis;

namespace {

DegreeDistribution build_from_pairs(const std::vector<std::pair<long long, long long>>& pairs) {
    return build_distribution(std::span(pairs.data(), pairs.size()));
}

Trajectory simulate_full(const DegreeDistribution& dist, const EpidemicParams& params,
                         const std::vector<double>& infected, double t_max, double rel_tol,
                         const std::vector<double>& sample_times) {
    validate(params);
    IntegrationConfig cfg = IntegrationConfig::for_model(dist, params, t_max, rel_tol);
    cfg.sample_times = sample_times;
    const CPState y0 = initial_condition(dist, infected);
    return integrate(
        [&](double, std::span<const double> y, std::span<double> dydt) {
            rhs_full_into(y, dydt, params, dist);
        },
        pack(y0), cfg);
}

Trajectory simulate_theta(const DegreeDistribution& dist, const EpidemicParams& params,
                          const std::vector<double>& infected, double t_max, double rel_tol,
                          const std::vector<double>& sample_times) {
    validate(params);
    IntegrationConfig cfg = IntegrationConfig::for_model(dist, params, t_max, rel_tol);
    cfg.sample_times = sample_times;
    const ThetaState y0 = theta_projection(initial_condition(dist, infected), dist);
    return integrate(
        [&](double, std::span<const double> y, std::span<double> dydt) {
            rhs_theta_into(y, dydt, params, dist);
        },
        pack(y0), cfg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Compact pairwise SIS epidemic model: simulation, equilibria, bifurcation "
              "analysis and global-stability certificates";

    // translators run newest-first, so the base class goes in first
    py::register_exception<Error>(m, "EngineError", PyExc_RuntimeError);
    py::register_exception<BelowThreshold>(m, "BelowThresholdError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::class_<Moments>(m, "Moments")
        .def_readonly("n", &Moments::n)
        .def_readonly("n2", &Moments::n2)
        .def_readonly("n3", &Moments::n3)
        .def_readonly("stub_count", &Moments::stub_count)
        .def("__repr__", [](const Moments& mm) {
            return "Moments(n=" + std::to_string(mm.n) + ", n2=" + std::to_string(mm.n2) +
                   ", n3=" + std::to_string(mm.n3) + ")";
        });

    py::class_<DegreeDistribution>(m, "DegreeDistribution")
        .def(py::init(&build_from_pairs), py::arg("pairs"),
             "Build from a list of (degree, count) pairs")
        .def_property_readonly("num_classes", &DegreeDistribution::num_classes)
        .def_property_readonly("node_count", &DegreeDistribution::node_count)
        .def_property_readonly("moments", &DegreeDistribution::moments)
        .def_property_readonly("classes", [](const DegreeDistribution& d) {
            std::vector<std::pair<long long, long long>> pairs;
            for (const auto& c : d.classes()) pairs.emplace_back(c.degree, c.count);
            return pairs;
        });

    m.def("build_distribution", &build_from_pairs, py::arg("pairs"));
    m.def("tau_c", &tau_c, py::arg("dist"), py::arg("gamma"));

    py::class_<EpidemicParams>(m, "EpidemicParams")
        .def(py::init<double, double>(), py::arg("tau"), py::arg("gamma"))
        .def_readwrite("tau", &EpidemicParams::tau)
        .def_readwrite("gamma", &EpidemicParams::gamma);

    py::class_<AssumptionReport>(m, "AssumptionReport")
        .def_readonly("a1_holds", &AssumptionReport::a1_holds)
        .def_readonly("a2_holds", &AssumptionReport::a2_holds)
        .def_readonly("a", &AssumptionReport::a)
        .def_readonly("B", &AssumptionReport::B);
    m.def("check_assumptions", &check_assumptions, py::arg("dist"));

    py::class_<CPState>(m, "CPState")
        .def(py::init<>())
        .def_readwrite("S", &CPState::S)
        .def_readwrite("I", &CPState::I)
        .def_readwrite("SI", &CPState::SI)
        .def_readwrite("SS", &CPState::SS)
        .def_readwrite("II", &CPState::II);

    m.def("initial_condition",
          [](const DegreeDistribution& dist, const std::vector<double>& infected) {
              return initial_condition(dist, infected);
          },
          py::arg("dist"), py::arg("infected_per_class"));
    m.def("disease_free", &disease_free, py::arg("dist"));
    m.def("rhs_full", &rhs_full, py::arg("state"), py::arg("params"), py::arg("dist"));
    m.def("conservation_residuals",
          [](const CPState& s, const DegreeDistribution& d) {
              const auto r = conservation_residuals(s, d);
              return py::make_tuple(r.singles, r.pairs, r.stubs);
          },
          py::arg("state"), py::arg("dist"));
    m.def("residual", &residual, py::arg("state"), py::arg("params"), py::arg("dist"));

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("states", &Trajectory::states)
        .def_readonly("converged", &Trajectory::converged)
        .def_readonly("terminal_rhs_norm", &Trajectory::terminal_rhs_norm);

    m.def("simulate_full", &simulate_full, py::arg("dist"), py::arg("params"),
          py::arg("infected_per_class"), py::arg("t_max") = 50.0, py::arg("rel_tol") = 1e-8,
          py::arg("sample_times") = std::vector<double>{},
          "Integrate the full system; states are [S_1..S_L, I_1..I_L, SI, SS, II]");
    m.def("simulate_theta", &simulate_theta, py::arg("dist"), py::arg("params"),
          py::arg("infected_per_class"), py::arg("t_max") = 50.0, py::arg("rel_tol") = 1e-8,
          py::arg("sample_times") = std::vector<double>{},
          "Integrate the theta-form system; states are [S_1..S_L, theta]");

    py::enum_<EquilibriumKind>(m, "EquilibriumKind")
        .value("DiseaseFree", EquilibriumKind::DiseaseFree)
        .value("Endemic", EquilibriumKind::Endemic);

    py::class_<EndemicCoordinates>(m, "EndemicCoordinates")
        .def_readonly("X", &EndemicCoordinates::X)
        .def_readonly("Z", &EndemicCoordinates::Z)
        .def_readonly("U", &EndemicCoordinates::U)
        .def_readonly("V", &EndemicCoordinates::V);

    py::class_<EquilibriumReport>(m, "EquilibriumReport")
        .def_readonly("kind", &EquilibriumReport::kind)
        .def_readonly("coordinates", &EquilibriumReport::coordinates)
        .def_readonly("endemic", &EquilibriumReport::endemic)
        .def_readonly("residual_norm", &EquilibriumReport::residual_norm)
        .def_readonly("iterations", &EquilibriumReport::iterations)
        .def_readonly("bracket_lo", &EquilibriumReport::bracket_lo)
        .def_readonly("bracket_hi", &EquilibriumReport::bracket_hi);

    m.def("endemic_equilibrium", &endemic_equilibrium, py::arg("params"), py::arg("dist"),
          py::arg("allow_virtual") = false);
    m.def("g_of_U", &g_of_U, py::arg("U"), py::arg("params"), py::arg("dist"));
    m.def("g_prime", &g_prime, py::arg("U"), py::arg("params"), py::arg("dist"));
    m.def("g_double_prime", &g_double_prime, py::arg("U"), py::arg("params"), py::arg("dist"));
    m.def("f_of_U", &f_of_U, py::arg("U"), py::arg("params"), py::arg("dist"));

    py::class_<DfeSpectrum>(m, "DfeSpectrum")
        .def_readonly("repeated_eig", &DfeSpectrum::repeated_eig)
        .def_readonly("multiplicity", &DfeSpectrum::multiplicity)
        .def_readonly("quad_roots", &DfeSpectrum::quad_roots)
        .def_readonly("alpha", &DfeSpectrum::alpha)
        .def_readonly("stable", &DfeSpectrum::stable);
    m.def("dfe_spectrum", &dfe_spectrum, py::arg("params"), py::arg("dist"));

    py::class_<BifurcationCoefficients>(m, "BifurcationCoefficients")
        .def_readonly("b", &BifurcationCoefficients::b)
        .def_readonly("d", &BifurcationCoefficients::d)
        .def_readonly("b_from_sums", &BifurcationCoefficients::b_from_sums)
        .def_readonly("d_from_sums", &BifurcationCoefficients::d_from_sums)
        .def_readonly("w", &BifurcationCoefficients::w)
        .def_readonly("v", &BifurcationCoefficients::v);
    m.def("bifurcation_coefficients", &bifurcation_coefficients, py::arg("dist"), py::arg("gamma"));

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("tau", &SweepRow::tau)
        .def_readonly("dfe_lead_re", &SweepRow::dfe_lead_re)
        .def_readonly("endemic_sum_I", &SweepRow::endemic_sum_I)
        .def_readonly("endemic_lead_re", &SweepRow::endemic_lead_re);
    m.def("bifurcation_sweep",
          [](const DegreeDistribution& dist, double gamma, const std::vector<double>& taus,
             bool allow_virtual) { return bifurcation_sweep(dist, gamma, taus, allow_virtual); },
          py::arg("dist"), py::arg("gamma"), py::arg("tau_grid"), py::arg("allow_virtual") = false);

    py::enum_<Assumption>(m, "Assumption")
        .value("A1", Assumption::A1)
        .value("A2", Assumption::A2);
    py::enum_<CertificateVerdict>(m, "CertificateVerdict")
        .value("Certified", CertificateVerdict::Certified)
        .value("NotApplicable", CertificateVerdict::NotApplicable)
        .value("IterationCapReached", CertificateVerdict::IterationCapReached);

    py::class_<StabilityCertificate>(m, "StabilityCertificate")
        .def_readonly("assumption_used", &StabilityCertificate::assumption_used)
        .def_readonly("tau", &StabilityCertificate::tau)
        .def_readonly("gamma", &StabilityCertificate::gamma)
        .def_readonly("sequence", &StabilityCertificate::sequence)
        .def_readonly("iterations", &StabilityCertificate::iterations)
        .def_readonly("final_x", &StabilityCertificate::final_x)
        .def_readonly("verdict", &StabilityCertificate::verdict);

    m.def("iterate_certificate", &iterate_certificate, py::arg("dist"), py::arg("gamma"),
          py::arg("tau"), py::arg("target_eps") = 1e-6, py::arg("max_iter") = 10000);
    m.def("s_lower_bound", &s_lower_bound, py::arg("x"), py::arg("dist"));
    m.def("jensen_bound", &jensen_bound, py::arg("x"), py::arg("dist"));
    m.def("d_over_ss_bound", &d_over_ss_bound, py::arg("x"), py::arg("dist"), py::arg("variant"));
    m.def("z_star", &z_star, py::arg("x"), py::arg("dist"), py::arg("gamma"), py::arg("variant"));

    py::class_<BoundViolation>(m, "BoundViolation")
        .def_readonly("level", &BoundViolation::level)
        .def_readonly("time", &BoundViolation::time)
        .def_readonly("kind", &BoundViolation::kind)
        .def_readonly("class_index", &BoundViolation::class_index)
        .def_readonly("observed", &BoundViolation::observed)
        .def_readonly("bound", &BoundViolation::bound);

    py::class_<BoundChainReport>(m, "BoundChainReport")
        .def_readonly("refused", &BoundChainReport::refused)
        .def_readonly("levels_total", &BoundChainReport::levels_total)
        .def_readonly("levels_verified", &BoundChainReport::levels_verified)
        .def_readonly("entry_times", &BoundChainReport::entry_times)
        .def_readonly("checked_points", &BoundChainReport::checked_points)
        .def_readonly("violations", &BoundChainReport::violations);

    m.def("verify_bound_chain", &verify_bound_chain, py::arg("theta_trajectory"),
          py::arg("certificate"), py::arg("dist"), py::arg("params"));

    m.attr("__version__") = "0.1.0";
}
