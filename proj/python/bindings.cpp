#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eivreg/conditions.hpp"
#include "eivreg/datagen.hpp"
#include "eivreg/errors.hpp"
#include "eivreg/harness.hpp"
#include "eivreg/kl.hpp"
#include "eivreg/oracle.hpp"
#include "eivreg/projections.hpp"
#include "eivreg/rates.hpp"
#include "eivreg/solver.hpp"
#include "eivreg/surrogate.hpp"

namespace py = pybind11;
using namespace eivreg;

namespace {

py::dict record_to_dict(const TrialRecord& r) {
    py::dict d;
    d["replicate"] = r.replicate;
    d["m"] = r.m;
    d["n"] = r.n;
    d["q"] = r.q;
    d["R_q"] = r.R_q;
    d["sigma_w"] = r.sigma_w;
    d["sigma_e"] = r.sigma_e;
    d["kappa_c_emp"] = r.kappa_c_emp;
    d["kappa_l_emp"] = r.kappa_l_emp;
    d["deviation_inf"] = r.deviation_inf;
    d["l2_err_sq"] = r.l2_err_sq;
    d["l1_err"] = r.l1_err;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["seed_used"] = r.seed_used;
    d["lp_losses"] = r.lp_losses;
    d["error"] = r.error;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sparse regression with additively corrupted covariates";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConstructionError>(m, "ConstructionError", base.ptr());
    py::register_exception<ContractError>(m, "ContractError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<FitError>(m, "FitError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ReportError>(m, "ReportError", base.ptr());

    py::class_<NoiseModel>(m, "NoiseModel")
        .def(py::init<double, double, double>(), py::arg("sigma_x2"), py::arg("sigma_w2"), py::arg("sigma_e2"))
        .def_property_readonly("sigma_x2", &NoiseModel::sigma_x2)
        .def_property_readonly("sigma_w2", &NoiseModel::sigma_w2)
        .def_property_readonly("sigma_e2", &NoiseModel::sigma_e2)
        .def_property_readonly("sigma_z2", &NoiseModel::sigma_z2);

    py::class_<SparsityBudget>(m, "SparsityBudget")
        .def(py::init<double, double>(), py::arg("q"), py::arg("radius"))
        .def_property_readonly("q", &SparsityBudget::q)
        .def_property_readonly("radius", &SparsityBudget::radius);

    m.def("lp_loss", &lp_loss, py::arg("beta_hat"), py::arg("beta_star"), py::arg("p"));
    m.def("lq_quasinorm", &lq_quasinorm, py::arg("beta"), py::arg("q"));
    m.def("in_constraint_set", &in_constraint_set, py::arg("beta"), py::arg("budget"), py::arg("tol") = 0.0);

    m.def("generate_signal",
          [](std::size_t n, const SparsityBudget& budget, std::uint64_t seed) {
              return generate_signal(SignalSpec{n, budget, seed});
          },
          py::arg("n"), py::arg("budget"), py::arg("seed"));
    m.def("generate_dataset",
          [](std::size_t rows, std::size_t cols, const NoiseModel& noise, const Vector& beta_star,
             std::uint64_t seed) {
              Dataset d = generate_dataset(ProblemShape(rows, cols), noise, beta_star, seed, true);
              py::dict out;
              out["Z"] = d.Z;
              out["y"] = d.y;
              out["X"] = d.hidden->X;
              out["W"] = d.hidden->W;
              out["e"] = d.hidden->e;
              out["beta_star"] = d.hidden->beta_star;
              return out;
          },
          py::arg("m"), py::arg("n"), py::arg("noise"), py::arg("beta_star"), py::arg("seed"));

    m.def("compute_gamma", &compute_gamma, py::arg("Z"), py::arg("sigma_w2"));
    m.def("compute_upsilon", &compute_upsilon, py::arg("Z"), py::arg("y"));
    m.def("deviation_inf",
          [](const Matrix& gamma, const Vector& upsilon, const Vector& beta_star) {
              return deviation_inf(SurrogatePair{gamma, upsilon}, beta_star);
          },
          py::arg("gamma"), py::arg("upsilon"), py::arg("beta_star"));

    m.def("column_norm_constant", &column_norm_constant, py::arg("Z"));
    m.def("re_probe",
          [](const Matrix& gamma, const SparsityBudget& budget, int probes, std::uint64_t seed,
             std::size_t samples) {
              const ReProbeReport r = re_probe(gamma, budget, probes, seed, ReProbeOptions{samples, 1.0});
              py::dict out;
              out["kappa_l_hat"] = r.kappa_l_hat;
              out["worst_direction"] = r.worst_direction;
              out["probes_run"] = r.probes_run;
              out["tau_assumed"] = r.tau_assumed;
              return out;
          },
          py::arg("gamma"), py::arg("budget"), py::arg("probes"), py::arg("seed"), py::arg("samples") = 1);

    m.def("project_l1", &project_l1, py::arg("v"), py::arg("radius"));
    m.def("project_l0", &project_l0, py::arg("v"), py::arg("keep"));
    m.def("project_lq", [](const Vector& v, double q, double r) { return project_lq(v, q, r); },
          py::arg("v"), py::arg("q"), py::arg("radius"));
    m.def("project_constraint_set",
          [](const Vector& v, const SparsityBudget& b) { return project_constraint_set(v, b); },
          py::arg("v"), py::arg("budget"));

    m.def("objective", &objective, py::arg("gamma"), py::arg("upsilon"), py::arg("beta"));
    m.def("gradient", &gradient, py::arg("gamma"), py::arg("upsilon"), py::arg("beta"));
    m.def("solve",
          [](const Matrix& gamma, const Vector& upsilon, const SparsityBudget& budget, int restarts,
             std::uint64_t seed, int max_iters) {
              SolverOptions opts;
              opts.restarts = restarts;
              opts.seed = seed;
              opts.max_iters = max_iters;
              const Solution s = solve(SurrogatePair{gamma, upsilon}, budget, opts);
              py::dict out;
              out["beta_hat"] = s.beta_hat;
              out["objective"] = s.objective;
              out["iterations"] = s.iterations;
              out["converged"] = s.converged;
              out["restart_index"] = s.restart_index;
              return out;
          },
          py::arg("gamma"), py::arg("upsilon"), py::arg("budget"), py::arg("restarts") = 4,
          py::arg("seed") = 0, py::arg("max_iters") = 10000);

    m.def("kl_closed_form", &kl_closed_form, py::arg("beta"), py::arg("beta_prime"), py::arg("Z"),
          py::arg("noise"));
    m.def("kl_general_gaussian", &kl_general_gaussian, py::arg("beta"), py::arg("beta_prime"), py::arg("Z"),
          py::arg("noise"));
    m.def("kl_monte_carlo",
          [](const Vector& b, const Vector& bp, const Matrix& Z, const NoiseModel& noise, std::size_t samples,
             std::uint64_t seed) {
              const MonteCarloEstimate e = kl_monte_carlo(b, bp, Z, noise, samples, seed);
              return py::make_tuple(e.mean, e.std_error);
          },
          py::arg("beta"), py::arg("beta_prime"), py::arg("Z"), py::arg("noise"), py::arg("samples"),
          py::arg("seed"));

    const auto rate_inputs = [](double p, double q, double radius, std::size_t rows, std::size_t cols,
                                const NoiseModel& noise, double kc, double kl) {
        return RateInputs{p, SparsityBudget(q, radius), ProblemShape(rows, cols), noise, kc, kl};
    };
    m.def("lower_bound_rate",
          [rate_inputs](double p, double q, double r, std::size_t rows, std::size_t cols, const NoiseModel& nm,
                        double kc) { return lower_bound_rate(rate_inputs(p, q, r, rows, cols, nm, kc, 1.0)); },
          py::arg("p"), py::arg("q"), py::arg("R"), py::arg("m"), py::arg("n"), py::arg("noise"),
          py::arg("kappa_c"));
    m.def("upper_bound_rate",
          [rate_inputs](double q, double r, std::size_t rows, std::size_t cols, const NoiseModel& nm, double kl) {
              return upper_bound_rate(rate_inputs(2.0, q, r, rows, cols, nm, 1.0, kl));
          },
          py::arg("q"), py::arg("R"), py::arg("m"), py::arg("n"), py::arg("noise"), py::arg("kappa_l"));
    m.def("fit_rate_exponent",
          [](const std::vector<std::pair<double, double>>& pts) {
              const PowerLawFit f = fit_rate_exponent(pts);
              return py::make_tuple(f.slope, f.intercept, f.r2);
          },
          py::arg("points"));

    m.def("run_experiment",
          [](const std::string& config_json, unsigned threads) {
              const ExperimentConfig cfg = parse_config(config_json);
              py::list out;
              for (const auto& r : run_experiment(cfg, threads)) out.append(record_to_dict(r));
              return out;
          },
          py::arg("config_json"), py::arg("threads") = 1);
    m.def("simulate_csv",
          [](const std::string& config_json, unsigned threads) {
              const ExperimentConfig cfg = parse_config(config_json);
              return to_csv(run_experiment(cfg, threads), cfg.loss_ps);
          },
          py::arg("config_json"), py::arg("threads") = 1);
}
