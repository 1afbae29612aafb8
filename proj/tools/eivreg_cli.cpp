#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eivreg/conditions.hpp"
#include "eivreg/datagen.hpp"
#include "eivreg/errors.hpp"
#include "eivreg/harness.hpp"
#include "eivreg/kl.hpp"
#include "eivreg/oracle.hpp"
#include "eivreg/random.hpp"
#include "eivreg/rates.hpp"
#include "eivreg/solver.hpp"
#include "eivreg/surrogate.hpp"

namespace {

using namespace eivreg;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct NoiseArgs {
    double sigma_x2 = 1.0;
    double sigma_w2 = 0.25;
    double sigma_e2 = 0.25;

    void attach(CLI::App* app) {
        app->add_option("--sigma-x2", sigma_x2, "variance of X entries")->capture_default_str();
        app->add_option("--sigma-w2", sigma_w2, "variance of W entries")->capture_default_str();
        app->add_option("--sigma-e2", sigma_e2, "variance of e entries")->capture_default_str();
    }
    NoiseModel model() const { return NoiseModel(sigma_x2, sigma_w2, sigma_e2); }
};

Vector random_unit(Eigen::Index n, Rng& rng) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
    return v / v.norm();
}

int cmd_simulate(const std::string& config_path, const std::string& out_path, unsigned threads) {
    const ExperimentConfig cfg = load_config(config_path);
    const auto records = run_experiment(cfg, threads);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("simulate: cannot open " + out_path);
    write_csv(out, records, cfg.loss_ps);
    std::size_t failures = 0;
    for (const auto& r : records) failures += r.failed() ? 1 : 0;
    std::printf("wrote %zu trials to %s (%zu failed)\n", records.size(), out_path.c_str(), failures);
    return 0;
}

int cmd_slope(const std::string& in_path, const std::string& mode, const std::string& metric) {
    std::ifstream in(in_path);
    if (!in) throw IoError("slope: cannot open " + in_path);
    const auto records = read_csv(in);
    const RateReport report = rate_report(records, parse_sweep_mode(mode), metric);
    std::cout << format_report_text(report);
    std::cout << format_report_json(report) << '\n';
    return 0;
}

int cmd_rates(double p, double q, double radius, std::size_t m, std::size_t n, const NoiseArgs& noise,
              double kappa_c, double kappa_l) {
    const RateInputs in{p, SparsityBudget(q, radius), ProblemShape(m, n), noise.model(), kappa_c, kappa_l};
    std::printf("lower_bound_rate %.17g\n", lower_bound_rate(in));
    std::printf("upper_bound_rate %.17g\n", upper_bound_rate(in));
    std::printf("rate_ratio_p2    %.17g\n", rate_ratio_p2(in));
    std::printf("(all values up to constants)\n");
    return 0;
}

int cmd_kl_check(std::size_t m, std::size_t n, std::size_t samples, std::uint64_t seed,
                 const NoiseArgs& noise_args) {
    const NoiseModel noise = noise_args.model();
    const ProblemShape shape(m, n);
    Rng rng(seed);
    Matrix Z(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
        for (Eigen::Index j = 0; j < Z.cols(); ++j) Z(i, j) = noise.sigma_z() * rng.gaussian();
    const Vector beta = random_unit(Z.cols(), rng);
    const Vector beta_prime = random_unit(Z.cols(), rng);

    const double closed = kl_closed_form(beta, beta_prime, Z, noise);
    const double general = kl_general_gaussian(beta, beta_prime, Z, noise);
    const MonteCarloEstimate mc = kl_monte_carlo(beta, beta_prime, Z, noise, samples, hash64(seed, {1}));
    std::printf("closed_form   %.17g\n", closed);
    std::printf("general_form  %.17g\n", general);
    std::printf("monte_carlo   %.17g  std_error %.6g  samples %zu\n", mc.mean, mc.std_error, mc.samples);
    std::printf("z_score       %.4f\n", mc.std_error > 0.0 ? (mc.mean - closed) / mc.std_error : 0.0);
    return 0;
}

// Dataset for the first (m, n) grid point and replicate 0, hidden truth included.
int cmd_generate(const std::string& config_path, const std::string& out_path) {
    const ExperimentConfig cfg = load_config(config_path);
    const std::size_t m = cfg.m_grid.front();
    const std::size_t n = cfg.n_grid.front();
    const Vector beta_star = generate_signal(SignalSpec{n, cfg.budget(), signal_seed(cfg.master_seed, n, 0)});
    const std::uint64_t seed = trial_seed(cfg.master_seed, m, n, 0);
    save_dataset(out_path, generate_dataset(ProblemShape(m, n), cfg.noise, beta_star, seed, true), cfg.noise, seed);
    return 0;
}

int cmd_re_probe(const std::string& config_path, int probes_override) {
    const ExperimentConfig cfg = load_config(config_path);
    const std::size_t m = cfg.m_grid.front();
    const std::size_t n = cfg.n_grid.front();
    const SparsityBudget budget = cfg.budget();
    const Vector beta_star = generate_signal(SignalSpec{n, budget, signal_seed(cfg.master_seed, n, 0)});
    const std::uint64_t seed = trial_seed(cfg.master_seed, m, n, 0);
    const Dataset data = generate_dataset(ProblemShape(m, n), cfg.noise, beta_star, seed, false);
    const Matrix gamma = compute_gamma(data.Z, cfg.noise.sigma_w2());
    const int probes = probes_override > 0 ? probes_override : cfg.conditions.probes;
    const ReProbeReport rep =
        re_probe(gamma, budget, probes, hash64(seed, {2}), ReProbeOptions{m, cfg.conditions.tau_c1});

    std::size_t support = 0;
    for (Eigen::Index j = 0; j < rep.worst_direction.size(); ++j)
        support += std::abs(rep.worst_direction[j]) > kZeroThreshold ? 1 : 0;
    std::printf("instance           m = %zu, n = %zu, q = %g, R_q = %g, replicate 0\n", m, n, cfg.q, cfg.R_q);
    std::printf("kappa_c            %.17g\n", column_norm_constant(data.Z));
    std::printf("kappa_l_hat        %.17g\n", rep.kappa_l_hat);
    std::printf("tau_assumed        %.17g\n", rep.tau_assumed);
    std::printf("probes_run         %d\n", rep.probes_run);
    std::printf("worst_support      %zu\n", support);
    std::printf("note               kappa_l_hat upper-bounds the restricted minimum; it can refute, not certify\n");
    return 0;
}

int cmd_oracle(std::size_t n, double q, double radius, int resolution, int restarts, std::uint64_t seed) {
    Rng rng(seed);
    Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.gaussian();
    const Matrix gamma = a.transpose() * a / static_cast<double>(n);
    Vector upsilon(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < upsilon.size(); ++i) upsilon[i] = rng.gaussian();
    const SparsityBudget budget(q, radius);
    const GridSpec grid{resolution, 1.0};
    const OracleResult ref = q == 0.0 ? support_enumerate_minimize(gamma, upsilon, budget.support_size(), grid)
                                      : grid_minimize(gamma, upsilon, budget, grid);
    SolverOptions opts;
    opts.restarts = restarts;
    opts.seed = seed;
    const Solution sol = solve(SurrogatePair{gamma, upsilon}, budget, opts);
    std::printf("oracle_objective  %.17g\n", ref.objective);
    std::printf("solver_objective  %.17g\n", sol.objective);
    std::printf("gap               %.3g\n", sol.objective - ref.objective);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eivreg: sparse regression with additively corrupted covariates"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string in_path;
    std::string mode = "sweep-m";
    std::string metric = "l2_err_sq";
    unsigned threads = 1;

    auto* simulate = app.add_subcommand("simulate", "run a parameter sweep and write a trial CSV");
    simulate->add_option("--config", config_path, "JSON experiment config")->required();
    simulate->add_option("--out", out_path, "output CSV path")->required();
    simulate->add_option("--threads", threads, "worker threads")->capture_default_str();

    auto* slope = app.add_subcommand("slope", "fit the rate exponent from a trial CSV");
    slope->add_option("--in", in_path, "trial CSV")->required();
    slope->add_option("--mode", mode, "sweep-m or sweep-n")->capture_default_str();
    slope->add_option("--metric", metric, "l2_err_sq or deviation_inf")->capture_default_str();

    double p = 2.0;
    double q = 0.0;
    double radius = 1.0;
    std::size_t m = 100;
    std::size_t n = 100;
    double kappa_c = 1.0;
    double kappa_l = 1.0;
    NoiseArgs rate_noise;
    auto* rates = app.add_subcommand("rates", "evaluate the lower and upper rate expressions");
    rates->add_option("--p", p, "loss exponent")->capture_default_str();
    rates->add_option("--q", q, "sparsity exponent")->capture_default_str();
    rates->add_option("--R", radius, "l_q radius")->capture_default_str();
    rates->add_option("--m", m, "samples")->capture_default_str();
    rates->add_option("--n", n, "dimension")->capture_default_str();
    rates->add_option("--kappa-c", kappa_c, "column normalization constant")->capture_default_str();
    rates->add_option("--kappa-l", kappa_l, "restricted eigenvalue constant")->capture_default_str();
    rate_noise.attach(rates);

    std::size_t kl_m = 3;
    std::size_t kl_n = 2;
    std::size_t samples = 1000000;
    std::uint64_t seed = 1;
    NoiseArgs kl_noise;
    kl_noise.sigma_w2 = 1.0;
    kl_noise.sigma_e2 = 1.0;
    auto* kl = app.add_subcommand("kl-check", "compare closed-form, general and Monte-Carlo KL");
    kl->add_option("--m", kl_m, "samples")->capture_default_str();
    kl->add_option("--n", kl_n, "dimension")->capture_default_str();
    kl->add_option("--samples", samples, "Monte-Carlo draws")->capture_default_str();
    kl->add_option("--seed", seed, "seed")->capture_default_str();
    kl_noise.attach(kl);

    int probes = 0;
    auto* probe = app.add_subcommand("re-probe", "probe the restricted eigenvalue on a generated instance");
    probe->add_option("--config", config_path, "JSON experiment config")->required();
    probe->add_option("--probes", probes, "override conditions.probes");

    auto* generate = app.add_subcommand("generate", "write one generated dataset to a text file");
    generate->add_option("--config", config_path, "JSON experiment config")->required();
    generate->add_option("--out", out_path, "dataset path")->required();

    std::size_t oracle_n = 2;
    double oracle_q = 1.0;
    double oracle_r = 1.0;
    int resolution = 801;
    int restarts = 8;
    std::uint64_t oracle_seed = 1;
    auto* oracle = app.add_subcommand("oracle", "");  // hidden: brute-force cross-check
    oracle->group("");
    oracle->add_option("--n", oracle_n);
    oracle->add_option("--q", oracle_q);
    oracle->add_option("--R", oracle_r);
    oracle->add_option("--resolution", resolution);
    oracle->add_option("--restarts", restarts);
    oracle->add_option("--seed", oracle_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(config_path, out_path, threads);
        if (*slope) return cmd_slope(in_path, mode, metric);
        if (*rates) return cmd_rates(p, q, radius, m, n, rate_noise, kappa_c, kappa_l);
        if (*kl) return cmd_kl_check(kl_m, kl_n, samples, seed, kl_noise);
        if (*generate) return cmd_generate(config_path, out_path);
        if (*probe) return cmd_re_probe(config_path, probes);
        if (*oracle) return cmd_oracle(oracle_n, oracle_q, oracle_r, resolution, restarts, oracle_seed);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
