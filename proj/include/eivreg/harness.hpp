#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "eivreg/model.hpp"
#include "eivreg/projections.hpp"
#include "eivreg/solver.hpp"

namespace eivreg {

struct ConditionsConfig {
    int probes = 50;
    double tau_c1 = 1.0;
};

struct ExperimentConfig {
    double q = 0.0;
    double R_q = 1.0;
    std::vector<std::size_t> m_grid;
    std::vector<std::size_t> n_grid;
    NoiseModel noise{1.0, 0.0, 0.0};
    int replicates = 1;
    std::uint64_t master_seed = 0;
    SolverOptions solver;
    ProjectionOptions projections;
    std::vector<double> loss_ps{1.0, 2.0};
    ConditionsConfig conditions;

    void validate() const;
    SparsityBudget budget() const { return SparsityBudget(q, R_q); }
};

/// Parse the JSON config format. Unknown keys anywhere are a ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct TrialRecord {
    int replicate = 0;
    std::size_t m = 0;
    std::size_t n = 0;
    double q = 0.0;
    double R_q = 0.0;
    double sigma_w = 0.0;  ///< standard deviation, not variance
    double sigma_e = 0.0;
    double kappa_c_emp = 0.0;
    double kappa_l_emp = 0.0;
    double deviation_inf = 0.0;
    double l2_err_sq = 0.0;
    double l1_err = 0.0;
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed_used = 0;
    std::vector<double> lp_losses;  ///< aligned with ExperimentConfig::loss_ps
    std::string error;              ///< empty on success

    bool failed() const { return !error.empty(); }
};

/// seed_used for trial (m, n, replicate).
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t m, std::size_t n, int replicate);
/// Seed of beta_star, shared by every m for a given (n, replicate).
std::uint64_t signal_seed(std::uint64_t master_seed, std::size_t n, int replicate);

/**
 * Run every (m, n, replicate) trial: draw beta_star, generate data, form the
 * surrogates, probe the design conditions, solve, and score against beta_star.
 * Trial failures are recorded in TrialRecord::error instead of aborting. Output
 * is sorted by (m, n, replicate) and does not depend on `threads`.
 */
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config, unsigned threads = 1);

/// Header plus one row per record; reals with 17 significant digits.
void write_csv(std::ostream& out, const std::vector<TrialRecord>& records,
               const std::vector<double>& loss_ps);
std::string to_csv(const std::vector<TrialRecord>& records, const std::vector<double>& loss_ps);
std::vector<TrialRecord> read_csv(std::istream& in);

struct MetricSummary {
    double median;
    double lower_quartile;
    double upper_quartile;
};

struct SummaryRow {
    std::vector<double> key;  ///< values of the group_by fields, in order
    std::size_t count = 0;
    std::size_t failures = 0;
    double failure_rate = 0.0;
    std::map<std::string, MetricSummary> metrics;
};

struct SummaryTable {
    std::vector<std::string> group_by;
    std::vector<SummaryRow> rows;  ///< sorted by key
};

/// Quantile with linear interpolation between order statistics (h = (N - 1) p).
double quantile(std::vector<double> values, double p);

/// Medians and quartiles of every numeric metric per group; failed trials are
/// excluded from the statistics and counted in failure_rate.
SummaryTable aggregate(const std::vector<TrialRecord>& records, const std::vector<std::string>& group_by);

enum class SweepMode { SweepM, SweepN };

struct RateFit {
    double fixed_value;  ///< n for sweep-m, m for sweep-n
    std::vector<std::pair<double, double>> points;
    double slope;
    double intercept;
    double r2;
    double theoretical;
};

struct RateReport {
    SweepMode mode;
    std::string metric;
    double q;
    std::vector<RateFit> fits;
};

/**
 * Fit log(median metric) against log of the sample-size ratio for each value of
 * the unswept axis that has at least 3 swept values.
 *   metric "l2_err_sq":     x = log n / m,        theoretical exponent 1 - q/2
 *   metric "deviation_inf": x = sqrt(log n / m),  theoretical exponent 1
 */
RateReport rate_report(const std::vector<TrialRecord>& records, SweepMode mode,
                       const std::string& metric = "l2_err_sq");

std::string format_report_text(const RateReport& report);
std::string format_report_json(const RateReport& report);

SweepMode parse_sweep_mode(const std::string& text);

}  // namespace eivreg
