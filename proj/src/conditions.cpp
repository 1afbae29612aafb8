#include "eivreg/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "eivreg/errors.hpp"
#include "eivreg/random.hpp"

namespace eivreg {

double column_norm_constant(const Matrix& Z) {
    if (Z.rows() < 1) throw DimensionError("column_norm_constant: Z must have at least one row");
    double best = 0.0;
    for (Eigen::Index j = 0; j < Z.cols(); ++j) best = std::max(best, Z.col(j).norm());
    return best / std::sqrt(static_cast<double>(Z.rows()));
}

ReProbeReport re_probe(const Matrix& gamma, const SparsityBudget& budget, int probes, std::uint64_t seed,
                       const ReProbeOptions& opts) {
    if (gamma.rows() != gamma.cols()) throw ContractError("re_probe: gamma must be square");
    if (gamma != gamma.transpose()) throw ContractError("re_probe: gamma must be symmetric");
    if (probes < 1) throw ContractError("re_probe: probes must be at least 1");
    if (opts.samples < 1) throw ContractError("re_probe: samples must be at least 1");

    const Eigen::Index n = gamma.cols();
    const double q = budget.q();
    const double radius2 = 2.0 * budget.radius();
    const double log_n = std::log(static_cast<double>(n));
    const double m = static_cast<double>(opts.samples);

    ReProbeReport report;
    report.tau_assumed = n >= 2 ? opts.tau_c1 * budget.radius() * std::pow(log_n / m, 1.0 - q / 2.0) : 0.0;
    report.worst_direction = Vector::Zero(n);
    if (n == 0) return report;

    // Axis sweep.
    Eigen::Index worst_axis = 0;
    for (Eigen::Index j = 1; j < n; ++j) {
        if (gamma(j, j) < gamma(worst_axis, worst_axis)) worst_axis = j;
    }
    report.kappa_l_hat = gamma(worst_axis, worst_axis);
    report.worst_direction[worst_axis] = 1.0;
    report.probes_run = static_cast<int>(n);

    std::size_t s_eff = 1;
    if (n >= 2) {
        const double s = std::ceil(budget.radius() * std::pow(m / log_n, q / 2.0));
        s_eff = static_cast<std::size_t>(std::clamp(s, 1.0, static_cast<double>(n)));
    }
    std::size_t s_cap = static_cast<std::size_t>(n);
    if (q == 0.0) s_cap = std::min(s_cap, std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(radius2))));
    const std::size_t sizes[3] = {1, std::min(s_eff, s_cap), std::min(2 * s_eff, s_cap)};

    std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
    std::vector<double> values;
    for (int r = 0; r < probes; ++r) {
        Rng rng(hash64(seed, {static_cast<std::uint64_t>(r)}));
        const std::size_t s = sizes[rng.below(3)];

        // Partial Fisher-Yates for a uniformly random s-subset.
        for (Eigen::Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (std::size_t i = 0; i < s; ++i) {
            const std::size_t k = i + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n) - i));
            std::swap(pool[i], pool[k]);
        }
        values.resize(s);
        double sq = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            values[i] = rng.gaussian();
            sq += values[i] * values[i];
        }
        if (sq == 0.0) continue;
        const double inv_norm = 1.0 / std::sqrt(sq);
        for (double& v : values) v *= inv_norm;

        double quad = 0.0;
        double norm2 = 0.0;
        for (std::size_t a = 0; a < s; ++a) {
            double row = 0.0;
            for (std::size_t b = 0; b < s; ++b) row += gamma(pool[a], pool[b]) * values[b];
            quad += values[a] * row;
            norm2 += values[a] * values[a];
        }
        quad /= norm2;
        ++report.probes_run;
        if (quad < report.kappa_l_hat) {
            report.kappa_l_hat = quad;
            Vector dir = Vector::Zero(n);
            for (std::size_t i = 0; i < s; ++i) dir[pool[i]] = values[i];
            if (q > 0.0) {
                const double total = lq_quasinorm(dir, q);
                if (total > radius2) dir *= std::pow(radius2 / total, 1.0 / q);
            }
            report.worst_direction = std::move(dir);
        }
    }
    return report;
}

}  // namespace eivreg
