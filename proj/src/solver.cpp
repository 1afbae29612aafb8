#include "eivreg/solver.hpp"

#include <cmath>
#include <string>

#include "eivreg/errors.hpp"
#include "eivreg/random.hpp"

namespace eivreg {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kLipschitzInflation = 1.05;
constexpr double kMinStepFraction = 0x1.0p-60;

void check_dims(const Matrix& gamma, const Vector& upsilon, const Vector& beta, const char* where) {
    if (gamma.rows() != gamma.cols() || gamma.cols() != upsilon.size() || upsilon.size() != beta.size()) {
        throw DimensionError(std::string(where) + ": gamma is " + std::to_string(gamma.rows()) + "x" +
                             std::to_string(gamma.cols()) + ", upsilon has length " +
                             std::to_string(upsilon.size()) + ", beta has length " +
                             std::to_string(beta.size()));
    }
}

struct RunResult {
    Vector beta;
    double objective;
    int iterations;
    bool converged;
    std::vector<double> trace;
};

RunResult descend(const SurrogatePair& pair, const SparsityBudget& budget, const SolverOptions& opts,
                  const ProjectionOptions& proj_opts, Vector beta, double step0) {
    const Matrix& gamma = pair.gamma;
    const Vector& upsilon = pair.upsilon;

    Vector g_beta = gamma * beta;
    double f = 0.5 * beta.dot(g_beta) - upsilon.dot(beta);
    RunResult run{beta, f, 0, false, {}};
    if (opts.record_trace) run.trace.push_back(f);

    for (int it = 1; it <= opts.max_iters; ++it) {
        const Vector grad = g_beta - upsilon;
        double eta = step0;
        Vector next;
        Vector g_next;
        double f_next = 0.0;
        bool stalled = false;
        for (;;) {
            next = project_constraint_set(beta - eta * grad, budget, proj_opts);
            g_next = gamma * next;
            f_next = 0.5 * next.dot(g_next) - upsilon.dot(next);
            if (!std::isfinite(f_next) || !next.allFinite()) {
                throw NumericError("solve: non-finite iterate at iteration " + std::to_string(it));
            }
            if (opts.step_rule == StepRule::FixedReciprocalLipschitz) break;
            const double moved_sq = (next - beta).squaredNorm();
            const double slack = 1e-15 * (1.0 + std::abs(f));
            if (f_next <= f - kArmijo / eta * moved_sq + slack) break;
            eta *= 0.5;
            if (eta < step0 * kMinStepFraction) {
                stalled = true;
                break;
            }
        }
        run.iterations = it;
        if (stalled) {
            // No step length gives sufficient decrease: beta is stationary for this rule.
            run.converged = true;
            break;
        }
        const double change = (next - beta).norm();
        beta = std::move(next);
        g_beta = std::move(g_next);
        f = f_next;
        if (opts.record_trace) run.trace.push_back(f);
        if (change < opts.conv_tol) {
            run.converged = true;
            break;
        }
    }
    run.beta = std::move(beta);
    run.objective = f;
    return run;
}

}  // namespace

void SolverOptions::validate() const {
    if (max_iters < 1) throw DomainError("SolverOptions: max_iters must be at least 1");
    if (!(conv_tol > 0.0)) throw DomainError("SolverOptions: conv_tol must be positive");
    if (power_iters < 1) throw DomainError("SolverOptions: power_iters must be at least 1");
    if (restarts < 0) throw DomainError("SolverOptions: restarts must be nonnegative");
}

double objective(const Matrix& gamma, const Vector& upsilon, const Vector& beta) {
    check_dims(gamma, upsilon, beta, "objective");
    return 0.5 * beta.dot(gamma * beta) - upsilon.dot(beta);
}

Vector gradient(const Matrix& gamma, const Vector& upsilon, const Vector& beta) {
    check_dims(gamma, upsilon, beta, "gradient");
    return gamma * beta - upsilon;
}

double spectral_norm_estimate(const Matrix& gamma, int iterations, std::uint64_t seed) {
    const Eigen::Index n = gamma.cols();
    if (n == 0) return 0.0;
    Rng rng(seed);
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.gaussian();
    x.normalize();
    double estimate = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const Vector gx = gamma * x;
        estimate = gx.norm();
        if (estimate == 0.0) return 0.0;
        x = gamma.transpose() * gx;
        const double nx = x.norm();
        if (nx == 0.0) return estimate;
        x /= nx;
    }
    return std::max(estimate, (gamma * x).norm());
}

namespace {

// Largest radial multiple of a feasible point that stays feasible. Random restarts
// start on the boundary: a start deep inside the ball is erased by the first
// gradient step and lands in the same basin as the warm start.
Vector scale_to_boundary(const Vector& v, const SparsityBudget& budget) {
    const double norm = v.norm();
    if (norm == 0.0) return v;
    double t = 1.0 / norm;
    if (budget.q() > 0.0) {
        const double total = lq_quasinorm(v, budget.q());
        t = std::min(t, std::pow(budget.radius() / total, 1.0 / budget.q()));
    }
    return t > 1.0 ? Vector(v * t) : v;
}

}  // namespace

Solution solve(const SurrogatePair& pair, const SparsityBudget& budget, const SolverOptions& opts,
               const ProjectionOptions& proj_opts) {
    opts.validate();
    proj_opts.validate();
    const Eigen::Index n = pair.upsilon.size();
    if (pair.gamma.rows() != n || pair.gamma.cols() != n) {
        throw DimensionError("solve: gamma is " + std::to_string(pair.gamma.rows()) + "x" +
                             std::to_string(pair.gamma.cols()) + ", upsilon has length " +
                             std::to_string(n));
    }

    const double lipschitz =
        kLipschitzInflation * spectral_norm_estimate(pair.gamma, opts.power_iters, hash64(opts.seed, {0}));
    const double step0 = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;

    Solution best;
    bool have_best = false;
    for (int r = 0; r <= opts.restarts; ++r) {
        Vector start;
        if (r == 0) {
            const double norm = pair.upsilon.norm();
            start = norm > 0.0 ? Vector(pair.upsilon / norm) : Vector(Vector::Zero(n));
        } else {
            Rng rng(hash64(opts.seed, {1, static_cast<std::uint64_t>(r)}));
            start.resize(n);
            for (Eigen::Index i = 0; i < n; ++i) start[i] = rng.gaussian();
        }
        start = project_constraint_set(start, budget, proj_opts);
        if (r > 0) start = scale_to_boundary(start, budget);

        RunResult run = descend(pair, budget, opts, proj_opts, std::move(start), step0);
        if (!have_best || run.objective < best.objective - 1e-12) {
            best.beta_hat = std::move(run.beta);
            best.objective = run.objective;
            best.iterations = run.iterations;
            best.converged = run.converged;
            best.restart_index = r;
            best.trace = std::move(run.trace);
            have_best = true;
        }
    }
    return best;
}

}  // namespace eivreg
