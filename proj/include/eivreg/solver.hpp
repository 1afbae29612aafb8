#pragma once

#include <cstdint>
#include <vector>

#include "eivreg/model.hpp"
#include "eivreg/projections.hpp"
#include "eivreg/surrogate.hpp"

namespace eivreg {

enum class StepRule {
    FixedReciprocalLipschitz,  ///< eta = 1 / L_hat every iteration
    Backtracking,              ///< start at 1 / L_hat, halve until sufficient decrease
};

struct SolverOptions {
    int max_iters = 10000;
    StepRule step_rule = StepRule::Backtracking;
    double conv_tol = 1e-8;
    int power_iters = 100;
    int restarts = 4;
    std::uint64_t seed = 0;
    /// Keep the objective after every accepted step of the winning restart.
    bool record_trace = false;

    void validate() const;
};

struct Solution {
    Vector beta_hat;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    int restart_index = 0;
    std::vector<double> trace;  ///< starting value first; filled when record_trace is set
};

/// 0.5 beta^T gamma beta - upsilon^T beta.
double objective(const Matrix& gamma, const Vector& upsilon, const Vector& beta);

/// gamma beta - upsilon.
Vector gradient(const Matrix& gamma, const Vector& upsilon, const Vector& beta);

/// ||gamma||_2 by power iteration on gamma^T gamma from a seeded Gaussian start.
double spectral_norm_estimate(const Matrix& gamma, int iterations, std::uint64_t seed);

/**
 * Projected gradient descent for min 0.5 b'Gb - u'b over B_q(R_q) and the unit l2-ball.
 *
 * Step size 1 / (1.05 L_hat). Under backtracking a step is accepted when
 * f(next) <= f(cur) - 1e-4 / eta * ||next - cur||^2. Restart 0 starts from the
 * projection of upsilon / ||upsilon||; restart r >= 1 from a seeded random boundary
 * point of the feasible set. The lowest objective wins; objectives within 1e-12 go to the lower index.
 * Throws NumericError when an iterate stops being finite.
 */
Solution solve(const SurrogatePair& pair, const SparsityBudget& budget, const SolverOptions& opts = {},
               const ProjectionOptions& proj_opts = {});

}  // namespace eivreg
