#pragma once

#include <cstdint>

#include "eivreg/model.hpp"

namespace eivreg {

/// Law of y_i given Z_i: N(mean_coeff * <beta, Z_i>, variance).
struct ConditionalLaw {
    double mean_coeff;
    double variance;
};

/// For unit-norm beta: mean_coeff = sx2 / sz2, variance = sx2 sw2 / sz2 + se2.
ConditionalLaw conditional_params(const Vector& beta, const NoiseModel& noise);

/// sx2^2 / (2 sz2 (sx2 sw2 + sz2 se2)) * ||Z (beta - beta')||^2, for unit-norm arguments.
double kl_closed_form(const Vector& beta, const Vector& beta_prime, const Matrix& Z,
                      const NoiseModel& noise);

/**
 * Three-term Gaussian KL with per-parameter conditional variances
 * s2(b) = (sx2 - sx2^2 / sz2) ||b||^2 + se2; any norms allowed.
 */
double kl_general_gaussian(const Vector& beta, const Vector& beta_prime, const Matrix& Z,
                           const NoiseModel& noise);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Samples per independent substream block in kl_monte_carlo.
inline constexpr std::size_t kMonteCarloBlock = 8192;

/**
 * Sample mean of log p_beta(y | Z) - log p_beta'(y | Z) over y ~ P_beta.
 *
 * Samples are split into blocks of kMonteCarloBlock, block b drawing from
 * Rng(hash64(seed, b)). Block sums are combined by a fixed-order pairwise
 * reduction, so the result does not depend on `threads`.
 */
MonteCarloEstimate kl_monte_carlo(const Vector& beta, const Vector& beta_prime, const Matrix& Z,
                                  const NoiseModel& noise, std::size_t samples, std::uint64_t seed,
                                  unsigned threads = 1);

}  // namespace eivreg
