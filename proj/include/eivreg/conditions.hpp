#pragma once

#include <cstdint>

#include "eivreg/model.hpp"

namespace eivreg {

/// max_j ||Z_{.j}||_2 / sqrt(m).
double column_norm_constant(const Matrix& Z);

struct ReProbeOptions {
    /// Sample count m behind gamma; sets the random support sizes and tau.
    std::size_t samples = 1;
    /// c_1 in tau = c_1 R_q (log n / m)^(1 - q/2).
    double tau_c1 = 1.0;
};

struct ReProbeReport {
    double kappa_l_hat = 0.0;  ///< smallest Rayleigh quotient seen
    Vector worst_direction;    ///< attains kappa_l_hat; lies in B_q(2 R_q)
    int probes_run = 0;        ///< axis directions plus random directions
    double tau_assumed = 0.0;
};

/**
 * Randomized falsification probe for the restricted eigenvalue condition over B_q(2 R_q).
 *
 * Every axis direction e_j is tried first, then `probes` random directions. Random
 * probe r draws from its own substream hash64(seed, r): a support size from
 * {1, s_eff, 2 s_eff} with s_eff = ceil(R_q (m / log n)^(q/2)) clipped to [1, n]
 * (and to floor(2 R_0) when q = 0), a uniformly random support, Gaussian values,
 * unit l2 normalization, then radial shrinking into B_q(2 R_q) if needed.
 *
 * kappa_l_hat only upper-bounds the restricted minimum: the probe can refute a
 * claimed kappa_l but never certify it. Ties keep the earliest direction.
 * Throws ContractError when gamma is not exactly symmetric.
 */
ReProbeReport re_probe(const Matrix& gamma, const SparsityBudget& budget, int probes, std::uint64_t seed,
                       const ReProbeOptions& opts = {});

}  // namespace eivreg
