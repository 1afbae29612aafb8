#pragma once

#include <cstddef>

#include "eivreg/model.hpp"

namespace eivreg {

// Brute-force reference minimizers for tiny problems. Test support only.

struct GridSpec {
    int resolution = 401;  ///< points per axis; odd so that 0 is on the grid
    double box_radius = 1.0;

    void validate() const;
};

struct OracleResult {
    Vector beta;
    double objective;
};

/// Slack used when admitting grid points; covers rounding in the coordinates only.
inline constexpr double kGridFeasTol = 1e-12;

/**
 * Minimize 0.5 b'Gb - u'b over a Cartesian grid on [-r, r]^n (n <= 3), keeping
 * points in B_q(R_q) and the unit l2-ball. Grid points outside the l2-ball are
 * also tried after radial scaling onto the unit sphere, so sphere-constrained
 * optima are resolved to second order in the pitch. Ties go to the
 * lexicographically smallest point. Throws CapacityError for n > 3.
 */
OracleResult grid_minimize(const Matrix& gamma, const Vector& upsilon, const SparsityBudget& budget,
                           const GridSpec& grid);

/**
 * Exact-sparsity reference: for every support of size min(R0, n) (smaller supports
 * are contained in these, since 0 is on the grid) minimize the restricted quadratic
 * over the grid inside the unit l2-ball, sphere images included as above.
 * Requires n <= 12 and R0 <= 3, otherwise CapacityError.
 */
OracleResult support_enumerate_minimize(const Matrix& gamma, const Vector& upsilon, std::size_t R0,
                                        const GridSpec& grid);

}  // namespace eivreg
