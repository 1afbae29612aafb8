#pragma once

#include <cstddef>

#include "eivreg/model.hpp"

namespace eivreg {

struct ProjectionOptions {
    double feas_tol = 1e-9;
    int max_cycles = 100;
    double bisect_tol = 1e-12;

    void validate() const;
};

/// Exact Euclidean projection onto {||w||_1 <= R} (sort-and-scan soft threshold).
Vector project_l1(const Vector& v, double radius);

/// Keep the `keep` largest-magnitude entries; ties go to the lower index.
Vector project_l0(const Vector& v, std::size_t keep);

/// Radial clip onto the closed unit l2-ball.
Vector project_l2_ball(const Vector& v);

/// Exact projection onto {||w||_1 <= R} intersected with the unit l2-ball.
Vector project_l1_l2(const Vector& v, double radius, const ProjectionOptions& opts = {});

/**
 * Approximate projection onto the nonconvex ball {sum |w_j|^q <= R}, q in (0, 1).
 *
 * Returns the candidate nearest to v among: radial rescaling of v; for every k,
 * the k largest entries radially rescaled onto the budget; and for k up to
 * kLqKktSupport, the stationary point of the projection restricted to the k
 * largest entries (common multiplier found by bisection, each coordinate on the
 * larger root of w + lambda q w^(q-1) = |v_j|); and for k up to kLqMixedSupport, the
 * best point found by a one-dimensional search over lambda when the smallest of the k
 * entries instead absorbs the remaining budget. Not guaranteed globally optimal.
 */
Vector project_lq(const Vector& v, double q, double radius, const ProjectionOptions& opts = {});

inline constexpr std::size_t kLqKktSupport = 64;
inline constexpr std::size_t kLqMixedSupport = 32;

/// Projection onto B_q(R_q) intersected with the unit l2-ball. Exact for q in {0, 1}.
Vector project_constraint_set(const Vector& v, const SparsityBudget& budget,
                              const ProjectionOptions& opts = {});

}  // namespace eivreg
