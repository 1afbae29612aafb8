#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "eivreg/model.hpp"

namespace eivreg {

struct SignalSpec {
    std::size_t n;
    SparsityBudget budget;
    std::uint64_t seed;
};

/**
 * Draw a unit-l2 ground-truth vector inside B_q(R_q).
 *
 * q = 0: flat magnitudes 1/sqrt(k) on a random support of size k = min(floor(R_0), n).
 * q in (0, 1]: magnitudes j^(-alpha) placed on a random permutation with random
 * signs, normalized to unit l2. alpha is the smallest value >= 1/q + 0.01 meeting
 * the budget (bisection). If even alpha = kMaxDecay misses the budget, a flat
 * k-sparse vector with k^(1 - q/2) <= R_q is returned instead.
 *
 * Throws ConstructionError when R_q < 1 (no unit vector fits).
 */
Vector generate_signal(const SignalSpec& spec);

/// Steepest polynomial decay tried before falling back to a flat sparse signal.
inline constexpr double kMaxDecay = 40.0;

/**
 * Sample (X, W, e) and form Z = X + W, y = X beta_star + e.
 *
 * Draw order from a single Rng(seed), one row at a time: X_i (n draws), W_i (n draws),
 * then e_i. A dataset with fewer rows is therefore a row prefix of one with more
 * rows under the same seed.
 * y_i accumulates X_ij * beta_j over ascending j before adding e_i.
 */
Dataset generate_dataset(const ProblemShape& shape, const NoiseModel& noise,
                         const Vector& beta_star, std::uint64_t seed, bool keep_hidden = true);

/// X * beta with row-wise ascending-index accumulation (the order used for y).
Vector design_times(const Matrix& X, const Vector& beta);

struct DatasetFile {
    Dataset data;
    NoiseModel noise;
    std::uint64_t seed;
};

/// Plain-text dump; layout documented in README. Values written with 17 significant digits.
void save_dataset(std::ostream& out, const Dataset& data, const NoiseModel& noise, std::uint64_t seed);
void save_dataset(const std::string& path, const Dataset& data, const NoiseModel& noise,
                  std::uint64_t seed);
DatasetFile load_dataset(std::istream& in);
DatasetFile load_dataset(const std::string& path);

}  // namespace eivreg
