#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

namespace eivreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Entries with magnitude at or below this count as zero for q = 0.
inline constexpr double kZeroThreshold = 1e-12;

/**
 * Variances of the Gaussian data model: X entries ~ N(0, sigma_x2),
 * W entries ~ N(0, sigma_w2), e entries ~ N(0, sigma_e2).
 */
class NoiseModel {
public:
    NoiseModel(double sigma_x2, double sigma_w2, double sigma_e2);

    double sigma_x2() const { return sigma_x2_; }
    double sigma_w2() const { return sigma_w2_; }
    double sigma_e2() const { return sigma_e2_; }
    double sigma_z2() const { return sigma_x2_ + sigma_w2_; }

    double sigma_x() const;
    double sigma_w() const;
    double sigma_e() const;
    double sigma_z() const;

private:
    double sigma_x2_;
    double sigma_w2_;
    double sigma_e2_;
};

/// The l_q-ball constraint {beta : sum |beta_j|^q <= radius}, q in [0, 1].
class SparsityBudget {
public:
    SparsityBudget(double q, double radius);

    double q() const { return q_; }
    double radius() const { return radius_; }

    /// Number of nonzeros allowed when q = 0.
    std::size_t support_size() const;

private:
    double q_;
    double radius_;
};

struct ProblemShape {
    std::size_t m;  ///< samples
    std::size_t n;  ///< ambient dimension

    ProblemShape(std::size_t m, std::size_t n);
};

struct HiddenTruth {
    Matrix X;
    Matrix W;
    Vector e;
    Vector beta_star;
};

/// Observed pair (Z, y) plus optional ground truth.
struct Dataset {
    Matrix Z;
    Vector y;
    std::optional<HiddenTruth> hidden;

    std::size_t m() const { return static_cast<std::size_t>(Z.rows()); }
    std::size_t n() const { return static_cast<std::size_t>(Z.cols()); }
};

/// L_p(beta_hat, beta_star) = ||beta_hat - beta_star||_p^p, p >= 1.
double lp_loss(const Vector& beta_hat, const Vector& beta_star, double p);

/// sum_j |beta_j|^q for q in (0, 1]; number of entries above kZeroThreshold for q = 0.
double lq_quasinorm(const Vector& beta, double q);

/// Membership in B_q(R_q) intersected with the closed unit l2-ball, up to tol.
bool in_constraint_set(const Vector& beta, const SparsityBudget& budget, double tol);

}  // namespace eivreg
