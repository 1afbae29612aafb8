#include "eivreg/model.hpp"

#include <cmath>
#include <string>

#include "eivreg/errors.hpp"

namespace eivreg {

NoiseModel::NoiseModel(double sigma_x2, double sigma_w2, double sigma_e2)
    : sigma_x2_(sigma_x2), sigma_w2_(sigma_w2), sigma_e2_(sigma_e2) {
    if (!(sigma_x2 > 0.0) || !std::isfinite(sigma_x2)) {
        throw DomainError("NoiseModel: sigma_x2 must be positive and finite");
    }
    if (!(sigma_w2 >= 0.0) || !std::isfinite(sigma_w2)) {
        throw DomainError("NoiseModel: sigma_w2 must be nonnegative and finite");
    }
    if (!(sigma_e2 >= 0.0) || !std::isfinite(sigma_e2)) {
        throw DomainError("NoiseModel: sigma_e2 must be nonnegative and finite");
    }
}

double NoiseModel::sigma_x() const { return std::sqrt(sigma_x2_); }
double NoiseModel::sigma_w() const { return std::sqrt(sigma_w2_); }
double NoiseModel::sigma_e() const { return std::sqrt(sigma_e2_); }
double NoiseModel::sigma_z() const { return std::sqrt(sigma_z2()); }

SparsityBudget::SparsityBudget(double q, double radius) : q_(q), radius_(radius) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw DomainError("SparsityBudget: q must lie in [0, 1]");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw DomainError("SparsityBudget: radius must be positive and finite");
    }
}

std::size_t SparsityBudget::support_size() const {
    return static_cast<std::size_t>(std::floor(radius_));
}

ProblemShape::ProblemShape(std::size_t m_, std::size_t n_) : m(m_), n(n_) {
    if (m == 0 || n == 0) {
        throw DomainError("ProblemShape: m and n must be at least 1");
    }
}

double lp_loss(const Vector& beta_hat, const Vector& beta_star, double p) {
    if (beta_hat.size() != beta_star.size()) {
        throw DimensionError("lp_loss: vectors have lengths " + std::to_string(beta_hat.size()) +
                             " and " + std::to_string(beta_star.size()));
    }
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw DomainError("lp_loss: p must lie in [1, inf)");
    }
    double total = 0.0;
    for (Eigen::Index j = 0; j < beta_hat.size(); ++j) {
        const double d = std::abs(beta_hat[j] - beta_star[j]);
        total += (p == 1.0) ? d : (p == 2.0 ? d * d : std::pow(d, p));
    }
    return total;
}

double lq_quasinorm(const Vector& beta, double q) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw DomainError("lq_quasinorm: q must lie in [0, 1]");
    }
    double total = 0.0;
    if (q == 0.0) {
        for (Eigen::Index j = 0; j < beta.size(); ++j) {
            if (std::abs(beta[j]) > kZeroThreshold) total += 1.0;
        }
        return total;
    }
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double a = std::abs(beta[j]);
        total += (q == 1.0) ? a : std::pow(a, q);
    }
    return total;
}

bool in_constraint_set(const Vector& beta, const SparsityBudget& budget, double tol) {
    return lq_quasinorm(beta, budget.q()) <= budget.radius() + tol && beta.norm() <= 1.0 + tol;
}

}  // namespace eivreg
