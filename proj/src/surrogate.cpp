#include "eivreg/surrogate.hpp"

#include <string>

#include "eivreg/errors.hpp"

namespace eivreg {

Matrix compute_gamma(const Matrix& Z, double sigma_w2) {
    if (Z.rows() < 1) throw DimensionError("compute_gamma: Z must have at least one row");
    if (!(sigma_w2 >= 0.0)) throw DomainError("compute_gamma: sigma_w2 must be nonnegative");
    const Eigen::Index n = Z.cols();
    const double inv_m = 1.0 / static_cast<double>(Z.rows());
    Matrix gamma(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double v = Z.col(i).dot(Z.col(j)) * inv_m;
            gamma(i, j) = v;
            gamma(j, i) = v;
        }
        gamma(j, j) -= sigma_w2;
    }
    return gamma;
}

Vector compute_upsilon(const Matrix& Z, const Vector& y) {
    if (Z.rows() != y.size()) {
        throw DimensionError("compute_upsilon: Z has " + std::to_string(Z.rows()) +
                             " rows, y has length " + std::to_string(y.size()));
    }
    if (Z.rows() < 1) throw DimensionError("compute_upsilon: Z must have at least one row");
    const double inv_m = 1.0 / static_cast<double>(Z.rows());
    Vector out(Z.cols());
    for (Eigen::Index j = 0; j < Z.cols(); ++j) out[j] = Z.col(j).dot(y) * inv_m;
    return out;
}

SurrogatePair make_surrogates(const Dataset& data, double sigma_w2) {
    return SurrogatePair{compute_gamma(data.Z, sigma_w2), compute_upsilon(data.Z, data.y)};
}

double deviation_inf(const SurrogatePair& pair, const Vector& beta_star) {
    if (pair.gamma.cols() != beta_star.size() || pair.upsilon.size() != beta_star.size()) {
        throw DimensionError("deviation_inf: beta_star has length " +
                             std::to_string(beta_star.size()) + ", surrogates have dimension " +
                             std::to_string(pair.upsilon.size()));
    }
    if (beta_star.size() == 0) return 0.0;
    return (pair.upsilon - pair.gamma * beta_star).cwiseAbs().maxCoeff();
}

}  // namespace eivreg
