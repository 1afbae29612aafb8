#pragma once

#include "eivreg/model.hpp"

namespace eivreg {

/// Bias-corrected moments: gamma estimates Sigma_x, upsilon estimates Sigma_x * beta_star.
struct SurrogatePair {
    Matrix gamma;
    Vector upsilon;

    std::size_t n() const { return static_cast<std::size_t>(upsilon.size()); }
};

/// sym(Z^T Z / m) - sigma_w2 * I. Each entry is one column-pair dot product,
/// computed once for i <= j and mirrored, so the result is exactly symmetric.
/// The result may be indefinite when sigma_w2 > 0.
Matrix compute_gamma(const Matrix& Z, double sigma_w2);

/// Z^T y / m.
Vector compute_upsilon(const Matrix& Z, const Vector& y);

SurrogatePair make_surrogates(const Dataset& data, double sigma_w2);

/// ||upsilon - gamma * beta_star||_inf.
double deviation_inf(const SurrogatePair& pair, const Vector& beta_star);

}  // namespace eivreg
