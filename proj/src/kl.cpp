#include "eivreg/kl.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "eivreg/errors.hpp"
#include "eivreg/parallel.hpp"
#include "eivreg/random.hpp"

namespace eivreg {

namespace {

void require_nondegenerate(const NoiseModel& noise, const char* where) {
    if (noise.sigma_w2() == 0.0 && noise.sigma_e2() == 0.0) {
        throw DegenerateError(std::string(where) +
                              ": sigma_w = sigma_e = 0 makes y | Z a point mass");
    }
}

void require_unit(const Vector& beta, const char* where) {
    if (std::abs(beta.norm() - 1.0) > 1e-9) {
        throw ContractError(std::string(where) + ": beta must have unit l2 norm (got " +
                            std::to_string(beta.norm()) + ")");
    }
}

void require_shapes(const Vector& beta, const Vector& beta_prime, const Matrix& Z, const char* where) {
    if (beta.size() != beta_prime.size() || Z.cols() != beta.size()) {
        throw DimensionError(std::string(where) + ": Z has " + std::to_string(Z.cols()) +
                             " columns, vectors have lengths " + std::to_string(beta.size()) + " and " +
                             std::to_string(beta_prime.size()));
    }
}

// (sx2 - sx2^2 / sz2) ||b||^2 + se2
double conditional_variance(double norm_sq, const NoiseModel& noise) {
    const double sx2 = noise.sigma_x2();
    return (sx2 - sx2 * sx2 / noise.sigma_z2()) * norm_sq + noise.sigma_e2();
}

struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
};

Moments merge(const Moments& a, const Moments& b) {
    if (a.count == 0.0) return b;
    if (b.count == 0.0) return a;
    Moments out;
    out.count = a.count + b.count;
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * b.count / out.count;
    out.m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / out.count;
    return out;
}

Moments pairwise(const std::vector<Moments>& parts, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return parts[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return merge(pairwise(parts, lo, mid), pairwise(parts, mid, hi));
}

}  // namespace

ConditionalLaw conditional_params(const Vector& beta, const NoiseModel& noise) {
    require_nondegenerate(noise, "conditional_params");
    require_unit(beta, "conditional_params");
    const double sx2 = noise.sigma_x2();
    const double sz2 = noise.sigma_z2();
    return ConditionalLaw{sx2 / sz2, sx2 * noise.sigma_w2() / sz2 + noise.sigma_e2()};
}

double kl_closed_form(const Vector& beta, const Vector& beta_prime, const Matrix& Z,
                      const NoiseModel& noise) {
    require_shapes(beta, beta_prime, Z, "kl_closed_form");
    require_nondegenerate(noise, "kl_closed_form");
    require_unit(beta, "kl_closed_form");
    require_unit(beta_prime, "kl_closed_form");
    const double sx2 = noise.sigma_x2();
    const double sz2 = noise.sigma_z2();
    const double factor =
        sx2 * sx2 / (2.0 * sz2 * (sx2 * noise.sigma_w2() + sz2 * noise.sigma_e2()));
    return factor * (Z * (beta - beta_prime)).squaredNorm();
}

double kl_general_gaussian(const Vector& beta, const Vector& beta_prime, const Matrix& Z,
                           const NoiseModel& noise) {
    require_shapes(beta, beta_prime, Z, "kl_general_gaussian");
    require_nondegenerate(noise, "kl_general_gaussian");
    const double s2 = conditional_variance(beta.squaredNorm(), noise);
    const double s2p = conditional_variance(beta_prime.squaredNorm(), noise);
    if (!(s2 > 0.0) || !(s2p > 0.0)) {
        throw DegenerateError("kl_general_gaussian: conditional variance is not positive");
    }
    const double m = static_cast<double>(Z.rows());
    const double coeff = noise.sigma_x2() / noise.sigma_z2();
    const double mean_gap = (coeff * (Z * (beta - beta_prime))).squaredNorm();
    return 0.5 * m * std::log(s2p / s2) + 0.5 * m * (s2 / s2p - 1.0) + mean_gap / (2.0 * s2p);
}

MonteCarloEstimate kl_monte_carlo(const Vector& beta, const Vector& beta_prime, const Matrix& Z,
                                  const NoiseModel& noise, std::size_t samples, std::uint64_t seed,
                                  unsigned threads) {
    require_shapes(beta, beta_prime, Z, "kl_monte_carlo");
    require_nondegenerate(noise, "kl_monte_carlo");
    if (samples < 1) throw ContractError("kl_monte_carlo: samples must be at least 1");
    const double s2 = conditional_variance(beta.squaredNorm(), noise);
    const double s2p = conditional_variance(beta_prime.squaredNorm(), noise);
    if (!(s2 > 0.0) || !(s2p > 0.0)) {
        throw DegenerateError("kl_monte_carlo: conditional variance is not positive");
    }

    const double coeff = noise.sigma_x2() / noise.sigma_z2();
    const Vector mu = coeff * (Z * beta);
    const Vector gap = mu - coeff * (Z * beta_prime);
    const double sd = std::sqrt(s2);
    const double half_log_ratio = 0.5 * std::log(s2p / s2);
    const Eigen::Index m = Z.rows();

    const std::size_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
    std::vector<Moments> parts(blocks);
    parallel_for(blocks, threads, [&](std::size_t b) {
        Rng rng(hash64(seed, {static_cast<std::uint64_t>(b)}));
        const std::size_t begin = b * kMonteCarloBlock;
        const std::size_t end = std::min(samples, begin + kMonteCarloBlock);
        Moments acc;
        for (std::size_t s = begin; s < end; ++s) {
            double log_ratio = 0.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                const double noise_draw = sd * rng.gaussian();
                const double r = gap[i] + noise_draw;  // y - mu'
                log_ratio += half_log_ratio - noise_draw * noise_draw / (2.0 * s2) + r * r / (2.0 * s2p);
            }
            acc.count += 1.0;
            const double delta = log_ratio - acc.mean;
            acc.mean += delta / acc.count;
            acc.m2 += delta * (log_ratio - acc.mean);
        }
        parts[b] = acc;
    });

    const Moments total = pairwise(parts, 0, parts.size());
    MonteCarloEstimate est;
    est.mean = total.mean;
    est.samples = samples;
    est.std_error = samples > 1 ? std::sqrt(total.m2 / (total.count - 1.0) / total.count) : 0.0;
    return est;
}

}  // namespace eivreg
