#include "eivreg/rates.hpp"

#include <cmath>

#include "eivreg/errors.hpp"

namespace eivreg {

namespace {

void check_common(const RateInputs& in) {
    if (in.shape.n < 2) throw DomainError("rate: n must be at least 2 so that log n > 0");
}

double log_ratio(const RateInputs& in) {
    return std::log(static_cast<double>(in.shape.n)) / static_cast<double>(in.shape.m);
}

double lower_prefactor(const RateInputs& in, double p) {
    const NoiseModel& nm = in.noise;
    const double q = in.budget.q();
    const double base = nm.sigma_z2() * (nm.sigma_x2() * nm.sigma_w2() + nm.sigma_z2() * nm.sigma_e2()) /
                        (nm.sigma_x2() * nm.sigma_x2() * in.kappa_c * in.kappa_c);
    return std::pow(base, (p - q) / 2.0);
}

double upper_prefactor(const RateInputs& in) {
    const NoiseModel& nm = in.noise;
    const double q = in.budget.q();
    return (std::pow(nm.sigma_z(), 2.0 - q) * std::pow(nm.sigma_w() + nm.sigma_e(), 2.0 - q) +
            std::pow(in.kappa_l, 1.0 - q)) /
           std::pow(in.kappa_l, 2.0 - q);
}

void check_lower(const RateInputs& in, double p) {
    check_common(in);
    if (!(p >= 1.0)) throw DomainError("lower_bound_rate: p must be at least 1");
    if (!(p > in.budget.q())) throw DomainError("lower_bound_rate: p must exceed q");
    if (!(in.kappa_c > 0.0)) throw DomainError("lower_bound_rate: kappa_c must be positive");
}

void check_upper(const RateInputs& in) {
    check_common(in);
    if (!(in.kappa_l > 0.0)) throw DomainError("upper_bound_rate: kappa_l must be positive");
}

}  // namespace

double lower_bound_rate(const RateInputs& in) {
    check_lower(in, in.p);
    const double q = in.budget.q();
    return lower_prefactor(in, in.p) * in.budget.radius() * std::pow(log_ratio(in), (in.p - q) / 2.0);
}

double upper_bound_rate(const RateInputs& in) {
    check_upper(in);
    const double q = in.budget.q();
    return upper_prefactor(in) * in.budget.radius() * std::pow(log_ratio(in), 1.0 - q / 2.0);
}

double rate_ratio_p2(const RateInputs& in) {
    check_lower(in, 2.0);
    check_upper(in);
    return upper_prefactor(in) / lower_prefactor(in, 2.0);
}

PowerLawFit fit_rate_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw FitError("fit_rate_exponent: need at least 2 points");
    const double count = static_cast<double>(points.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
            throw FitError("fit_rate_exponent: coordinates must be positive and finite");
        }
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= count;
    my /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        const double dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 1e-300) throw FitError("fit_rate_exponent: x values are all equal");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return PowerLawFit{slope, intercept, r2};
}

}  // namespace eivreg
