#pragma once

#include <utility>
#include <vector>

#include "eivreg/model.hpp"

namespace eivreg {

// All rate expressions are evaluated with their unspecified leading constants set to 1,
// i.e. they are meaningful only up to constants.

struct RateInputs {
    double p;
    SparsityBudget budget;
    ProblemShape shape;
    NoiseModel noise;
    double kappa_c;
    double kappa_l;
};

/// [sz2 (sx2 sw2 + sz2 se2) / (sx2^2 kc^2)]^((p-q)/2) R_q (log n / m)^((p-q)/2).
double lower_bound_rate(const RateInputs& in);

/// [(sz^(2-q) (sw + se)^(2-q) + kl^(1-q)) / kl^(2-q)] R_q (log n / m)^(1 - q/2).
double upper_bound_rate(const RateInputs& in);

/// upper_bound_rate / lower_bound_rate at p = 2. The shared factor R_q (log n / m)^(1 - q/2)
/// cancels, so only the two prefactors are evaluated.
double rate_ratio_p2(const RateInputs& in);

struct PowerLawFit {
    double slope;
    double intercept;
    double r2;
};

/// Ordinary least squares of log y on log x.
PowerLawFit fit_rate_exponent(const std::vector<std::pair<double, double>>& points);

}  // namespace eivreg
