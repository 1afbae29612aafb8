#include "eivreg/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "eivreg/errors.hpp"

namespace eivreg {

namespace {

// Indices ordered by decreasing |v_i|, ties by increasing index.
std::vector<Eigen::Index> magnitude_order(const Vector& v) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(v[a]) > std::abs(v[b]); });
    return idx;
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

Vector soft_threshold(const Vector& v, double theta) {
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]) - theta;
        out[i] = a > 0.0 ? sign_of(v[i]) * a : 0.0;
    }
    return out;
}

// Larger root of w + lambda q w^(q-1) = u on [w_min, u]. The left side is convex and
// increasing there, so Newton started at w = u descends monotonically onto the root.
double lq_branch_root(double u, double lambda, double q) {
    if (lambda == 0.0) return u;
    const double w_min = std::pow(lambda * q * (1.0 - q), 1.0 / (2.0 - q));
    double w = u;
    for (int it = 0; it < 200; ++it) {
        const double wq1 = std::pow(w, q - 1.0);
        const double g = w + lambda * q * wq1 - u;
        const double dg = 1.0 - lambda * q * (1.0 - q) * wq1 / w;
        if (g <= 0.0 || dg <= 0.0) break;
        const double next = std::max(w - g / dg, w_min);
        if (w - next <= 1e-15 * u) {
            w = next;
            break;
        }
        w = next;
    }
    return w;
}

}  // namespace

void ProjectionOptions::validate() const {
    if (!(feas_tol > 0.0) || !(bisect_tol > 0.0) || max_cycles < 1) {
        throw DomainError("ProjectionOptions: tolerances must be positive and max_cycles >= 1");
    }
}

Vector project_l1(const Vector& v, double radius) {
    if (!(radius > 0.0)) throw DomainError("project_l1: radius must be positive");
    if (v.lpNorm<1>() <= radius) return v;

    std::vector<double> u(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) u[static_cast<std::size_t>(i)] = std::abs(v[i]);
    std::sort(u.begin(), u.end(), std::greater<>());

    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumsum += u[k];
        const double candidate = (cumsum - radius) / static_cast<double>(k + 1);
        if (u[k] > candidate) theta = candidate;
        else break;
    }
    return soft_threshold(v, theta);
}

Vector project_l0(const Vector& v, std::size_t keep) {
    if (keep < 1) throw DomainError("project_l0: keep must be at least 1");
    if (keep >= static_cast<std::size_t>(v.size())) return v;
    const auto order = magnitude_order(v);
    Vector out = Vector::Zero(v.size());
    for (std::size_t k = 0; k < keep; ++k) out[order[k]] = v[order[k]];
    return out;
}

Vector project_l2_ball(const Vector& v) {
    const double norm = v.norm();
    if (norm <= 1.0) return v;
    return v / norm;
}

Vector project_l1_l2(const Vector& v, double radius, const ProjectionOptions& /*opts*/) {
    Vector l1 = project_l1(v, radius);
    if (l1.norm() <= 1.0) return l1;
    Vector l2 = project_l2_ball(v);
    if (l2.lpNorm<1>() <= radius) return l2;

    // Both constraints active: w = S_t(v) / ||S_t(v)||_2 with ||S_t(v)||_1 / ||S_t(v)||_2 = R.
    // The ratio is nonincreasing in t; it exceeds R at t = 0 and is below R at the
    // l1 threshold.
    const double theta_l1 = std::abs(v.cwiseAbs().maxCoeff() - l1.cwiseAbs().maxCoeff());
    const auto ratio = [&](double t) {
        const Vector s = soft_threshold(v, t);
        return s.lpNorm<1>() / s.norm();
    };
    double lo = 0.0;
    double hi = theta_l1;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (ratio(mid) <= radius ? hi : lo) = mid;
    }
    const Vector s = soft_threshold(v, hi);
    return s / s.norm();
}

Vector project_lq(const Vector& v, double q, double radius, const ProjectionOptions& opts) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("project_lq: q must lie in (0, 1)");
    if (!(radius > 0.0)) throw DomainError("project_lq: radius must be positive");
    if (lq_quasinorm(v, q) <= radius + opts.feas_tol) return v;

    const auto order = magnitude_order(v);
    const std::size_t n = order.size();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::abs(v[order[i]]);
    std::size_t nnz = 0;
    while (nnz < n && u[nnz] > 0.0) ++nnz;

    // tail_sq[k] = sum_{i >= k} u_i^2
    std::vector<double> tail_sq(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) tail_sq[i] = tail_sq[i + 1] + u[i] * u[i];

    double best_dist = std::numeric_limits<double>::infinity();
    std::vector<double> best(n, 0.0);

    // Truncate to the k largest entries, then rescale radially onto the budget.
    double head_q = 0.0;
    double head_sq = 0.0;
    for (std::size_t k = 1; k <= nnz; ++k) {
        head_q += std::pow(u[k - 1], q);
        head_sq += u[k - 1] * u[k - 1];
        const double t = head_q <= radius ? 1.0 : std::pow(radius / head_q, 1.0 / q);
        const double dist = tail_sq[k] + (1.0 - t) * (1.0 - t) * head_sq;
        if (dist < best_dist) {
            best_dist = dist;
            std::fill(best.begin(), best.end(), 0.0);
            for (std::size_t i = 0; i < k; ++i) best[i] = t * u[i];
        }
    }

    // Stationary points of the projection restricted to the k largest entries.
    std::vector<double> w(n);
    const auto branch_sum = [&](std::size_t k, double lambda) {
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            w[i] = lq_branch_root(u[i], lambda, q);
            total += std::pow(w[i], q);
        }
        return total;
    };
    const std::size_t kkt_max = std::min(nnz, kLqKktSupport);
    head_q = 0.0;
    for (std::size_t k = 1; k <= kkt_max; ++k) {
        head_q += std::pow(u[k - 1], q);
        if (head_q <= radius) continue;  // plain truncation already feasible
        const double lambda_max =
            std::pow(u[k - 1] * (1.0 - q) / (2.0 - q), 2.0 - q) / (q * (1.0 - q));
        if (branch_sum(k, lambda_max) > radius) continue;  // no stationary point on this support
        double lo = 0.0;
        double hi = lambda_max;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi || hi - lo <= opts.bisect_tol * hi) break;
            (branch_sum(k, mid) <= radius ? hi : lo) = mid;
        }
        branch_sum(k, hi);
        double dist = tail_sq[k];
        for (std::size_t i = 0; i < k; ++i) dist += (u[i] - w[i]) * (u[i] - w[i]);
        if (dist < best_dist) {
            best_dist = dist;
            std::fill(best.begin(), best.end(), 0.0);
            std::copy(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k), best.begin());
        }
    }

    // Same supports, but the smallest support entry leaves the larger branch: the others
    // sit on the larger root for a multiplier lambda and the last entry takes whatever
    // budget remains. Every point of this curve is feasible; search it over lambda.
    const std::size_t mixed_max = std::min(nnz, kLqMixedSupport);
    const auto mixed_dist = [&](std::size_t k, double lambda) {
        double used = 0.0;
        double dist = tail_sq[k];
        for (std::size_t i = 0; i + 1 < k; ++i) {
            w[i] = lq_branch_root(u[i], lambda, q);
            used += std::pow(w[i], q);
            dist += (u[i] - w[i]) * (u[i] - w[i]);
        }
        if (used > radius) return std::numeric_limits<double>::infinity();
        w[k - 1] = std::min(std::pow(radius - used, 1.0 / q), u[k - 1]);
        return dist + (u[k - 1] - w[k - 1]) * (u[k - 1] - w[k - 1]);
    };
    for (std::size_t k = 2; k <= mixed_max; ++k) {
        if (tail_sq[k] >= best_dist) continue;
        const double lambda_max =
            std::pow(u[k - 2] * (1.0 - q) / (2.0 - q), 2.0 - q) / (q * (1.0 - q));
        constexpr int kScan = 32;
        const double log_lo = std::log(lambda_max) - 20.0;
        const double step = 20.0 / (kScan - 1);
        int arg = 0;
        double arg_dist = std::numeric_limits<double>::infinity();
        for (int j = 0; j < kScan; ++j) {
            const double d = mixed_dist(k, std::exp(log_lo + step * j));
            if (d < arg_dist) {
                arg_dist = d;
                arg = j;
            }
        }
        if (!std::isfinite(arg_dist)) continue;
        // Golden-section refinement on log(lambda) around the best scan point.
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = log_lo + step * std::max(arg - 1, 0);
        double b = log_lo + step * std::min(arg + 1, kScan - 1);
        double c = b - phi * (b - a);
        double d = a + phi * (b - a);
        double fc = mixed_dist(k, std::exp(c));
        double fd = mixed_dist(k, std::exp(d));
        for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = mixed_dist(k, std::exp(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = mixed_dist(k, std::exp(d));
            }
        }
        double lambda = std::exp(log_lo + step * arg);
        if (std::min(fc, fd) < arg_dist) lambda = std::exp(fc < fd ? c : d);
        const double dist = mixed_dist(k, lambda);
        if (dist < best_dist) {
            best_dist = dist;
            std::fill(best.begin(), best.end(), 0.0);
            std::copy(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k), best.begin());
        }
    }

    Vector out = Vector::Zero(v.size());
    for (std::size_t i = 0; i < n; ++i) out[order[i]] = sign_of(v[order[i]]) * best[i];
    const double total = lq_quasinorm(out, q);
    if (total > radius + opts.feas_tol) out *= std::pow(radius / total, 1.0 / q);
    return out;
}

Vector project_constraint_set(const Vector& v, const SparsityBudget& budget,
                              const ProjectionOptions& opts) {
    const double q = budget.q();
    if (q == 1.0) return project_l1_l2(v, budget.radius(), opts);

    const auto project_q = [&](const Vector& x) {
        return q == 0.0 ? project_l0(x, budget.support_size())
                        : project_lq(x, q, budget.radius(), opts);
    };
    Vector current = v;
    for (int cycle = 0; cycle < opts.max_cycles; ++cycle) {
        Vector next = project_l2_ball(project_q(current));
        const double change = (next - current).norm();
        current = std::move(next);
        if (change < opts.bisect_tol) break;
    }
    return current;
}

}  // namespace eivreg
