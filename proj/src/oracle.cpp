#include "eivreg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "eivreg/errors.hpp"

namespace eivreg {

namespace {

bool lex_less(const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

struct Best {
    Vector point;
    double value = std::numeric_limits<double>::infinity();

    void offer(const Vector& candidate, double v) {
        if (v < value || (v == value && lex_less(candidate, point))) {
            point = candidate;
            value = v;
        }
    }
};

// Walk every point of a resolution^dim grid, calling visit(point).
template <typename Visit>
void for_each_grid_point(Eigen::Index dim, const GridSpec& grid, Visit&& visit) {
    const int half = (grid.resolution - 1) / 2;
    const double pitch = grid.box_radius / half;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    Vector point(dim);
    if (dim == 0) {
        visit(point);
        return;
    }
    for (;;) {
        for (Eigen::Index d = 0; d < dim; ++d) point[d] = (idx[static_cast<std::size_t>(d)] - half) * pitch;
        visit(point);
        Eigen::Index d = dim - 1;
        while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == grid.resolution) {
            idx[static_cast<std::size_t>(d)] = 0;
            --d;
        }
        if (d < 0) break;
    }
}

double quad(const Matrix& gamma, const Vector& upsilon, const Vector& x) {
    return 0.5 * x.dot(gamma * x) - upsilon.dot(x);
}

}  // namespace

void GridSpec::validate() const {
    if (resolution < 3 || resolution % 2 == 0) {
        throw DomainError("GridSpec: resolution must be odd and at least 3");
    }
    if (!(box_radius > 0.0)) throw DomainError("GridSpec: box_radius must be positive");
}

OracleResult grid_minimize(const Matrix& gamma, const Vector& upsilon, const SparsityBudget& budget,
                           const GridSpec& grid) {
    grid.validate();
    const Eigen::Index n = upsilon.size();
    if (n > 3) throw CapacityError("grid_minimize: n = " + std::to_string(n) + " exceeds 3");
    if (gamma.rows() != n || gamma.cols() != n) throw DimensionError("grid_minimize: gamma/upsilon mismatch");

    const auto feasible_q = [&](const Vector& x) {
        return lq_quasinorm(x, budget.q()) <= budget.radius() + kGridFeasTol;
    };
    Best best;
    best.point = Vector::Zero(n);
    for_each_grid_point(n, grid, [&](const Vector& x) {
        if (!feasible_q(x)) return;
        const double norm = x.norm();
        if (norm <= 1.0 + kGridFeasTol) {
            best.offer(x, quad(gamma, upsilon, x));
        } else {
            const Vector s = x / norm;
            if (feasible_q(s)) best.offer(s, quad(gamma, upsilon, s));
        }
    });
    return OracleResult{best.point, best.value};
}

OracleResult support_enumerate_minimize(const Matrix& gamma, const Vector& upsilon, std::size_t R0,
                                        const GridSpec& grid) {
    grid.validate();
    const auto n = static_cast<std::size_t>(upsilon.size());
    if (R0 < 1) throw DomainError("support_enumerate_minimize: R0 must be at least 1");
    if (n > 12 || R0 > 3) {
        throw CapacityError("support_enumerate_minimize: requires n <= 12 and R0 <= 3 (got n = " +
                            std::to_string(n) + ", R0 = " + std::to_string(R0) + ")");
    }
    if (static_cast<std::size_t>(gamma.rows()) != n || static_cast<std::size_t>(gamma.cols()) != n) {
        throw DimensionError("support_enumerate_minimize: gamma/upsilon mismatch");
    }
    const std::size_t k = std::min(R0, n);

    Best best;
    best.point = Vector::Zero(static_cast<Eigen::Index>(n));
    best.value = 0.0;

    // Supports in lexicographic order.
    std::vector<std::size_t> support(k);
    for (std::size_t i = 0; i < k; ++i) support[i] = i;
    const auto dim = static_cast<Eigen::Index>(k);
    Matrix g_sub(dim, dim);
    Vector u_sub(dim);
    Vector full = Vector::Zero(static_cast<Eigen::Index>(n));
    for (;;) {
        for (Eigen::Index a = 0; a < dim; ++a) {
            u_sub[a] = upsilon[static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)])];
            for (Eigen::Index b = 0; b < dim; ++b) {
                g_sub(a, b) = gamma(static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)]),
                                    static_cast<Eigen::Index>(support[static_cast<std::size_t>(b)]));
            }
        }
        const auto offer = [&](const Vector& x) {
            full.setZero();
            for (Eigen::Index a = 0; a < dim; ++a) {
                full[static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)])] = x[a];
            }
            best.offer(full, quad(g_sub, u_sub, x));
        };
        for_each_grid_point(dim, grid, [&](const Vector& x) {
            const double norm = x.norm();
            if (norm <= 1.0 + kGridFeasTol) offer(x);
            else offer(x / norm);
        });

        // Advance to the next k-subset.
        std::size_t i = k;
        while (i > 0 && support[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++support[i - 1];
        for (std::size_t j = i; j < k; ++j) support[j] = support[j - 1] + 1;
    }
    return OracleResult{best.point, best.value};
}

}  // namespace eivreg
