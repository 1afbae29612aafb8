#include "eivreg/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "eivreg/errors.hpp"
#include "eivreg/random.hpp"

namespace eivreg {

namespace {

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

// sum_j (a_j / ||a||_2)^q for a_j = j^(-alpha), j = 1..n.
double decay_quasinorm(std::size_t n, double alpha, double q) {
    double sq = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double a = std::exp(-alpha * std::log(static_cast<double>(j)));
        sq += a * a;
    }
    const double norm = std::sqrt(sq);
    double total = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double a = std::exp(-alpha * std::log(static_cast<double>(j))) / norm;
        total += std::pow(a, q);
    }
    return total;
}

Vector place(const std::vector<double>& magnitudes, std::size_t n, Rng& rng) {
    const auto perm = random_permutation(n, rng);
    Vector beta = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < magnitudes.size(); ++j) {
        const double sign = rng.coin() ? 1.0 : -1.0;
        beta[static_cast<Eigen::Index>(perm[j])] = sign * magnitudes[j];
    }
    return beta;
}

Vector flat_signal(std::size_t n, std::size_t k, Rng& rng) {
    const std::vector<double> mags(k, 1.0 / std::sqrt(static_cast<double>(k)));
    return place(mags, n, rng);
}

void write_block(std::ostream& out, const Matrix& a) {
    char buf[32];
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    }
}

void write_vector(std::ostream& out, const Vector& v) {
    char buf[32];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        out << (i ? " " : "") << buf;
    }
    out << '\n';
}

double read_double(std::istream& in) {
    std::string token;
    if (!(in >> token)) throw IoError("load_dataset: unexpected end of input");
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        throw IoError("load_dataset: malformed number '" + token + "'");
    }
    if (used != token.size()) throw IoError("load_dataset: malformed number '" + token + "'");
    return value;
}

Matrix read_block(std::istream& in, std::size_t rows, std::size_t cols) {
    Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = read_double(in);
    return a;
}

Vector read_vector(std::istream& in, std::size_t len) {
    Vector v(static_cast<Eigen::Index>(len));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = read_double(in);
    return v;
}

void expect(std::istream& in, const std::string& word) {
    std::string token;
    if (!(in >> token) || token != word) {
        throw IoError("load_dataset: expected '" + word + "', found '" + token + "'");
    }
}

constexpr const char* kMagic = "eivreg-dataset";
constexpr const char* kVersion = "v1";

}  // namespace

Vector generate_signal(const SignalSpec& spec) {
    const double q = spec.budget.q();
    const double radius = spec.budget.radius();
    if (spec.n == 0) throw ConstructionError("generate_signal: n must be at least 1");
    if (q == 0.0 && radius < 1.0) {
        throw ConstructionError("generate_signal: q = 0 requires R_0 >= 1 (got " +
                                std::to_string(radius) + ")");
    }
    if (q > 0.0 && radius < 1.0) {
        throw ConstructionError(
            "generate_signal: a unit-l2 vector has ||beta||_q^q >= 1, so R_q >= 1 is required (got " +
            std::to_string(radius) + ")");
    }

    Rng rng(spec.seed);
    if (q == 0.0) {
        return flat_signal(spec.n, std::min(spec.budget.support_size(), spec.n), rng);
    }

    const double alpha_min = 1.0 / q + 0.01;
    const auto fits = [&](double alpha) { return decay_quasinorm(spec.n, alpha, q) <= radius; };

    double alpha = alpha_min;
    bool use_decay = true;
    if (!fits(alpha_min)) {
        if (alpha_min >= kMaxDecay || !fits(kMaxDecay)) {
            use_decay = false;
        } else {
            double lo = alpha_min;
            double hi = kMaxDecay;
            for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
                const double mid = 0.5 * (lo + hi);
                (fits(mid) ? hi : lo) = mid;
            }
            alpha = hi;
        }
    }

    if (!use_decay) {
        // Largest k with k^(1 - q/2) <= R_q, capped at n.
        std::size_t k = 1;
        while (k < spec.n && std::pow(static_cast<double>(k + 1), 1.0 - q / 2.0) <= radius) ++k;
        return flat_signal(spec.n, k, rng);
    }

    std::vector<double> mags(spec.n);
    double sq = 0.0;
    for (std::size_t j = 0; j < spec.n; ++j) {
        mags[j] = std::exp(-alpha * std::log(static_cast<double>(j + 1)));
        sq += mags[j] * mags[j];
    }
    const double norm = std::sqrt(sq);
    for (double& a : mags) a /= norm;
    return place(mags, spec.n, rng);
}

Vector design_times(const Matrix& X, const Vector& beta) {
    if (X.cols() != beta.size()) {
        throw DimensionError("design_times: X has " + std::to_string(X.cols()) +
                             " columns, beta has length " + std::to_string(beta.size()));
    }
    Vector out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < X.cols(); ++j) s += X(i, j) * beta[j];
        out[i] = s;
    }
    return out;
}

Dataset generate_dataset(const ProblemShape& shape, const NoiseModel& noise,
                         const Vector& beta_star, std::uint64_t seed, bool keep_hidden) {
    const auto m = static_cast<Eigen::Index>(shape.m);
    const auto n = static_cast<Eigen::Index>(shape.n);
    if (beta_star.size() != n) {
        throw DimensionError("generate_dataset: beta_star has length " +
                             std::to_string(beta_star.size()) + ", expected " + std::to_string(n));
    }
    Rng rng(seed);
    const double sx = noise.sigma_x();
    const double sw = noise.sigma_w();
    const double se = noise.sigma_e();

    Matrix X(m, n);
    Matrix W(m, n);
    Vector e(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) X(i, j) = sx * rng.gaussian();
        for (Eigen::Index j = 0; j < n; ++j) W(i, j) = sw * rng.gaussian();
        e[i] = se * rng.gaussian();
    }

    Dataset data;
    data.Z = X + W;
    data.y = design_times(X, beta_star) + e;
    if (keep_hidden) {
        data.hidden = HiddenTruth{std::move(X), std::move(W), std::move(e), beta_star};
    }
    return data;
}

void save_dataset(std::ostream& out, const Dataset& data, const NoiseModel& noise, std::uint64_t seed) {
    char buf[96];
    out << kMagic << ' ' << kVersion << '\n';
    out << "shape " << data.m() << ' ' << data.n() << '\n';
    std::snprintf(buf, sizeof buf, "noise %.17g %.17g %.17g", noise.sigma_x2(), noise.sigma_w2(),
                  noise.sigma_e2());
    out << buf << '\n';
    out << "seed " << seed << '\n';
    out << "Z\n";
    write_block(out, data.Z);
    out << "y\n";
    write_vector(out, data.y);
    out << "hidden " << (data.hidden ? 1 : 0) << '\n';
    if (data.hidden) {
        out << "X\n";
        write_block(out, data.hidden->X);
        out << "W\n";
        write_block(out, data.hidden->W);
        out << "e\n";
        write_vector(out, data.hidden->e);
        out << "beta_star\n";
        write_vector(out, data.hidden->beta_star);
    }
    if (!out) throw IoError("save_dataset: write failed");
}

void save_dataset(const std::string& path, const Dataset& data, const NoiseModel& noise,
                  std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw IoError("save_dataset: cannot open " + path);
    save_dataset(out, data, noise, seed);
}

DatasetFile load_dataset(std::istream& in) {
    expect(in, kMagic);
    expect(in, kVersion);
    expect(in, "shape");
    std::size_t m = 0;
    std::size_t n = 0;
    if (!(in >> m >> n)) throw IoError("load_dataset: malformed shape line");
    const ProblemShape shape(m, n);
    expect(in, "noise");
    const double sx2 = read_double(in);
    const double sw2 = read_double(in);
    const double se2 = read_double(in);
    NoiseModel noise(sx2, sw2, se2);
    expect(in, "seed");
    std::uint64_t seed = 0;
    if (!(in >> seed)) throw IoError("load_dataset: malformed seed");

    Dataset data;
    expect(in, "Z");
    data.Z = read_block(in, shape.m, shape.n);
    expect(in, "y");
    data.y = read_vector(in, shape.m);
    expect(in, "hidden");
    int hidden = 0;
    if (!(in >> hidden)) throw IoError("load_dataset: malformed hidden flag");
    if (hidden) {
        HiddenTruth truth;
        expect(in, "X");
        truth.X = read_block(in, shape.m, shape.n);
        expect(in, "W");
        truth.W = read_block(in, shape.m, shape.n);
        expect(in, "e");
        truth.e = read_vector(in, shape.m);
        expect(in, "beta_star");
        truth.beta_star = read_vector(in, shape.n);
        data.hidden = std::move(truth);
    }
    return DatasetFile{std::move(data), noise, seed};
}

DatasetFile load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_dataset: cannot open " + path);
    return load_dataset(in);
}

}  // namespace eivreg
