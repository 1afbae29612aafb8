#include <algorithm>
#include <functional>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <gtest/gtest.h>

#include "eivreg/datagen.hpp"
#include "eivreg/errors.hpp"
#include "eivreg/random.hpp"

using namespace eivreg;

namespace {

int nonzeros(const Vector& v) {
    int k = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) k += v[i] != 0.0;
    return k;
}

bool is_signed_one_hot(const Vector& v) {
    return nonzeros(v) == 1 && std::abs(v.cwiseAbs().maxCoeff() - 1.0) == 0.0;
}

}  // namespace

TEST(GenerateSignal, ExactSparseOneHot) {
    const Vector b = generate_signal(SignalSpec{8, SparsityBudget(0.0, 1.0), 3});
    EXPECT_TRUE(is_signed_one_hot(b));
}

TEST(GenerateSignal, L1RadiusOneForcesOneHot) {
    const Vector b = generate_signal(SignalSpec{4, SparsityBudget(1.0, 1.0), 3});
    EXPECT_TRUE(is_signed_one_hot(b));
}

TEST(GenerateSignal, WeakSparseDecay) {
    const Vector b = generate_signal(SignalSpec{64, SparsityBudget(0.5, 2.0), 7});
    EXPECT_NEAR(b.norm(), 1.0, 1e-12);
    EXPECT_LE(lq_quasinorm(b, 0.5), 2.0 + 1e-9);
    // Decay spreads mass over more than one coordinate.
    EXPECT_GT(nonzeros(b), 1);
    Vector mags = b.cwiseAbs();
    std::sort(mags.data(), mags.data() + mags.size(), std::greater<>());
    for (Eigen::Index i = 1; i < mags.size(); ++i) EXPECT_LE(mags[i], mags[i - 1]);
}

TEST(GenerateSignal, SupportSizeForExactSparsity) {
    EXPECT_EQ(nonzeros(generate_signal(SignalSpec{100, SparsityBudget(0.0, 5.9), 1})), 5);
    EXPECT_EQ(nonzeros(generate_signal(SignalSpec{3, SparsityBudget(0.0, 5.0), 1})), 3);
}

TEST(GenerateSignal, InfeasibleBudget) {
    EXPECT_THROW(generate_signal(SignalSpec{10, SparsityBudget(0.0, 0.5), 1}), ConstructionError);
    EXPECT_THROW(generate_signal(SignalSpec{10, SparsityBudget(0.7, 0.99), 1}), ConstructionError);
}

TEST(GenerateSignal, Deterministic) {
    const SignalSpec spec{50, SparsityBudget(0.3, 4.0), 99};
    const Vector a = generate_signal(spec);
    const Vector b = generate_signal(spec);
    EXPECT_EQ(a, b);
}

TEST(GenerateSignal, RandomFeasibleBudgetsAreFeasible) {
    Rng rng(2024);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng.below(200);
        const double q = (t % 4 == 0) ? 0.0 : rng.uniform();
        const double radius = 1.0 + 9.0 * rng.uniform();
        const SparsityBudget budget(q, radius);
        const Vector b = generate_signal(SignalSpec{n, budget, rng.below(1u << 30)});
        ASSERT_EQ(static_cast<std::size_t>(b.size()), n);
        EXPECT_NEAR(b.norm(), 1.0, 1e-12);
        EXPECT_TRUE(in_constraint_set(b, budget, 1e-9)) << "q=" << q << " R=" << radius << " n=" << n;
        if (q == 0.0) {
            EXPECT_EQ(static_cast<std::size_t>(nonzeros(b)), std::min(budget.support_size(), n));
        }
    }
}

TEST(GenerateDataset, ZeroCorruptionGivesZEqualX) {
    const Vector beta = generate_signal(SignalSpec{6, SparsityBudget(0.0, 2.0), 1});
    const Dataset d = generate_dataset(ProblemShape(30, 6), NoiseModel(1.0, 0.0, 0.3), beta, 5);
    ASSERT_TRUE(d.hidden);
    EXPECT_EQ(d.Z, d.hidden->X);
}

TEST(GenerateDataset, NoiselessResponse) {
    const Vector beta = generate_signal(SignalSpec{6, SparsityBudget(1.0, 2.0), 1});
    const Dataset d = generate_dataset(ProblemShape(30, 6), NoiseModel(1.0, 0.5, 0.0), beta, 5);
    EXPECT_EQ(d.y, design_times(d.hidden->X, beta));
}

TEST(GenerateDataset, ExactIdentities) {
    const Vector beta = generate_signal(SignalSpec{9, SparsityBudget(0.5, 3.0), 4});
    const Dataset d = generate_dataset(ProblemShape(40, 9), NoiseModel(2.0, 0.7, 0.4), beta, 8);
    const HiddenTruth& h = *d.hidden;
    // Bit-exact recomposition; subtracting back is not exact in floating point.
    EXPECT_EQ(d.Z, Matrix(h.X + h.W));
    EXPECT_EQ(d.y, Vector(design_times(h.X, beta) + h.e));
    EXPECT_EQ(h.beta_star, beta);
}

TEST(GenerateDataset, EmpiricalCovariance) {
    const Vector beta = Vector::Unit(4, 0);
    const Dataset d = generate_dataset(ProblemShape(20000, 4), NoiseModel(1.0, 0.5, 1.0), beta, 17);
    const Matrix cov = d.Z.transpose() * d.Z / 20000.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            EXPECT_NEAR(cov(i, j), i == j ? 1.5 : 0.0, 0.05);
        }
    }
}

TEST(GenerateDataset, DeterministicAndSeedSensitive) {
    const Vector beta = Vector::Unit(5, 2);
    const NoiseModel nm(1.0, 0.25, 0.25);
    const Dataset a = generate_dataset(ProblemShape(12, 5), nm, beta, 1);
    const Dataset b = generate_dataset(ProblemShape(12, 5), nm, beta, 1);
    const Dataset c = generate_dataset(ProblemShape(12, 5), nm, beta, 2);
    EXPECT_EQ(a.Z, b.Z);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NE(a.Z, c.Z);
}

TEST(GenerateDataset, RowsNestAcrossSampleSizes) {
    const Vector beta = Vector::Unit(5, 2);
    const NoiseModel nm(1.0, 0.25, 0.25);
    const Dataset small = generate_dataset(ProblemShape(7, 5), nm, beta, 11);
    const Dataset large = generate_dataset(ProblemShape(20, 5), nm, beta, 11);
    EXPECT_EQ(small.Z, large.Z.topRows(7));
    EXPECT_EQ(small.y, large.y.head(7));
}

TEST(GenerateDataset, StripHidden) {
    const Dataset d = generate_dataset(ProblemShape(5, 3), NoiseModel(1, 1, 1), Vector::Unit(3, 0), 1, false);
    EXPECT_FALSE(d.hidden);
}

TEST(GenerateDataset, DimensionMismatch) {
    EXPECT_THROW(generate_dataset(ProblemShape(5, 3), NoiseModel(1, 1, 1), Vector::Unit(4, 0), 1),
                 DimensionError);
}

TEST(DatasetFile, RoundTripIsBitExact) {
    const Vector beta = generate_signal(SignalSpec{7, SparsityBudget(0.5, 2.5), 3});
    const NoiseModel nm(1.3, 0.21, 0.47);
    const Dataset d = generate_dataset(ProblemShape(11, 7), nm, beta, 123456789);
    std::stringstream ss;
    save_dataset(ss, d, nm, 123456789);
    const DatasetFile f = load_dataset(ss);
    EXPECT_EQ(f.seed, 123456789u);
    EXPECT_EQ(f.noise.sigma_x2(), 1.3);
    EXPECT_EQ(f.noise.sigma_w2(), 0.21);
    EXPECT_EQ(f.noise.sigma_e2(), 0.47);
    EXPECT_EQ(f.data.Z, d.Z);
    EXPECT_EQ(f.data.y, d.y);
    ASSERT_TRUE(f.data.hidden);
    EXPECT_EQ(f.data.hidden->X, d.hidden->X);
    EXPECT_EQ(f.data.hidden->W, d.hidden->W);
    EXPECT_EQ(f.data.hidden->e, d.hidden->e);
    EXPECT_EQ(f.data.hidden->beta_star, beta);
}

TEST(DatasetFile, RoundTripWithoutHiddenViaPath) {
    const NoiseModel nm(1.0, 0.5, 0.5);
    const Dataset d = generate_dataset(ProblemShape(4, 3), nm, Vector::Unit(3, 1), 9, false);
    const std::string path = ::testing::TempDir() + "eivreg_roundtrip.txt";
    save_dataset(path, d, nm, 9);
    const DatasetFile f = load_dataset(path);
    std::remove(path.c_str());
    EXPECT_EQ(f.data.Z, d.Z);
    EXPECT_EQ(f.data.y, d.y);
    EXPECT_FALSE(f.data.hidden);
}

TEST(DatasetFile, RejectsGarbage) {
    std::stringstream ss("not a dataset\n");
    EXPECT_THROW(load_dataset(ss), IoError);
    std::stringstream truncated("eivreg-dataset v1\nshape 2 2\n");
    EXPECT_THROW(load_dataset(truncated), IoError);
    EXPECT_THROW(load_dataset(std::string("/nonexistent/dir/file.txt")), IoError);
}
