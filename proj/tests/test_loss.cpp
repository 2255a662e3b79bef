#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace sindy_lom;
using fixtures::scalar_linear;

namespace {

SindyModel zero_model() { return scalar_linear(0.0); }

/// N = 4: true row over k = 0..3 has norm 2; a zero model leaves an error of norm 1.
TimeSeriesDataset worked_example() {
    Eigen::RowVectorXd s(5);
    s << std::sqrt(3.0), 1.0, 0.0, 0.0, 5.0;
    return TimeSeriesDataset("worked", s, Eigen::MatrixXd(0, 5));
}

TimeSeriesDataset decay(double x0, Index len, const std::string& name) {
    Eigen::RowVectorXd s(len);
    s(0) = x0;
    for (Index k = 1; k < len; ++k) s(k) = 0.5 * s(k - 1);
    return TimeSeriesDataset(name, s, Eigen::MatrixXd(0, len));
}

/// Direct transcription of the loss for a scalar model with no inputs.
double oracle(const std::vector<TimeSeriesDataset>& sets, double a, const std::vector<double>& q, double kappa,
              Index nnz) {
    double Q = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto& s = sets[i].states();
        const Index N = s.cols() - 1;
        double x = s(0, 0), e2 = 0.0, t2 = 0.0;
        for (Index k = 0; k < N; ++k) {
            e2 += (x - s(0, k)) * (x - s(0, k));
            t2 += s(0, k) * s(0, k);
            x = a * x;
        }
        acc += q[i] * std::sqrt(e2) / std::sqrt(t2) / std::sqrt(static_cast<double>(N));
        Q += q[i];
    }
    return acc / Q + kappa * static_cast<double>(nnz);
}

}  // namespace

TEST(Loss, WorkedExample) {
    const auto r = j_ms(zero_model(), {worked_example()}, LossWeights::uniform(1, 1, 0.0));
    EXPECT_NEAR(r.j_ms, 0.25, 1e-12);
    ASSERT_EQ(r.per_dataset.size(), 1u);
    EXPECT_NEAR(r.per_dataset[0].component_errors[0], 1.0, 1e-15);
    EXPECT_FALSE(r.diverged());
}

TEST(Loss, Defaults) {
    const auto w = LossWeights::uniform(2, 2);
    EXPECT_EQ(w.q, (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(w.r, (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(w.kappa, 8.0e-7);
    EXPECT_EQ(kDivergencePenalty, 1e12);
}

TEST(Loss, PerfectModelIsZero) {
    const auto r = j_ms(scalar_linear(0.5), {decay(1.0, 30, "a"), decay(-2.0, 10, "b")}, LossWeights::uniform(2, 1, 0.0));
    EXPECT_EQ(r.j_ms, 0.0);
}

TEST(Loss, MatchesScalarOracle) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<TimeSeriesDataset> sets;
        std::vector<double> q;
        const int M = 1 + t % 3;
        for (int i = 0; i < M; ++i) {
            sets.push_back(TimeSeriesDataset("s" + std::to_string(i), fixtures::random_matrix(1, 5 + 3 * i + t, rng),
                                             Eigen::MatrixXd(0, 5 + 3 * i + t)));
            q.push_back(u(rng));
        }
        const double a = u(rng) - 1.0;
        LossWeights w{q, {1.0}, 1e-3};
        const auto r = j_ms(scalar_linear(a), sets, w);
        EXPECT_NEAR(r.j_ms, oracle(sets, a, q, 1e-3, 1), 1e-12);
    }
}

TEST(OneStepLoss, ConstantOffsetScalesWithSqrtN) {
    for (Index N : {4, 16, 100}) {
        auto lib = polynomial_library(1, 0, 1);
        Eigen::MatrixXd xi(2, 1);
        xi << 0.01, 0.5;
        const SindyModel model(lib, Eigen::VectorXd(0), CoefficientMatrix(xi));
        EXPECT_NEAR(j_os(model, decay(1.0, N + 1, "d")), 0.01 * std::sqrt(static_cast<double>(N)), 1e-14);
    }
}

TEST(OneStepLoss, SumsComponents) {
    auto lib = polynomial_library(2, 0, 1);
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(3, 2);
    xi(0, 0) = 0.1;
    xi(0, 1) = 0.2;
    const SindyModel model(lib, Eigen::VectorXd(0), CoefficientMatrix(xi));
    const TimeSeriesDataset ds("z", Eigen::MatrixXd::Zero(2, 10), Eigen::MatrixXd(0, 10));
    EXPECT_NEAR(j_os(model, ds), 0.3 * 3.0, 1e-14);
}

TEST(Loss, DivergenceGivesPenaltyExactly) {
    const auto r = j_ms(scalar_linear(2.0), {decay(1.0, 100, "a"), decay(1.0, 10, "b")}, LossWeights::uniform(2, 1));
    EXPECT_EQ(r.j_ms, kDivergencePenalty);
    ASSERT_TRUE(r.diverged());
    EXPECT_TRUE(r.per_dataset[0].diverged);
    EXPECT_EQ(*r.per_dataset[0].diverged_at, 27);
    EXPECT_FALSE(r.per_dataset[1].diverged);
    EXPECT_EQ(j_ms(scalar_linear(2.0), {decay(1.0, 100, "a")}, LossWeights::uniform(1, 1), 1e8, 7.0).j_ms, 7.0);
}

TEST(Loss, ZeroNormRowIsAnError) {
    const TimeSeriesDataset flat("flat", Eigen::RowVectorXd::Zero(6), Eigen::MatrixXd(0, 6));
    try {
        j_ms(scalar_linear(0.5), {decay(1.0, 6, "ok"), flat}, LossWeights::uniform(2, 1));
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("flat"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("x1"), std::string::npos);
    }
}

TEST(Loss, ReorderingDatasetsWithWeights) {
    std::mt19937_64 rng(5);
    const TimeSeriesDataset a("a", fixtures::random_matrix(1, 30, rng), Eigen::MatrixXd(0, 30));
    const TimeSeriesDataset b("b", fixtures::random_matrix(1, 12, rng), Eigen::MatrixXd(0, 12));
    const auto model = scalar_linear(0.3);
    const double ab = j_ms(model, {a, b}, {{1.0, 3.0}, {1.0}, 0.0}).j_ms;
    const double ba = j_ms(model, {b, a}, {{3.0, 1.0}, {1.0}, 0.0}).j_ms;
    EXPECT_NEAR(ab, ba, 1e-15);
}

TEST(Loss, CommonWeightScalingCancels) {
    std::mt19937_64 rng(6);
    const TimeSeriesDataset a("a", fixtures::random_matrix(2, 30, rng), Eigen::MatrixXd(0, 30));
    const TimeSeriesDataset b("b", fixtures::random_matrix(2, 20, rng), Eigen::MatrixXd(0, 20));
    auto lib = polynomial_library(2, 0, 1);
    const SindyModel model(lib, Eigen::VectorXd(0), CoefficientMatrix(fixtures::random_matrix(3, 2, rng, 0.3)));
    const double base = j_ms(model, {a, b}, {{1.0, 2.0}, {0.5, 1.5}, 1e-4}).j_ms;
    EXPECT_NEAR(j_ms(model, {a, b}, {{7.0, 14.0}, {0.5, 1.5}, 1e-4}).j_ms, base, 1e-14);
    EXPECT_NEAR(j_ms(model, {a, b}, {{1.0, 2.0}, {5.0, 15.0}, 1e-4}).j_ms, base, 1e-14);
}

TEST(Loss, EachCoefficientCostsKappa) {
    // w1 is identically zero in the data, so a coefficient on it changes no prediction.
    auto lib = polynomial_library(1, 1, 1);
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(3, 1);
    xi(1, 0) = 0.5;
    const TimeSeriesDataset ds("d", decay(1.0, 20, "d").states(), Eigen::MatrixXd::Zero(1, 20));
    const double kappa = 3e-3;
    const double before = j_ms(SindyModel(lib, Eigen::VectorXd(0), CoefficientMatrix(xi)), {ds}, {{1.0}, {1.0}, kappa}).j_ms;
    xi(2, 0) = 4.0;
    const auto after = j_ms(SindyModel(lib, Eigen::VectorXd(0), CoefficientMatrix(xi)), {ds}, {{1.0}, {1.0}, kappa});
    EXPECT_EQ(before, kappa);
    EXPECT_EQ(after.j_ms, 2 * kappa);
    EXPECT_EQ(after.l0_count, 2);
}

TEST(Loss, NeverNegative) {
    std::mt19937_64 rng(7);
    auto lib = polynomial_library(2, 1, 2);
    for (int t = 0; t < 30; ++t) {
        const SindyModel model(lib, Eigen::VectorXd(0), CoefficientMatrix(fixtures::random_matrix(lib.size(), 2, rng, 0.2)));
        const TimeSeriesDataset ds("d", fixtures::random_matrix(2, 15, rng), fixtures::random_matrix(1, 15, rng));
        EXPECT_GE(j_ms(model, {ds}, LossWeights::uniform(1, 2)).j_ms, 0.0);
    }
}

TEST(Loss, WeightValidation) {
    const auto ds = decay(1.0, 6, "a");
    EXPECT_THROW(j_ms(zero_model(), {}, LossWeights::uniform(0, 1)), ConfigError);
    EXPECT_THROW(j_ms(zero_model(), {ds}, LossWeights::uniform(2, 1)), ConfigError);
    EXPECT_THROW(j_ms(zero_model(), {ds}, LossWeights::uniform(1, 2)), ConfigError);
    EXPECT_THROW(j_ms(zero_model(), {ds}, {{0.0}, {1.0}, 0.0}), ConfigError);
    EXPECT_THROW(j_ms(zero_model(), {ds}, {{1.0}, {-1.0}, 0.0}), ConfigError);
    EXPECT_THROW(j_ms(zero_model(), {ds}, {{1.0}, {1.0}, -1.0}), ConfigError);
}

TEST(L0, MatchesElementwiseScan) {
    std::mt19937_64 rng(9);
    EXPECT_EQ(l0_norm(CoefficientMatrix(33, 2)), 0);
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXd v = fixtures::random_matrix(33, 2, rng);
        for (Index i = 0; i < v.size(); ++i)
            if (rng() % 3 != 0) v(i) = 0.0;
        Index count = 0;
        for (Index r = 0; r < v.rows(); ++r)
            for (Index c = 0; c < v.cols(); ++c) count += v(r, c) != 0.0;
        EXPECT_EQ(l0_norm(CoefficientMatrix(v)), count);
    }
}
