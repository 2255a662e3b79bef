#include <gtest/gtest.h>

#include "stlsq_properties.hpp"

using namespace sindy_lom;

TEST(LeastSquares, IdentityAndMean) {
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, -2.0, 2.0);
    EXPECT_TRUE(least_squares(Eigen::MatrixXd::Identity(5, 5), b).isApprox(b, 1e-15));
    Eigen::VectorXd c(4);
    c << 1.0, 2.0, 3.0, 10.0;
    EXPECT_NEAR(least_squares(Eigen::MatrixXd::Ones(4, 1), c)(0), 4.0, 1e-14);
}

TEST(LeastSquares, NormalEquationResidual) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 30; ++t) {
        const Eigen::MatrixXd A = fixtures::random_matrix(60 + t, 3 + t % 10, rng);
        const Eigen::VectorXd b = fixtures::random_matrix(A.rows(), 1, rng);
        const Eigen::VectorXd x = least_squares(A, b);
        EXPECT_LE((A.transpose() * (A * x - b)).norm(), 1e-8 * A.norm() * b.norm());
    }
}

TEST(LeastSquares, RankDeficientGivesMinimumNorm) {
    Eigen::MatrixXd A(4, 2);
    A.col(0) << 1, 2, 3, 4;
    A.col(1) = A.col(0);
    const Eigen::VectorXd x = least_squares(A, A.col(0) * 2.0);
    EXPECT_NEAR(x(0), 1.0, 1e-12);
    EXPECT_NEAR(x(1), 1.0, 1e-12);
}

TEST(LeastSquares, RejectsBadSystems) {
    EXPECT_THROW(least_squares(Eigen::MatrixXd(3, 2), Eigen::VectorXd(2)), DimensionError);
    EXPECT_THROW(least_squares(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0)), DimensionError);
    Eigen::MatrixXd A = Eigen::MatrixXd::Ones(2, 1);
    A(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(least_squares(A, Eigen::VectorXd::Ones(2)), DataError);
}

TEST(Stlsq, Defaults) {
    const StlsqConfig cfg;
    EXPECT_EQ(cfg.lambda, 8.0e-5);
    EXPECT_EQ(cfg.k_max, 10);
    EXPECT_EQ(cfg.rank_tol, 1e-10);
}

TEST(Stlsq, ConfigValidation) {
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(3);
    EXPECT_THROW(stlsq_solve(A, b, StlsqConfig{0.0, 10, 1e-10}), ConfigError);
    EXPECT_THROW(stlsq_solve(A, b, StlsqConfig{1e-3, 0, 1e-10}), ConfigError);
    EXPECT_THROW(stlsq_solve(A, b, StlsqConfig{1e-3, 10, 1.0}), ConfigError);
    EXPECT_THROW(stlsq_solve(A, Eigen::VectorXd::Ones(2), StlsqConfig{}), DimensionError);
}

TEST(Stlsq, RecoversSingleColumn) {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXd theta = fixtures::random_matrix(120, 8, rng);
    const Eigen::VectorXd target = 0.7 * theta.col(3);
    const Eigen::VectorXd xi = stlsq_solve(theta, target, StlsqConfig{});
    EXPECT_EQ(fixtures::support_of(xi), (std::vector<Index>{3}));
    EXPECT_NEAR(xi(3), 0.7, 1e-10);
}

TEST(Stlsq, ZeroTargetGivesZero) {
    std::mt19937_64 rng(8);
    StlsqTrace trace;
    const Eigen::VectorXd xi = stlsq_solve(fixtures::random_matrix(30, 5, rng), Eigen::VectorXd::Zero(30), {}, &trace);
    EXPECT_TRUE(xi.isZero(0.0));
    EXPECT_TRUE(trace.converged);
    EXPECT_EQ(trace.iterations, 0);
}

TEST(Stlsq, ThresholdUsesMagnitudeAndIsInclusive) {
    const Eigen::MatrixXd theta = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd target(3);
    target << -0.5, 0.25, 0.1;
    const Eigen::VectorXd xi = stlsq_solve(theta, target, StlsqConfig{0.25, 10, 1e-10});
    EXPECT_EQ(xi(0), -0.5);
    EXPECT_EQ(xi(1), 0.25);
    EXPECT_EQ(xi(2), 0.0);
}

TEST(Stlsq, StructuralPropertiesOnRandomInstances) {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 100; ++t) {
        const auto inst = fixtures::random_instance(rng);
        EXPECT_EQ(fixtures::check_stlsq_properties(inst), "") << "instance " << t;
    }
}

TEST(Fit, ScalarDecayIsRecovered) {
    Eigen::RowVectorXd s(201);
    s(0) = 1.0;
    for (Index k = 1; k <= 200; ++k) s(k) = 0.9 * s(k - 1);
    const TimeSeriesDataset ds("decay", s, Eigen::MatrixXd(0, 201));
    const auto lib = polynomial_library(1, 0, 1);
    const auto xi = fit(lib, shifted(ds), Eigen::VectorXd(0), StlsqConfig{});
    EXPECT_EQ(xi.support(0), (std::vector<Index>{1}));
    EXPECT_NEAR(xi(1, 0), 0.9, 1e-9);
}

TEST(Fit, StatePermutationPermutesColumns) {
    std::mt19937_64 rng(10);
    const Index len = 300;
    Eigen::MatrixXd states(2, len), inputs = fixtures::random_matrix(1, len, rng);
    states.col(0) << 0.3, -0.1;
    for (Index k = 0; k + 1 < len; ++k) {
        states(0, k + 1) = 0.6 * states(0, k) + 0.5 * inputs(0, k);
        states(1, k + 1) = -0.4 * states(1, k) + 0.2 * inputs(0, k) * inputs(0, k);
    }
    const auto lib = polynomial_library(2, 1, 2);
    const auto a = fit(lib, shifted(TimeSeriesDataset("a", states, inputs)), Eigen::VectorXd(0), StlsqConfig{});
    const Eigen::MatrixXd swapped = states.colwise().reverse();
    const auto b = fit(lib, shifted(TimeSeriesDataset("b", swapped, inputs)), Eigen::VectorXd(0), StlsqConfig{});
    // Swapping x1 and x2 maps library rows x1 <-> x2, x1^2 <-> x2^2, x1*w1 <-> x2*w1.
    std::vector<Index> perm(static_cast<std::size_t>(lib.size()));
    std::iota(perm.begin(), perm.end(), Index{0});
    auto swap_rows = [&](const char* p, const char* q) {
        Index i = -1, j = -1;
        for (Index r = 0; r < lib.size(); ++r) {
            if (lib.label(r) == p) i = r;
            if (lib.label(r) == q) j = r;
        }
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    };
    swap_rows("x1", "x2");
    swap_rows("x1^2", "x2^2");
    swap_rows("x1*w1", "x2*w1");
    for (Index r = 0; r < lib.size(); ++r) {
        EXPECT_NEAR(a(r, 0), b(perm[static_cast<std::size_t>(r)], 1), 1e-9);
        EXPECT_NEAR(a(r, 1), b(perm[static_cast<std::size_t>(r)], 0), 1e-9);
    }
    EXPECT_EQ(a.nonzeros(), 4);
}

TEST(Fit, FullLibraryShape) {
    std::mt19937_64 rng(12);
    const auto lib = append_rbfs(polynomial_library(2, 4, 2), 5);
    const TimeSeriesDataset ds("d", fixtures::random_matrix(2, 100, rng), fixtures::random_matrix(4, 100, rng));
    const auto xi = fit(lib, shifted(ds), fixtures::random_matrix(60, 1, rng, 3.0), StlsqConfig{});
    EXPECT_EQ(xi.rows(), 33);
    EXPECT_EQ(xi.cols(), 2);
}

TEST(Regressor, Registry) {
    EXPECT_EQ(make_regressor("stlsq", {})->name(), "stlsq");
    EXPECT_THROW(make_regressor("lasso", {}), ConfigError);
}

TEST(CoefficientMatrix, SupportAndCount) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(33, 2);
    v(1, 0) = 1;
    v(5, 0) = -2;
    v(30, 1) = 3;
    const CoefficientMatrix xi(v);
    EXPECT_EQ(xi.nonzeros(), 3);
    EXPECT_EQ(xi.support(0), (std::vector<Index>{1, 5}));
    EXPECT_EQ(xi.support(1), (std::vector<Index>{30}));
}
