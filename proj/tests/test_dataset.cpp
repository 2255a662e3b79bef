#include <gtest/gtest.h>

#include <fstream>
#include <limits>
#include <sstream>

#include "support.hpp"

using namespace sindy_lom;

namespace {

TimeSeriesDataset line(std::initializer_list<double> xs) {
    Eigen::RowVectorXd s(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double v : xs) s(i++) = v;
    return TimeSeriesDataset("line", s, Eigen::MatrixXd(0, s.size()));
}

}  // namespace

TEST(Shift, SplitsIntoPresentAndNext) {
    const auto sm = shifted(line({1, 2, 3}));
    ASSERT_EQ(sm.X.cols(), 2);
    EXPECT_EQ(sm.X(0, 0), 1);
    EXPECT_EQ(sm.X(0, 1), 2);
    EXPECT_EQ(sm.Xplus(0, 0), 2);
    EXPECT_EQ(sm.Xplus(0, 1), 3);
    EXPECT_EQ(sm.W.rows(), 0);
}

TEST(Shift, LengthTwoGivesOneColumn) {
    const auto sm = shifted(line({4, 5}));
    EXPECT_EQ(sm.X.cols(), 1);
    EXPECT_EQ(sm.Xplus.cols(), 1);
    EXPECT_EQ(sm.samples(), 1);
}

TEST(Shift, NextColumnIsFollowingSample) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 1 + trial % 3, m = trial % 4, len = 2 + trial * 7;
        TimeSeriesDataset ds("r", fixtures::random_matrix(n, len, rng), fixtures::random_matrix(m, len, rng));
        const auto sm = shifted(ds);
        for (Index j = 0; j + 1 < len; ++j) {
            for (Index i = 0; i < n; ++i) {
                EXPECT_EQ(sm.Xplus(i, j), ds.states()(i, j + 1));
                EXPECT_EQ(sm.X(i, j), ds.states()(i, j));
            }
            for (Index i = 0; i < m; ++i) EXPECT_EQ(sm.W(i, j), ds.inputs()(i, j));
        }
    }
}

TEST(Dataset, RejectsBadShapes) {
    EXPECT_THROW(TimeSeriesDataset("a", Eigen::MatrixXd(1, 1), Eigen::MatrixXd(0, 1)), DataError);
    EXPECT_THROW(TimeSeriesDataset("a", Eigen::MatrixXd::Zero(1, 3), Eigen::MatrixXd::Zero(1, 2)), DataError);
    EXPECT_THROW(TimeSeriesDataset("a", Eigen::MatrixXd(0, 3), Eigen::MatrixXd(0, 3)), DataError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(1, 3);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(TimeSeriesDataset("a", bad, Eigen::MatrixXd(0, 3)), DataError);
    EXPECT_THROW(TimeSeriesDataset("a", Eigen::MatrixXd::Zero(1, 3), Eigen::MatrixXd(0, 3), {"x", "y"}), DataError);
}

TEST(Dataset, DefaultColumnNames) {
    TimeSeriesDataset ds("a", Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(1, 3));
    EXPECT_EQ(ds.column_names(), (std::vector<std::string>{"x1", "x2", "w1"}));
}

TEST(Csv, ParsesStatesThenInputs) {
    std::istringstream in("a,b,u\n1,2,3\n4,5,6\n\n7,8,9\n");
    const auto ds = read_csv(in, 2, 1, "t");
    EXPECT_EQ(ds.length(), 3);
    EXPECT_EQ(ds.states()(1, 2), 8);
    EXPECT_EQ(ds.inputs()(0, 1), 6);
    EXPECT_EQ(ds.column_names()[2], "u");
}

TEST(Csv, RejectsMalformedInput) {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_csv(in, 1, 1, "t");
    };
    EXPECT_THROW(parse(""), DataError);
    EXPECT_THROW(parse("x,w,z\n1,2,3\n4,5,6\n"), DataError);
    EXPECT_THROW(parse("x,w\n1,2\n4\n"), DataError);
    EXPECT_THROW(parse("x,w\n1,2\n"), DataError);
    EXPECT_THROW(parse("x,w\n1,2\nabc,3\n"), DataError);
    EXPECT_THROW(parse("x,w\n1,2\nnan,3\n"), DataError);
    EXPECT_THROW(parse("x,w\n1,2\ninf,3\n"), DataError);
    EXPECT_THROW(parse("x,w\n1,2\n1.5e,3\n"), DataError);
}

TEST(Csv, RoundTripIsExact) {
    std::mt19937_64 rng(5);
    fixtures::TempDir dir("csv");
    Eigen::MatrixXd s = fixtures::random_matrix(3, 200, rng, 1e3);
    s(0, 0) = 5e-324;
    s(1, 0) = -1.7976931348623157e308;
    s(2, 0) = 0.1;
    TimeSeriesDataset ds("orig", s, fixtures::random_matrix(2, 200, rng, 1e-7));
    save_csv(ds, dir / "trip.csv");
    const auto back = load_csv(dir / "trip.csv", 3, 2);
    EXPECT_EQ(back.name(), "trip");
    EXPECT_TRUE((back.states().array() == ds.states().array()).all());
    EXPECT_TRUE((back.inputs().array() == ds.inputs().array()).all());
}

TEST(Csv, MissingFileIsIoError) {
    EXPECT_THROW(load_csv("/nonexistent/dir/file.csv", 1, 1), IoError);
}
