#pragma once

#include <Eigen/Core>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sindy_lom/error.hpp"

namespace sindy_lom {

using Index = Eigen::Index;

/**
 * Paired state / exogenous-input sequences x(0..N), w(0..N).
 *
 * Samples are stored column-wise: states() is n_state x length and inputs() is
 * m_input x length. The time index is 0-based. Instances are immutable and
 * validated on construction (length >= 2, finite entries).
 */
class TimeSeriesDataset {
   public:
    TimeSeriesDataset(std::string name, Eigen::MatrixXd states, Eigen::MatrixXd inputs,
                      std::vector<std::string> column_names = {})
        : name_(std::move(name)), states_(std::move(states)), inputs_(std::move(inputs)),
          columns_(std::move(column_names)) {
        if (states_.rows() < 1) throw DataError("dataset '" + name_ + "': n_state must be positive");
        if (states_.cols() != inputs_.cols())
            throw DataError("dataset '" + name_ + "': states and inputs differ in length");
        if (states_.cols() < 2) throw DataError("dataset '" + name_ + "': needs at least 2 samples");
        if (!states_.allFinite() || !inputs_.allFinite())
            throw DataError("dataset '" + name_ + "': non-finite value");
        if (columns_.empty()) {
            for (Index i = 0; i < states_.rows(); ++i) columns_.push_back("x" + std::to_string(i + 1));
            for (Index i = 0; i < inputs_.rows(); ++i) columns_.push_back("w" + std::to_string(i + 1));
        }
        if (static_cast<Index>(columns_.size()) != states_.rows() + inputs_.rows())
            throw DataError("dataset '" + name_ + "': column name count mismatch");
    }

    const std::string& name() const { return name_; }
    Index n_state() const { return states_.rows(); }
    Index m_input() const { return inputs_.rows(); }
    /// Number of samples, N + 1.
    Index length() const { return states_.cols(); }

    const Eigen::MatrixXd& states() const { return states_; }
    const Eigen::MatrixXd& inputs() const { return inputs_; }
    const std::vector<std::string>& column_names() const { return columns_; }

    Eigen::VectorXd state(Index k) const { return states_.col(k); }
    Eigen::VectorXd input(Index k) const { return inputs_.col(k); }

    TimeSeriesDataset renamed(std::string name) const {
        return TimeSeriesDataset(std::move(name), states_, inputs_, columns_);
    }

   private:
    std::string name_;
    Eigen::MatrixXd states_;
    Eigen::MatrixXd inputs_;
    std::vector<std::string> columns_;
};

/// X = [x(0) .. x(N-1)], Xplus = [x(1) .. x(N)], W = [w(0) .. w(N-1)].
struct ShiftedMatrices {
    Eigen::MatrixXd X;
    Eigen::MatrixXd Xplus;
    Eigen::MatrixXd W;

    Index samples() const { return X.cols(); }
};

inline ShiftedMatrices shifted(const TimeSeriesDataset& ds) {
    const Index n = ds.length() - 1;
    if (n < 1) throw DataError("dataset '" + ds.name() + "' too short to shift");
    return {ds.states().leftCols(n), ds.states().rightCols(n), ds.inputs().leftCols(n)};
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_cell(std::string_view cell, std::size_t line_no) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty())
        throw DataError("line " + std::to_string(line_no) + ": non-numeric cell '" + std::string(cell) + "'");
    if (!std::isfinite(value))
        throw DataError("line " + std::to_string(line_no) + ": non-finite value '" + std::string(cell) + "'");
    return value;
}

}  // namespace detail

/// Parses CSV text: mandatory header, one row per time step, states first then inputs.
inline TimeSeriesDataset read_csv(std::istream& in, Index n_state, Index m_input, std::string name) {
    if (n_state < 1 || m_input < 0) throw DataError("invalid n_state/m_input");
    const auto width = static_cast<std::size_t>(n_state + m_input);

    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + name + "': empty file");
    std::vector<std::string> header;
    for (auto c : detail::split_commas(line)) header.emplace_back(detail::trim(c));
    if (header.size() != width)
        throw DataError("'" + name + "': header has " + std::to_string(header.size()) + " columns, expected " +
                        std::to_string(width));

    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_commas(line);
        if (cells.size() != width)
            throw DataError("'" + name + "' line " + std::to_string(line_no) + ": column-count mismatch");
        for (auto c : cells) values.push_back(detail::parse_cell(c, line_no));
    }
    const auto rows = static_cast<Index>(values.size() / width);
    if (rows < 2) throw DataError("'" + name + "': fewer than 2 data rows");

    Eigen::MatrixXd states(n_state, rows), inputs(m_input, rows);
    for (Index k = 0; k < rows; ++k) {
        const auto* row = values.data() + k * static_cast<Index>(width);
        for (Index i = 0; i < n_state; ++i) states(i, k) = row[i];
        for (Index i = 0; i < m_input; ++i) inputs(i, k) = row[n_state + i];
    }
    return TimeSeriesDataset(std::move(name), std::move(states), std::move(inputs), std::move(header));
}

inline TimeSeriesDataset load_csv(const std::filesystem::path& path, Index n_state, Index m_input) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file '" + path.string() + "'");
    return read_csv(in, n_state, m_input, path.stem().string());
}

inline void write_csv(std::ostream& out, const TimeSeriesDataset& ds) {
    const auto& cols = ds.column_names();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (Index k = 0; k < ds.length(); ++k) {
        for (Index i = 0; i < ds.n_state(); ++i) out << (i ? "," : "") << detail::format_double(ds.states()(i, k));
        for (Index i = 0; i < ds.m_input(); ++i) out << ',' << detail::format_double(ds.inputs()(i, k));
        out << '\n';
    }
}

inline void save_csv(const TimeSeriesDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset file '" + path.string() + "'");
    write_csv(out, ds);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace sindy_lom
