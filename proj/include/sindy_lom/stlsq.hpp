#pragma once

#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sindy_lom/dataset.hpp"
#include "sindy_lom/error.hpp"
#include "sindy_lom/library.hpp"

namespace sindy_lom {

/// The p x n coefficient matrix Xi; column j holds xi_j.
class CoefficientMatrix {
   public:
    CoefficientMatrix() = default;
    explicit CoefficientMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}
    CoefficientMatrix(Index p, Index n) : values_(Eigen::MatrixXd::Zero(p, n)) {}

    const Eigen::MatrixXd& values() const { return values_; }
    Index rows() const { return values_.rows(); }
    Index cols() const { return values_.cols(); }
    double operator()(Index i, Index j) const { return values_(i, j); }

    /// Rows i with Xi(i, j) != 0.
    std::vector<Index> support(Index j) const {
        std::vector<Index> s;
        for (Index i = 0; i < values_.rows(); ++i)
            if (values_(i, j) != 0.0) s.push_back(i);
        return s;
    }

    /// ||Xi||_0: total number of nonzero entries.
    Index nonzeros() const { return (values_.array() != 0.0).count(); }

    friend bool operator==(const CoefficientMatrix& a, const CoefficientMatrix& b) {
        return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
               (a.values_.array() == b.values_.array()).all();
    }

   private:
    Eigen::MatrixXd values_;
};

struct StlsqConfig {
    /// Sparsification threshold on |xi_i|.
    double lambda = 8.0e-5;
    int k_max = 10;
    /// Relative pivot tolerance of the rank-revealing least-squares solve.
    double rank_tol = 1e-10;

    void validate() const {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("stlsq: lambda must be > 0");
        if (k_max < 1) throw ConfigError("stlsq: k_max must be >= 1");
        if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw ConfigError("stlsq: rank_tol must lie in (0, 1)");
    }
};

/// Minimizer of ||A v - b||_2; minimum-norm when A is rank-deficient at `rank_tol`.
inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double rank_tol = 1e-10) {
    if (A.rows() < 1 || A.cols() < 1) throw DimensionError("least_squares: empty system");
    if (A.rows() != b.size()) throw DimensionError("least_squares: row count mismatch");
    if (!A.allFinite() || !b.allFinite()) throw DataError("least_squares: non-finite entries");
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(rank_tol);
    cod.compute(A);
    return cod.solve(b);
}

/// Per-iteration record of one stlsq_solve call.
struct StlsqTrace {
    /// supports[0] is the support after the initial unrestricted solve;
    /// supports[t] the support after restricted round t.
    std::vector<std::vector<Index>> supports;
    /// Restricted least-squares rounds executed.
    int iterations = 0;
    /// True when the loop stopped on an unchanged (or empty) support rather than k_max.
    bool converged = false;
};

namespace detail {

inline std::vector<Index> threshold_support(const Eigen::VectorXd& xi, double lambda) {
    std::vector<Index> s;
    for (Index i = 0; i < xi.size(); ++i)
        if (std::abs(xi(i)) >= lambda) s.push_back(i);
    return s;
}

inline Eigen::VectorXd restricted_solve(const Eigen::MatrixXd& theta, const Eigen::VectorXd& target,
                                        const std::vector<Index>& support, double rank_tol) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(theta.cols());
    if (support.empty()) return xi;
    Eigen::MatrixXd sub(theta.rows(), static_cast<Index>(support.size()));
    for (std::size_t c = 0; c < support.size(); ++c) sub.col(static_cast<Index>(c)) = theta.col(support[c]);
    const Eigen::VectorXd v = least_squares(sub, target, rank_tol);
    for (std::size_t c = 0; c < support.size(); ++c) xi(support[c]) = v(static_cast<Index>(c));
    return xi;
}

inline void keep_only(Eigen::VectorXd& xi, const std::vector<Index>& support) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(xi.size());
    for (auto i : support) out(i) = xi(i);
    xi = std::move(out);
}

}  // namespace detail

/**
 * Sequentially thresholded least squares for one target column.
 *
 * Unrestricted least squares, then up to k_max rounds of least squares
 * restricted to the current support followed by hard thresholding at
 * |xi_i| >= lambda. Stops early once the support no longer changes or
 * becomes empty (the zero vector is returned in that case).
 */
inline Eigen::VectorXd stlsq_solve(const Eigen::MatrixXd& theta, const Eigen::VectorXd& target,
                                   const StlsqConfig& cfg, StlsqTrace* trace = nullptr) {
    cfg.validate();
    if (theta.rows() != target.size()) throw DimensionError("stlsq_solve: target length does not match Theta");
    if (theta.rows() < 1 || theta.cols() < 1) throw DimensionError("stlsq_solve: empty Theta");

    Eigen::VectorXd xi = least_squares(theta, target, cfg.rank_tol);
    auto support = detail::threshold_support(xi, cfg.lambda);
    detail::keep_only(xi, support);
    if (trace) *trace = StlsqTrace{{support}, 0, false};

    bool converged = support.empty();
    for (int k = 1; k <= cfg.k_max && !converged; ++k) {
        xi = detail::restricted_solve(theta, target, support, cfg.rank_tol);
        auto next = detail::threshold_support(xi, cfg.lambda);
        detail::keep_only(xi, next);
        converged = next == support || next.empty();
        support = std::move(next);
        if (trace) {
            trace->supports.push_back(support);
            trace->iterations = k;
        }
    }
    if (trace) trace->converged = converged;
    return xi;
}

/// Inner-layer sparse regressor. STLSQ is the shipped implementation.
class SparseRegressor {
   public:
    virtual ~SparseRegressor() = default;
    virtual std::string_view name() const = 0;
    virtual Eigen::VectorXd solve(const Eigen::MatrixXd& theta, const Eigen::VectorXd& target) const = 0;
};

class StlsqRegressor final : public SparseRegressor {
   public:
    explicit StlsqRegressor(StlsqConfig cfg) : cfg_(cfg) { cfg_.validate(); }
    std::string_view name() const override { return "stlsq"; }
    Eigen::VectorXd solve(const Eigen::MatrixXd& theta, const Eigen::VectorXd& target) const override {
        return stlsq_solve(theta, target, cfg_);
    }
    const StlsqConfig& config() const { return cfg_; }

   private:
    StlsqConfig cfg_;
};

inline std::unique_ptr<SparseRegressor> make_regressor(std::string_view name, const StlsqConfig& cfg) {
    if (name == "stlsq") return std::make_unique<StlsqRegressor>(cfg);
    throw ConfigError("unknown sparse regressor '" + std::string(name) + "'");
}

/// Builds Theta once and regresses each component of Xplus on it.
inline CoefficientMatrix fit(const LibrarySpec& spec, const ShiftedMatrices& sm, const Eigen::VectorXd& phi,
                             const SparseRegressor& regressor) {
    if (sm.X.rows() != spec.n_state() || sm.Xplus.rows() != spec.n_state() || sm.W.rows() != spec.m_input())
        throw DimensionError("fit: data dimensions do not match the library");
    const Eigen::MatrixXd theta = build_matrix(spec, sm, phi);
    Eigen::MatrixXd xi(spec.size(), spec.n_state());
    for (Index j = 0; j < spec.n_state(); ++j) xi.col(j) = regressor.solve(theta, sm.Xplus.row(j).transpose());
    return CoefficientMatrix(std::move(xi));
}

inline CoefficientMatrix fit(const LibrarySpec& spec, const ShiftedMatrices& sm, const Eigen::VectorXd& phi,
                             const StlsqConfig& cfg) {
    return fit(spec, sm, phi, StlsqRegressor(cfg));
}

}  // namespace sindy_lom
