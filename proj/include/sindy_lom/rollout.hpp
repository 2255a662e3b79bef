#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "sindy_lom/dataset.hpp"
#include "sindy_lom/error.hpp"
#include "sindy_lom/library.hpp"
#include "sindy_lom/stlsq.hpp"

namespace sindy_lom {

/// Infinity-norm bound above which a rollout is declared diverged.
inline constexpr double kDefaultDivergenceBound = 1e8;

/**
 * x(k+1) = (Theta(x(k), w(k); Phi) Xi)^T.
 *
 * Evaluation visits only basis functions with at least one nonzero
 * coefficient and sums terms in row order, so the result does not depend on
 * vectorization of a dense product.
 */
class SindyModel {
   public:
    SindyModel(LibrarySpec spec, Eigen::VectorXd phi, CoefficientMatrix xi)
        : spec_(std::move(spec)), phi_(std::move(phi)), xi_(std::move(xi)) {
        detail::check_phi(spec_, phi_);
        if (xi_.rows() != spec_.size() || xi_.cols() != spec_.n_state())
            throw DimensionError("model: Xi is " + std::to_string(xi_.rows()) + "x" + std::to_string(xi_.cols()) +
                                 ", library needs " + std::to_string(spec_.size()) + "x" +
                                 std::to_string(spec_.n_state()));
        if (!xi_.values().allFinite()) throw DataError("model: non-finite coefficient");
        for (Index i = 0; i < xi_.rows(); ++i)
            if ((xi_.values().row(i).array() != 0.0).any()) active_.push_back(i);
    }

    const LibrarySpec& spec() const { return spec_; }
    const Eigen::VectorXd& phi() const { return phi_; }
    const CoefficientMatrix& xi() const { return xi_; }
    Index n_state() const { return spec_.n_state(); }
    Index m_input() const { return spec_.m_input(); }

    /// Writes the next state into `out`; returns false when any entry is non-finite.
    bool advance(const double* x, const double* w, double* out) const {
        const Index n = spec_.n_state(), m = spec_.m_input();
        thread_local std::vector<double> u;
        u.assign(x, x + n);
        u.insert(u.end(), w, w + m);
        for (Index j = 0; j < n; ++j) out[j] = 0.0;
        for (auto i : active_) {
            const double theta = detail::eval_basis(spec_[i], u.data(), phi_.data());
            for (Index j = 0; j < n; ++j) {
                const double c = xi_(i, j);
                if (c != 0.0) out[j] += theta * c;
            }
        }
        for (Index j = 0; j < n; ++j)
            if (!std::isfinite(out[j])) return false;
        return true;
    }

   private:
    LibrarySpec spec_;
    Eigen::VectorXd phi_;
    CoefficientMatrix xi_;
    std::vector<Index> active_;
};

inline Eigen::VectorXd step(const SindyModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
    if (x.size() != model.n_state() || w.size() != model.m_input())
        throw DimensionError("step: state/input dimension mismatch");
    if (!x.allFinite() || !w.allFinite()) throw DataError("step: non-finite input");
    Eigen::VectorXd next(model.n_state());
    if (!model.advance(x.data(), w.data(), next.data())) throw DivergenceError("step: non-finite model output");
    return next;
}

struct OneStepPrediction {
    /// Column k holds x_check(k+1); shape n x N.
    Eigen::MatrixXd states;
    std::vector<Index> diverged_columns;
};

/// Applies the model to every true sample (x(k), w(k)), k = 0..N-1. No recursion.
inline OneStepPrediction predict_one_step(const SindyModel& model, const TimeSeriesDataset& ds) {
    if (ds.n_state() != model.n_state() || ds.m_input() != model.m_input())
        throw DimensionError("predict_one_step: dataset '" + ds.name() + "' does not match the model");
    const Index n = ds.length() - 1;
    OneStepPrediction out{Eigen::MatrixXd(model.n_state(), n), {}};
    for (Index k = 0; k < n; ++k) {
        if (!model.advance(ds.states().col(k).data(), ds.inputs().col(k).data(), out.states.col(k).data()))
            out.diverged_columns.push_back(k);
    }
    return out;
}

struct RolloutResult {
    /// Column k holds x_hat(k); truncated at the divergence point.
    Eigen::MatrixXd trajectory;
    bool diverged = false;
    std::optional<Index> diverged_at;
};

/**
 * Recursive rollout from x0 using inputs.col(0 .. steps-2), producing `steps`
 * states x_hat(0..steps-1). Stops at the first state that is non-finite or
 * exceeds `bound` in the infinity norm; that state is not stored.
 */
inline RolloutResult rollout(const SindyModel& model, const Eigen::VectorXd& x0, const Eigen::MatrixXd& inputs,
                             Index steps, double bound = kDefaultDivergenceBound) {
    if (x0.size() != model.n_state() || inputs.rows() != model.m_input())
        throw DimensionError("rollout: state/input dimension mismatch");
    if (steps < 1 || inputs.cols() < steps - 1) throw DimensionError("rollout: not enough input samples");
    const Index n = model.n_state();
    Eigen::MatrixXd traj(n, steps);
    auto out_of_bounds = [&](const double* v) {
        for (Index j = 0; j < n; ++j)
            if (!std::isfinite(v[j]) || std::abs(v[j]) > bound) return true;
        return false;
    };
    traj.col(0) = x0;
    if (out_of_bounds(traj.col(0).data())) return {Eigen::MatrixXd(n, 0), true, Index{0}};
    for (Index k = 0; k + 1 < steps; ++k) {
        double* next = traj.col(k + 1).data();
        if (!model.advance(traj.col(k).data(), inputs.col(k).data(), next) || out_of_bounds(next))
            return {traj.leftCols(k + 1), true, k + 1};
    }
    return {std::move(traj), false, std::nullopt};
}

/// x_hat(0) = x(0); x_hat(k+1) = f(x_hat(k), w(k)) for every sample of `ds`.
inline RolloutResult predict_rlt(const SindyModel& model, const TimeSeriesDataset& ds,
                                 double bound = kDefaultDivergenceBound) {
    if (ds.n_state() != model.n_state() || ds.m_input() != model.m_input())
        throw DimensionError("predict_rlt: dataset '" + ds.name() + "' does not match the model");
    return rollout(model, ds.state(0), ds.inputs(), ds.length(), bound);
}

}  // namespace sindy_lom
