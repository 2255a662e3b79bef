#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sindy_lom/dataset.hpp"
#include "sindy_lom/error.hpp"
#include "sindy_lom/rollout.hpp"
#include "sindy_lom/stlsq.hpp"

namespace sindy_lom {

/// j_ms reported when any rollout diverges.
inline constexpr double kDivergencePenalty = 1e12;

/// Default sparsity weight kappa for library optimization.
inline constexpr double kDefaultKappa = 8.0e-7;

struct LossWeights {
    /// One positive weight per LL dataset.
    std::vector<double> q;
    /// One positive weight per state component.
    std::vector<double> r;
    double kappa = kDefaultKappa;

    static LossWeights uniform(std::size_t datasets, std::size_t states, double kappa = kDefaultKappa) {
        return {std::vector<double>(datasets, 1.0), std::vector<double>(states, 1.0), kappa};
    }

    void validate(std::size_t datasets, std::size_t states) const {
        if (q.size() != datasets)
            throw ConfigError("loss: " + std::to_string(q.size()) + " q weights for " + std::to_string(datasets) +
                              " datasets");
        if (r.size() != states)
            throw ConfigError("loss: " + std::to_string(r.size()) + " r weights for " + std::to_string(states) +
                              " state components");
        for (double v : q)
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("loss: q weights must be positive");
        for (double v : r)
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("loss: r weights must be positive");
        if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("loss: kappa must be >= 0");
    }
};

struct DatasetLoss {
    std::string name;
    /// (1 / sqrt(N)) * sum_j r_j ||E_hat_j|| / ||X_j||; zero when diverged.
    double term = 0.0;
    bool diverged = false;
    std::optional<Index> diverged_at;
    /// ||E_hat_j||_2 per state component (empty when diverged).
    std::vector<double> component_errors;
};

struct LossReport {
    double j_ms = 0.0;
    std::vector<DatasetLoss> per_dataset;
    Index l0_count = 0;
    /// kappa * ||Xi||_0.
    double sparsity_penalty = 0.0;

    bool diverged() const {
        for (const auto& d : per_dataset)
            if (d.diverged) return true;
        return false;
    }
};

inline Index l0_norm(const CoefficientMatrix& xi) { return xi.nonzeros(); }

/// Per-component ||x_check_j(1..N) - x_j(1..N)||_2 of the one-step prediction.
inline Eigen::VectorXd one_step_errors(const SindyModel& model, const TimeSeriesDataset& ds) {
    const auto pred = predict_one_step(model, ds);
    if (!pred.diverged_columns.empty())
        throw DivergenceError("one-step prediction on '" + ds.name() + "' is non-finite at sample " +
                              std::to_string(pred.diverged_columns.front()));
    const Index n = ds.length() - 1;
    return (pred.states - ds.states().rightCols(n)).rowwise().norm();
}

/// J_os = sum_i ||E_check_i||_2.
inline double j_os(const SindyModel& model, const TimeSeriesDataset& ds) {
    return one_step_errors(model, ds).sum();
}

/**
 * Multi-dataset recursive long-term loss
 *
 *   J_ms = 1/(Q R) sum_i q_i { 1/sqrt(N_i) sum_j r_j ||E_hat_ij|| / ||X_ij|| } + kappa ||Xi||_0
 *
 * with E_hat over columns 0..N_i-1 of each dataset. When any rollout leaves
 * `bound`, j_ms is `penalty` exactly.
 */
inline LossReport j_ms(const SindyModel& model, const std::vector<TimeSeriesDataset>& datasets,
                       const LossWeights& weights, double bound = kDefaultDivergenceBound,
                       double penalty = kDivergencePenalty) {
    if (datasets.empty()) throw ConfigError("j_ms: at least one LL dataset is required");
    const auto n = static_cast<std::size_t>(model.n_state());
    weights.validate(datasets.size(), n);

    for (const auto& ds : datasets) {
        if (ds.n_state() != model.n_state() || ds.m_input() != model.m_input())
            throw DimensionError("j_ms: dataset '" + ds.name() + "' does not match the model");
        const Index cols = ds.length() - 1;
        for (Index j = 0; j < ds.n_state(); ++j)
            if (ds.states().row(j).head(cols).norm() == 0.0)
                throw DataError("j_ms: dataset '" + ds.name() + "' state component x" + std::to_string(j + 1) +
                                " has zero norm");
    }

    LossReport report;
    report.l0_count = l0_norm(model.xi());
    report.sparsity_penalty = weights.kappa * static_cast<double>(report.l0_count);

    double Q = 0.0, R = 0.0;
    for (double v : weights.q) Q += v;
    for (double v : weights.r) R += v;

    double weighted = 0.0;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const auto& ds = datasets[i];
        const Index cols = ds.length() - 1;
        DatasetLoss entry{ds.name(), 0.0, false, std::nullopt, {}};
        const auto roll = rollout(model, ds.state(0), ds.inputs(), cols, bound);
        if (roll.diverged) {
            entry.diverged = true;
            entry.diverged_at = roll.diverged_at;
        } else {
            const auto truth = ds.states().leftCols(cols);
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const auto row = static_cast<Index>(j);
                const double err = (roll.trajectory.row(row) - truth.row(row)).norm();
                entry.component_errors.push_back(err);
                sum += weights.r[j] * err / truth.row(row).norm();
            }
            entry.term = sum / std::sqrt(static_cast<double>(cols));
            weighted += weights.q[i] * entry.term;
        }
        report.per_dataset.push_back(std::move(entry));
    }
    report.j_ms = report.diverged() ? penalty : weighted / (Q * R) + report.sparsity_penalty;
    return report;
}

}  // namespace sindy_lom
