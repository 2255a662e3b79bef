#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sindy_lom/dataset.hpp"
#include "sindy_lom/error.hpp"
#include "sindy_lom/liboptim.hpp"
#include "sindy_lom/library.hpp"
#include "sindy_lom/rollout.hpp"
#include "sindy_lom/stlsq.hpp"

namespace sindy_lom {

enum class SignalKind { PiecewiseConstant, Sinusoids, Chirp };

struct InputSignal {
    SignalKind kind = SignalKind::PiecewiseConstant;
    double low = -1.0;
    double high = 1.0;
    /// Samples per level (piecewise constant).
    int hold = 20;
    /// Number of summed sinusoids.
    int harmonics = 3;
    /// Frequency range in cycles per sample (sinusoids, chirp).
    double f_low = 0.002;
    double f_high = 0.05;
};

/// One signal description per exogenous input.
struct ExcitationSpec {
    std::vector<InputSignal> inputs;

    static ExcitationSpec uniform(Index m, InputSignal signal = {}) {
        return {std::vector<InputSignal>(static_cast<std::size_t>(m), signal)};
    }
};

/// m x length input sequence; every value stays inside [low, high] of its signal.
inline Eigen::MatrixXd generate_inputs(const ExcitationSpec& spec, Index length, std::uint64_t seed) {
    const auto m = static_cast<Index>(spec.inputs.size());
    Eigen::MatrixXd w(m, length);
    for (Index i = 0; i < m; ++i) {
        const auto& sig = spec.inputs[static_cast<std::size_t>(i)];
        if (!(sig.low <= sig.high)) throw ConfigError("excitation: low must be <= high");
        std::mt19937_64 rng(detail::stream_seed(seed, 0xe1c, static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double mid = 0.5 * (sig.low + sig.high), half = 0.5 * (sig.high - sig.low);
        switch (sig.kind) {
            case SignalKind::PiecewiseConstant: {
                if (sig.hold < 1) throw ConfigError("excitation: hold must be >= 1");
                double level = 0.0;
                for (Index k = 0; k < length; ++k) {
                    if (k % sig.hold == 0) level = sig.low + unit(rng) * (sig.high - sig.low);
                    w(i, k) = level;
                }
                break;
            }
            case SignalKind::Sinusoids: {
                if (sig.harmonics < 1) throw ConfigError("excitation: harmonics must be >= 1");
                std::vector<double> freq, phase;
                for (int h = 0; h < sig.harmonics; ++h) {
                    freq.push_back(sig.f_low + unit(rng) * (sig.f_high - sig.f_low));
                    phase.push_back(2.0 * std::numbers::pi * unit(rng));
                }
                for (Index k = 0; k < length; ++k) {
                    double s = 0.0;
                    for (int h = 0; h < sig.harmonics; ++h)
                        s += std::sin(2.0 * std::numbers::pi * freq[h] * static_cast<double>(k) + phase[h]);
                    w(i, k) = std::clamp(mid + half * s / sig.harmonics, sig.low, sig.high);
                }
                break;
            }
            case SignalKind::Chirp: {
                const double phase0 = 2.0 * std::numbers::pi * unit(rng);
                const double span = static_cast<double>(std::max<Index>(length, 1));
                for (Index k = 0; k < length; ++k) {
                    const double t = static_cast<double>(k);
                    const double ph = 2.0 * std::numbers::pi * (sig.f_low * t + 0.5 * (sig.f_high - sig.f_low) * t * t / span);
                    w(i, k) = std::clamp(mid + half * std::sin(ph + phase0), sig.low, sig.high);
                }
                break;
            }
        }
    }
    return w;
}

/**
 * Discrete-time plant with known sparse ground truth.
 *
 * `truth` is the exact in-library model of the plant; `fit_library` is the
 * polynomial library a conventional fit would use (it may be unable to
 * express the dynamics, which is the point of P3 and P4).
 */
struct SyntheticPlant {
    std::string name;
    std::string description;
    SindyModel truth;
    LibrarySpec fit_library;
    /// How RBFs are appended when the plant is identified with a parametrized library.
    RbfOptions rbf_options;
    Index rbf_count = 0;
    ExcitationSpec excitation;
    Eigen::VectorXd x0;
    double noise_stddev = 0.0;
    /// Suggested init interval for library optimization (one entry per Phi slot of the RBF block).
    Eigen::VectorXd init_low;
    Eigen::VectorXd init_high;

    Index n_state() const { return truth.n_state(); }
    Index m_input() const { return truth.m_input(); }

    /// fit_library with this plant's RBF block appended.
    LibrarySpec parametrized_library() const {
        return rbf_count > 0 ? append_rbfs(fit_library, rbf_count, rbf_options) : fit_library;
    }
};

/**
 * Simulates `steps` transitions (steps + 1 samples) of the true dynamics from
 * x0, then adds i.i.d. Gaussian observation noise to the recorded states.
 */
inline TimeSeriesDataset simulate(const SyntheticPlant& plant, const ExcitationSpec& excitation,
                                  const Eigen::VectorXd& x0, Index steps, std::uint64_t seed,
                                  std::string name = {}, double bound = kDefaultDivergenceBound) {
    if (steps < 2) throw ConfigError("simulate: need at least 2 steps");
    if (static_cast<Index>(excitation.inputs.size()) != plant.m_input())
        throw DimensionError("simulate: excitation has " + std::to_string(excitation.inputs.size()) +
                             " signals, plant has " + std::to_string(plant.m_input()) + " inputs");
    if (x0.size() != plant.n_state()) throw DimensionError("simulate: x0 dimension mismatch");
    const Eigen::MatrixXd w = generate_inputs(excitation, steps + 1, seed);
    const auto roll = rollout(plant.truth, x0, w, steps + 1, bound);
    if (roll.diverged)
        throw DivergenceError("simulate: plant '" + plant.name + "' diverged at step " +
                              std::to_string(*roll.diverged_at));
    Eigen::MatrixXd states = roll.trajectory;
    if (plant.noise_stddev > 0.0) {
        std::mt19937_64 rng(detail::stream_seed(seed, 0x401e));
        std::normal_distribution<double> noise(0.0, plant.noise_stddev);
        for (Index k = 0; k < states.cols(); ++k)
            for (Index j = 0; j < states.rows(); ++j) states(j, k) += noise(rng);
    }
    if (name.empty()) name = plant.name + "_s" + std::to_string(seed);
    return TimeSeriesDataset(std::move(name), std::move(states), w);
}

inline TimeSeriesDataset simulate(const SyntheticPlant& plant, Index steps, std::uint64_t seed,
                                  std::string name = {}) {
    return simulate(plant, plant.excitation, plant.x0, steps, seed, std::move(name));
}

namespace detail {

inline Index find_term(const LibrarySpec& spec, std::string_view label) {
    for (Index i = 0; i < spec.size(); ++i)
        if (spec.label(i) == label) return i;
    throw ConfigError("no library term '" + std::string(label) + "'");
}

struct Term {
    std::string_view label;
    Index state;
    double coefficient;
};

inline CoefficientMatrix coefficients(const LibrarySpec& spec, std::initializer_list<Term> terms) {
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(spec.size(), spec.n_state());
    for (const auto& t : terms) xi(find_term(spec, t.label), t.state) = t.coefficient;
    return CoefficientMatrix(std::move(xi));
}

}  // namespace detail

/**
 * P1  linear, 2 states, 1 input:  x1+ = 0.9 x1 + 0.4 w1,  x2+ = 0.5 x1.
 * P2  quadratic coupled, 2 states, 2 inputs:
 *       x1+ = 0.8 x1 + 0.1 x1 x2 + 0.4 w1,  x2+ = 0.7 x2 + 0.2 w2 + 0.3 w1^2.
 * P3  RBF nonlinearity, 1 state, 1 input:
 *       x+ = 0.2 x + w - 1.5 exp(-(x - 0.5)^2 / 0.8^2).
 * P4  near-unstable with a weak RBF bump, 1 state, 1 input:
 *       x+ = 0.98 x + 0.04 w + 0.03 exp(-(x - 1)^2 / 0.5^2).
 */
inline std::vector<SyntheticPlant> builtin_plants() {
    std::vector<SyntheticPlant> plants;
    const RbfOptions state_rbf{{0}, std::nullopt};
    const InputSignal steps_signal{};

    {
        auto lib = polynomial_library(2, 1, 2);
        auto xi = detail::coefficients(lib, {{"x1", 0, 0.9}, {"w1", 0, 0.4}, {"x1", 1, 0.5}});
        plants.push_back({"P1", "linear 2-state stable plant", SindyModel(lib, Eigen::VectorXd(0), xi), lib, {}, 0,
                          ExcitationSpec::uniform(1, steps_signal), Eigen::Vector2d(0.5, -0.2), 0.0, {}, {}});
    }
    {
        auto lib = polynomial_library(2, 2, 2);
        auto xi = detail::coefficients(lib, {{"x1", 0, 0.8},
                                             {"w1", 0, 0.4},
                                             {"x1*x2", 0, 0.1},
                                             {"x2", 1, 0.7},
                                             {"w2", 1, 0.2},
                                             {"w1^2", 1, 0.3}});
        plants.push_back({"P2", "quadratic coupled plant", SindyModel(lib, Eigen::VectorXd(0), xi), lib, {}, 0,
                          ExcitationSpec::uniform(2, steps_signal), Eigen::Vector2d(0.2, 0.1), 0.0, {}, {}});
    }
    {
        auto poly = polynomial_library(1, 1, 2);
        auto lib = append_rbfs(poly, 1, state_rbf);
        auto xi = detail::coefficients(lib, {{"x1", 0, 0.2}, {"w1", 0, 1.0}, {"rbf1", 0, -1.5}});
        plants.push_back({"P3", "RBF nonlinearity outside any polynomial library",
                          SindyModel(lib, Eigen::Vector2d(0.5, 0.8), xi), poly, state_rbf, 1,
                          ExcitationSpec::uniform(1, steps_signal), Eigen::VectorXd::Zero(1), 0.0,
                          Eigen::Vector2d(-2.0, 0.05), Eigen::Vector2d(2.0, 2.0)});
    }
    {
        auto poly = polynomial_library(1, 1, 2);
        auto lib = append_rbfs(poly, 1, state_rbf);
        auto xi = detail::coefficients(lib, {{"x1", 0, 0.98}, {"w1", 0, 0.04}, {"rbf1", 0, 0.03}});
        plants.push_back({"P4", "near-unstable plant with weak out-of-library nonlinearity",
                          SindyModel(lib, Eigen::Vector2d(1.0, 0.5), xi), poly, state_rbf, 1,
                          ExcitationSpec::uniform(1, steps_signal), Eigen::VectorXd::Zero(1), 0.0,
                          Eigen::Vector2d(-2.0, 0.05), Eigen::Vector2d(3.0, 2.0)});
    }
    return plants;
}

inline SyntheticPlant find_plant(std::string_view name) {
    for (auto& p : builtin_plants())
        if (p.name == name) return p;
    throw ConfigError("unknown plant '" + std::string(name) + "' (expected P1, P2, P3 or P4)");
}

}  // namespace sindy_lom
