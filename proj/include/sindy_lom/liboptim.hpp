#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sindy_lom/dataset.hpp"
#include "sindy_lom/error.hpp"
#include "sindy_lom/library.hpp"
#include "sindy_lom/loss.hpp"
#include "sindy_lom/rollout.hpp"
#include "sindy_lom/stlsq.hpp"

namespace sindy_lom {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for (master, a, b).
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers with static partitioning.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += workers) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

struct GaConfig {
    int population_size = 60;
    int max_generations = 200;
    /// Probability that a non-elite child is produced by crossover rather than mutation.
    double crossover_fraction = 0.8;
    /// Mutation stddev as a fraction of the init interval width.
    double mutation_stddev = 0.1;
    /// Linear decay of the mutation stddev; 1 reaches zero at max_generations.
    double mutation_shrink = 1.0;
    double blend_alpha = 0.5;
    int elite_count = 2;
    int tournament_size = 3;
    Eigen::VectorXd init_low;
    Eigen::VectorXd init_high;
    std::uint64_t seed = 0;
    int stall_generations = 50;
    int threads = 1;

    /// Same scalar interval on every coordinate.
    static GaConfig with_interval(Index dim, double low, double high) {
        GaConfig cfg;
        cfg.init_low = Eigen::VectorXd::Constant(dim, low);
        cfg.init_high = Eigen::VectorXd::Constant(dim, high);
        return cfg;
    }

    void validate(Index dim) const {
        if (population_size < 2) throw ConfigError("ga: population_size must be >= 2");
        if (max_generations < 1) throw ConfigError("ga: max_generations must be >= 1");
        if (!(crossover_fraction > 0.0 && crossover_fraction < 1.0))
            throw ConfigError("ga: crossover_fraction must lie in (0, 1)");
        if (!(mutation_stddev > 0.0)) throw ConfigError("ga: mutation_stddev must be > 0");
        if (!(mutation_shrink >= 0.0 && mutation_shrink <= 1.0)) throw ConfigError("ga: mutation_shrink must lie in [0, 1]");
        if (!(blend_alpha >= 0.0)) throw ConfigError("ga: blend_alpha must be >= 0");
        if (elite_count < 0 || elite_count >= population_size)
            throw ConfigError("ga: elite_count must lie in [0, population_size)");
        if (tournament_size < 1) throw ConfigError("ga: tournament_size must be >= 1");
        if (stall_generations < 1) throw ConfigError("ga: stall_generations must be >= 1");
        if (init_low.size() != dim || init_high.size() != dim)
            throw ConfigError("ga: init interval has " + std::to_string(init_low.size()) + "/" +
                              std::to_string(init_high.size()) + " entries, expected " + std::to_string(dim));
        if (!(init_low.array() < init_high.array()).all()) throw ConfigError("ga: init_low must be < init_high");
    }
};

struct GenerationRecord {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
    Eigen::VectorXd best_phi;
};

struct MinimizeResult {
    Eigen::VectorXd best;
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<GenerationRecord> generations;
    std::size_t evaluations = 0;
};

/// Outer-layer optimizer over Phi. The genetic algorithm is the shipped implementation.
class OuterOptimizer {
   public:
    using Objective = std::function<double(const Eigen::VectorXd&)>;
    virtual ~OuterOptimizer() = default;
    /// `objective` must be thread-safe when the optimizer evaluates in parallel.
    virtual MinimizeResult minimize(const Objective& objective, Index dim) const = 0;
};

/**
 * Real-coded generational GA.
 *
 * Generation g: evaluate every individual, keep the `elite_count` best, fill
 * the rest with children. Each child draws two tournament winners; with
 * probability crossover_fraction it is a blend (BLX-alpha) of them, otherwise
 * the first parent plus Gaussian noise. Child i of generation g uses its own
 * RNG stream derived from (seed, g, i), so results do not depend on `threads`.
 * The search domain is unbounded; init_low/init_high only seed generation 0
 * and scale the mutation.
 */
class GeneticAlgorithm final : public OuterOptimizer {
   public:
    explicit GeneticAlgorithm(GaConfig cfg) : cfg_(std::move(cfg)) {}
    const GaConfig& config() const { return cfg_; }

    MinimizeResult minimize(const Objective& objective, Index dim) const override {
        cfg_.validate(dim);
        const auto pop_n = static_cast<std::size_t>(cfg_.population_size);
        const Eigen::VectorXd width = cfg_.init_high - cfg_.init_low;

        std::vector<Eigen::VectorXd> pop(pop_n);
        for (std::size_t i = 0; i < pop_n; ++i) {
            std::mt19937_64 rng(detail::stream_seed(cfg_.seed, 0, i));
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            pop[i].resize(dim);
            for (Index d = 0; d < dim; ++d) pop[i](d) = cfg_.init_low(d) + unit(rng) * width(d);
        }

        MinimizeResult result;
        std::vector<double> fitness(pop_n);
        int stall = 0;
        for (int gen = 0; gen < cfg_.max_generations; ++gen) {
            detail::parallel_for(pop_n, cfg_.threads, [&](std::size_t i) {
                const double v = objective(pop[i]);
                fitness[i] = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
            });
            result.evaluations += pop_n;

            std::vector<std::size_t> order(pop_n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });

            const double gen_best = fitness[order.front()];
            if (gen_best < result.best_value) {
                result.best_value = gen_best;
                result.best = pop[order.front()];
                stall = 0;
            } else {
                ++stall;
            }
            double mean = 0.0;
            for (double f : fitness) mean += f;
            mean /= static_cast<double>(pop_n);
            result.generations.push_back({gen, result.best_value, mean, result.best});

            if (gen + 1 == cfg_.max_generations || stall >= cfg_.stall_generations) break;

            const double shrink =
                1.0 - cfg_.mutation_shrink * static_cast<double>(gen + 1) / static_cast<double>(cfg_.max_generations);
            const Eigen::VectorXd sigma = cfg_.mutation_stddev * std::max(shrink, 0.0) * width;

            std::vector<Eigen::VectorXd> next(pop_n);
            const auto elites = static_cast<std::size_t>(cfg_.elite_count);
            for (std::size_t e = 0; e < elites; ++e) next[e] = pop[order[e]];
            detail::parallel_for(pop_n - elites, cfg_.threads, [&](std::size_t c) {
                const std::size_t slot = elites + c;
                std::mt19937_64 rng(detail::stream_seed(cfg_.seed, static_cast<std::uint64_t>(gen) + 1, slot));
                next[slot] = make_child(pop, fitness, sigma, rng);
            });
            pop = std::move(next);
        }
        return result;
    }

   private:
    std::size_t tournament(const std::vector<double>& fitness, std::mt19937_64& rng) const {
        std::uniform_int_distribution<std::size_t> pick(0, fitness.size() - 1);
        std::size_t best = pick(rng);
        for (int t = 1; t < cfg_.tournament_size; ++t) {
            const auto c = pick(rng);
            if (fitness[c] < fitness[best]) best = c;
        }
        return best;
    }

    Eigen::VectorXd make_child(const std::vector<Eigen::VectorXd>& pop, const std::vector<double>& fitness,
                               const Eigen::VectorXd& sigma, std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const auto& a = pop[tournament(fitness, rng)];
        const auto& b = pop[tournament(fitness, rng)];
        Eigen::VectorXd child(a.size());
        if (unit(rng) < cfg_.crossover_fraction) {
            for (Index d = 0; d < a.size(); ++d) {
                const double lo = std::min(a(d), b(d)), hi = std::max(a(d), b(d));
                const double span = hi - lo;
                child(d) = lo - cfg_.blend_alpha * span + unit(rng) * (1.0 + 2.0 * cfg_.blend_alpha) * span;
            }
        } else {
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (Index d = 0; d < a.size(); ++d) child(d) = a(d) + sigma(d) * gauss(rng);
        }
        return child;
    }

    GaConfig cfg_;
};

struct LomConfig {
    StlsqConfig stlsq;
    LossWeights weights;
    GaConfig ga;
    double divergence_bound = kDefaultDivergenceBound;
    double divergence_penalty = kDivergencePenalty;

    void validate(Index phi_dim, std::size_t ll_count, std::size_t n_state) const {
        stlsq.validate();
        weights.validate(ll_count, n_state);
        ga.validate(phi_dim);
        if (!(divergence_bound > 0.0)) throw ConfigError("divergence bound must be > 0");
        if (!(divergence_penalty > 0.0)) throw ConfigError("divergence penalty must be > 0");
    }
};

struct CandidateResult {
    CoefficientMatrix xi;
    LossReport report;
};

/// Sparse regression on SR with this Phi, then J_ms over the LL datasets.
inline CandidateResult evaluate_candidate(const Eigen::VectorXd& phi, const LibrarySpec& spec,
                                          const TimeSeriesDataset& sr, const std::vector<TimeSeriesDataset>& ll,
                                          const LomConfig& cfg) {
    auto xi = fit(spec, shifted(sr), phi, cfg.stlsq);
    const SindyModel model(spec, phi, xi);
    auto report = j_ms(model, ll, cfg.weights, cfg.divergence_bound, cfg.divergence_penalty);
    return {std::move(xi), std::move(report)};
}

struct OptimTrace {
    std::vector<GenerationRecord> generations;
    Eigen::VectorXd best_phi;
    CoefficientMatrix best_xi;
    LossReport best_report;
    std::size_t evaluations = 0;
};

/// Library optimization: minimizes J_ms over Phi, then refits Xi at the best Phi.
inline OptimTrace optimize(const LibrarySpec& spec, const TimeSeriesDataset& sr,
                           const std::vector<TimeSeriesDataset>& ll, const LomConfig& cfg,
                           const OuterOptimizer& optimizer) {
    cfg.validate(spec.phi_dim(), ll.size(), static_cast<std::size_t>(spec.n_state()));
    const auto sm = shifted(sr);
    auto objective = [&](const Eigen::VectorXd& phi) {
        const SindyModel model(spec, phi, fit(spec, sm, phi, cfg.stlsq));
        return j_ms(model, ll, cfg.weights, cfg.divergence_bound, cfg.divergence_penalty).j_ms;
    };
    auto found = optimizer.minimize(objective, spec.phi_dim());
    auto final = evaluate_candidate(found.best, spec, sr, ll, cfg);
    return {std::move(found.generations), std::move(found.best), std::move(final.xi), std::move(final.report),
            found.evaluations};
}

inline OptimTrace optimize(const LibrarySpec& spec, const TimeSeriesDataset& sr,
                           const std::vector<TimeSeriesDataset>& ll, const LomConfig& cfg) {
    return optimize(spec, sr, ll, cfg, GeneticAlgorithm(cfg.ga));
}

/// Phi drawn uniformly from [low, high] (a fixed random library).
inline Eigen::VectorXd random_phi(const Eigen::VectorXd& low, const Eigen::VectorXd& high, std::uint64_t seed) {
    if (low.size() != high.size()) throw ConfigError("random_phi: interval size mismatch");
    std::mt19937_64 rng(detail::stream_seed(seed, 0x5eed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd phi(low.size());
    for (Index d = 0; d < low.size(); ++d) phi(d) = low(d) + unit(rng) * (high(d) - low(d));
    return phi;
}

// ---------------------------------------------------------------------------
// Strategy comparison

enum class PhiMode { None, Fixed, Optimized };

struct Strategy {
    std::string name;
    LibrarySpec library;
    PhiMode mode = PhiMode::None;
    /// Used when mode == Fixed.
    Eigen::VectorXd phi;
};

/// Errors of one model on one dataset.
struct DatasetErrors {
    std::string dataset;
    bool rlt_diverged = false;
    std::optional<Index> diverged_at;
    /// ||E_hat_j||_2 over k = 0..N-1 (empty when diverged).
    std::vector<double> rlt_errors;
    /// (1/(R sqrt N)) sum_j r_j ||E_hat_j|| / ||X_j||.
    double rlt_term = 0.0;
    /// ||E_check_j||_2 over k = 1..N.
    std::vector<double> one_step_errors;
    /// (1/(R sqrt N)) sum_j r_j ||E_check_j|| / ||X+_j||.
    double one_step_term = 0.0;
    /// ||E_check_j|| / ||X+_j||, equal to the per-sample RMS ratio.
    std::vector<double> one_step_relative;
};

struct StrategyOutcome {
    std::string name;
    SindyModel model;
    /// J_ms over the LL datasets.
    LossReport loss;
    std::vector<DatasetErrors> datasets;
    std::optional<OptimTrace> trace;
};

struct ComparisonReport {
    std::vector<StrategyOutcome> strategies;
};

inline DatasetErrors dataset_errors(const SindyModel& model, const TimeSeriesDataset& ds,
                                    const std::vector<double>& r, double bound) {
    const Index cols = ds.length() - 1;
    const auto n = static_cast<std::size_t>(model.n_state());
    if (r.size() != n) throw ConfigError("dataset_errors: r weight count");
    double R = 0.0;
    for (double v : r) R += v;
    const double scale = 1.0 / (R * std::sqrt(static_cast<double>(cols)));

    DatasetErrors out;
    out.dataset = ds.name();
    const auto roll = rollout(model, ds.state(0), ds.inputs(), cols, bound);
    if (roll.diverged) {
        out.rlt_diverged = true;
        out.diverged_at = roll.diverged_at;
    } else {
        double term = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto row = static_cast<Index>(j);
            const auto truth = ds.states().row(row).head(cols);
            const double e = (roll.trajectory.row(row) - truth).norm();
            out.rlt_errors.push_back(e);
            term += r[j] * e / truth.norm();
        }
        out.rlt_term = term * scale;
    }
    const auto pred = predict_one_step(model, ds);
    if (pred.diverged_columns.empty()) {
        double term = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto row = static_cast<Index>(j);
            const auto truth = ds.states().row(row).tail(cols);
            const double e = (pred.states.row(row) - truth).norm();
            out.one_step_errors.push_back(e);
            out.one_step_relative.push_back(e / truth.norm());
            term += r[j] * e / truth.norm();
        }
        out.one_step_term = term * scale;
    } else {
        out.one_step_term = std::numeric_limits<double>::infinity();
    }
    return out;
}

/**
 * Runs each strategy on the same SR data. Fixed strategies fit once; the
 * optimized strategy runs the library optimization against `ll`. Every model
 * is then scored on `evaluation` (RLT and one-step errors per component).
 */
inline ComparisonReport run_strategy_comparison(const std::vector<Strategy>& strategies, const TimeSeriesDataset& sr,
                                                const std::vector<TimeSeriesDataset>& ll,
                                                const std::vector<TimeSeriesDataset>& evaluation,
                                                const LomConfig& cfg) {
    if (strategies.empty()) throw ConfigError("compare: no strategies");
    ComparisonReport report;
    const auto sm = shifted(sr);
    for (const auto& s : strategies) {
        std::optional<OptimTrace> trace;
        Eigen::VectorXd phi;
        CoefficientMatrix xi;
        switch (s.mode) {
            case PhiMode::None:
                if (s.library.phi_dim() != 0) throw ConfigError("strategy '" + s.name + "' needs Phi");
                phi = Eigen::VectorXd(0);
                xi = fit(s.library, sm, phi, cfg.stlsq);
                break;
            case PhiMode::Fixed:
                phi = s.phi;
                xi = fit(s.library, sm, phi, cfg.stlsq);
                break;
            case PhiMode::Optimized: {
                LomConfig local = cfg;
                if (local.ga.init_low.size() != s.library.phi_dim())
                    throw ConfigError("strategy '" + s.name + "': init interval does not match phi_dim");
                trace = optimize(s.library, sr, ll, local);
                phi = trace->best_phi;
                xi = trace->best_xi;
                break;
            }
        }
        SindyModel model(s.library, phi, xi);
        auto loss = j_ms(model, ll, cfg.weights, cfg.divergence_bound, cfg.divergence_penalty);
        std::vector<DatasetErrors> per;
        for (const auto& ds : evaluation) per.push_back(dataset_errors(model, ds, cfg.weights.r, cfg.divergence_bound));
        report.strategies.push_back({s.name, std::move(model), std::move(loss), std::move(per), std::move(trace)});
    }
    return report;
}

}  // namespace sindy_lom
