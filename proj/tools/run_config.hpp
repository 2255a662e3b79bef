#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sindy_lom/sindy_lom.hpp"

namespace sindy_lom::cli {

/**
 * Everything a batch run needs. Every field has a default; a config file
 * (INI-style sections such as [stlsq], [loss], [ga]) replaces defaults and
 * command-line flags replace config values.
 */
struct RunConfig {
    // [data]
    std::string sr;
    std::vector<std::string> ll;
    std::vector<std::string> holdout;
    bool sr_as_ll = true;
    Index n_state = 0;
    Index m_input = 0;

    // [library]
    int degree = 2;
    Index rbf_count = 0;
    std::vector<std::size_t> rbf_components;
    std::optional<double> rbf_fixed_scale;
    std::vector<double> phi;
    std::optional<std::uint64_t> phi_seed;

    // [stlsq]
    StlsqConfig stlsq;

    // [loss]
    std::vector<double> q;
    std::vector<double> r;
    double kappa = kDefaultKappa;
    double bound = kDefaultDivergenceBound;
    double penalty = kDivergencePenalty;

    // [ga]
    int population = 60;
    int generations = 200;
    double crossover_fraction = 0.8;
    double mutation_stddev = 0.1;
    double mutation_shrink = 1.0;
    double blend_alpha = 0.5;
    int elite_count = 2;
    int tournament_size = 3;
    int stall_generations = 50;
    std::vector<double> init_low{-500.0};
    std::vector<double> init_high{500.0};

    // [run]
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir = ".";
    std::vector<int> strategies{1, 2, 3};

    void validate() const {
        if (n_state < 1) throw ConfigError("config: n_state must be >= 1");
        if (m_input < 0) throw ConfigError("config: m_input must be >= 0");
        if (degree < 0) throw ConfigError("config: degree must be >= 0");
        if (rbf_count < 0) throw ConfigError("config: rbf_count must be >= 0");
        if (threads < 1) throw ConfigError("config: threads must be >= 1");
        stlsq.validate();
        if (!(kappa >= 0.0)) throw ConfigError("config: kappa must be >= 0");
        if (!(bound > 0.0)) throw ConfigError("config: bound must be > 0");
        for (int s : strategies)
            if (s < 1 || s > 3) throw ConfigError("config: strategies are 1, 2 or 3");
    }

    LibrarySpec polynomial() const { return polynomial_library(n_state, m_input, degree); }

    LibrarySpec library() const {
        auto spec = polynomial();
        if (rbf_count > 0) spec = append_rbfs(spec, rbf_count, RbfOptions{rbf_components, rbf_fixed_scale});
        return spec;
    }

    /// Broadcasts a scalar interval bound to phi_dim entries.
    static Eigen::VectorXd expand(const std::vector<double>& v, Index dim, const char* what) {
        if (v.size() == 1) return Eigen::VectorXd::Constant(dim, v.front());
        if (static_cast<Index>(v.size()) != dim)
            throw ConfigError(std::string("config: ") + what + " needs 1 or " + std::to_string(dim) + " values");
        return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
    }

    GaConfig ga(Index phi_dim) const {
        GaConfig g;
        g.population_size = population;
        g.max_generations = generations;
        g.crossover_fraction = crossover_fraction;
        g.mutation_stddev = mutation_stddev;
        g.mutation_shrink = mutation_shrink;
        g.blend_alpha = blend_alpha;
        g.elite_count = elite_count;
        g.tournament_size = tournament_size;
        g.stall_generations = stall_generations;
        g.init_low = expand(init_low, phi_dim, "init_low");
        g.init_high = expand(init_high, phi_dim, "init_high");
        g.seed = seed;
        g.threads = threads;
        return g;
    }

    LossWeights weights(std::size_t ll_count) const {
        LossWeights w = LossWeights::uniform(ll_count, static_cast<std::size_t>(n_state), kappa);
        if (!q.empty()) w.q = q;
        if (!r.empty()) w.r = r;
        return w;
    }

    LomConfig lom(Index phi_dim, std::size_t ll_count) const {
        LomConfig c;
        c.stlsq = stlsq;
        c.weights = weights(ll_count);
        c.ga = ga(phi_dim);
        c.divergence_bound = bound;
        c.divergence_penalty = penalty;
        return c;
    }

    /// Phi for a fixed (non-optimized) parametrized library.
    Eigen::VectorXd fixed_phi(const LibrarySpec& spec) const {
        if (spec.phi_dim() == 0) return Eigen::VectorXd(0);
        if (!phi.empty()) {
            if (static_cast<Index>(phi.size()) != spec.phi_dim())
                throw ConfigError("config: phi has " + std::to_string(phi.size()) + " values, library needs " +
                                  std::to_string(spec.phi_dim()));
            return Eigen::Map<const Eigen::VectorXd>(phi.data(), spec.phi_dim());
        }
        return random_phi(expand(init_low, spec.phi_dim(), "init_low"), expand(init_high, spec.phi_dim(), "init_high"),
                          phi_seed.value_or(seed));
    }

    /// Snapshot for model provenance.
    Json to_json() const {
        return Json{{"degree", degree},
                    {"rbf_count", rbf_count},
                    {"rbf_components", rbf_components},
                    {"lambda", stlsq.lambda},
                    {"k_max", stlsq.k_max},
                    {"rank_tol", stlsq.rank_tol},
                    {"kappa", kappa},
                    {"q", q},
                    {"r", r},
                    {"bound", bound},
                    {"penalty", penalty},
                    {"population", population},
                    {"generations", generations},
                    {"crossover_fraction", crossover_fraction},
                    {"mutation_stddev", mutation_stddev},
                    {"mutation_shrink", mutation_shrink},
                    {"elite_count", elite_count},
                    {"tournament_size", tournament_size},
                    {"stall_generations", stall_generations},
                    {"init_low", init_low},
                    {"init_high", init_high}};
    }
};

namespace detail {

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = item.find_last_not_of(" \t");
        std::istringstream is(item.substr(first, last - first + 1));
        T v{};
        if (!(is >> v) || !is.eof()) throw ConfigError("config: bad value '" + item + "' for " + key);
        out.push_back(v);
    }
    return out;
}

inline std::vector<std::string> parse_paths(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        out.push_back(item.substr(first, item.find_last_not_of(" \t") - first + 1));
    }
    return out;
}

}  // namespace detail

/// Reads an INI config; unknown sections or keys are rejected.
inline RunConfig load_run_config(std::istream& in, RunConfig cfg = {}) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw ConfigError("config: key '" + section + "' outside of a section");
        for (const auto& [key, node] : body) {
            const auto value = node.get_value<std::string>();
            const auto name = section + "." + key;
            auto as = [&](auto& target) {
                using T = std::decay_t<decltype(target)>;
                const auto v = detail::parse_list<T>(value, name);
                if (v.size() != 1) throw ConfigError("config: " + name + " expects a single value");
                target = v.front();
            };
            auto as_bool = [&](bool& target) {
                if (value == "true" || value == "1") target = true;
                else if (value == "false" || value == "0") target = false;
                else throw ConfigError("config: " + name + " expects true/false");
            };
            if (name == "data.sr") cfg.sr = value;
            else if (name == "data.ll") cfg.ll = detail::parse_paths(value);
            else if (name == "data.holdout") cfg.holdout = detail::parse_paths(value);
            else if (name == "data.sr_as_ll") as_bool(cfg.sr_as_ll);
            else if (name == "data.n_state") as(cfg.n_state);
            else if (name == "data.m_input") as(cfg.m_input);
            else if (name == "library.degree") as(cfg.degree);
            else if (name == "library.rbf_count") as(cfg.rbf_count);
            else if (name == "library.rbf_components") cfg.rbf_components = detail::parse_list<std::size_t>(value, name);
            else if (name == "library.rbf_fixed_scale") { double s = 0; as(s); cfg.rbf_fixed_scale = s; }
            else if (name == "library.phi") cfg.phi = detail::parse_list<double>(value, name);
            else if (name == "library.phi_seed") { std::uint64_t s = 0; as(s); cfg.phi_seed = s; }
            else if (name == "stlsq.lambda") as(cfg.stlsq.lambda);
            else if (name == "stlsq.k_max") as(cfg.stlsq.k_max);
            else if (name == "stlsq.rank_tol") as(cfg.stlsq.rank_tol);
            else if (name == "loss.q") cfg.q = detail::parse_list<double>(value, name);
            else if (name == "loss.r") cfg.r = detail::parse_list<double>(value, name);
            else if (name == "loss.kappa") as(cfg.kappa);
            else if (name == "loss.bound") as(cfg.bound);
            else if (name == "loss.penalty") as(cfg.penalty);
            else if (name == "ga.population") as(cfg.population);
            else if (name == "ga.generations") as(cfg.generations);
            else if (name == "ga.crossover_fraction") as(cfg.crossover_fraction);
            else if (name == "ga.mutation_stddev") as(cfg.mutation_stddev);
            else if (name == "ga.mutation_shrink") as(cfg.mutation_shrink);
            else if (name == "ga.blend_alpha") as(cfg.blend_alpha);
            else if (name == "ga.elite_count") as(cfg.elite_count);
            else if (name == "ga.tournament_size") as(cfg.tournament_size);
            else if (name == "ga.stall_generations") as(cfg.stall_generations);
            else if (name == "ga.init_low") cfg.init_low = detail::parse_list<double>(value, name);
            else if (name == "ga.init_high") cfg.init_high = detail::parse_list<double>(value, name);
            else if (name == "run.seed") as(cfg.seed);
            else if (name == "run.threads") as(cfg.threads);
            else if (name == "run.out_dir") cfg.out_dir = value;
            else if (name == "run.strategies") cfg.strategies = detail::parse_list<int>(value, name);
            else throw ConfigError("config: unknown key '" + name + "'");
        }
    }
    return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path, RunConfig cfg = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    return load_run_config(in, std::move(cfg));
}

}  // namespace sindy_lom::cli
