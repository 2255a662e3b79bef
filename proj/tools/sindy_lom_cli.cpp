// sindy_lom: batch front end for sparse identification with library optimization.
//
//   sindy_lom simulate   --plant P3 --steps 2000 --seed 1 --out sr.csv
//   sindy_lom fit        --sr sr.csv --n-state 1 --m-input 1 --out-dir fit/
//   sindy_lom lom        --config lom.ini --ll ll.csv --out-dir lom/
//   sindy_lom predict    --model lom/model.json --data ll.csv --mode rlt --out pred.csv
//   sindy_lom compare    --config compare.ini --out-dir cmp/
//   sindy_lom model-info --model lom/model.json
//
// Exit codes: 0 success (divergence is reported, not an error), 1 module
// error, 2 usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "sindy_lom/sindy_lom.hpp"

namespace fs = std::filesystem;
using namespace sindy_lom;
using sindy_lom::cli::RunConfig;

namespace {

constexpr const char* kEnvPrefix = "SINDY_LOM_";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flags shared by every computing subcommand; unset optionals keep config values.
struct CommonFlags {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<double> lambda;
    std::optional<double> kappa;
    std::optional<int> threads;

    std::optional<std::string> sr;
    std::vector<std::string> ll;
    std::vector<std::string> holdout;
    std::optional<bool> sr_as_ll;
    std::optional<Index> n_state;
    std::optional<Index> m_input;
    std::optional<int> degree;
    std::optional<Index> rbf_count;
    std::vector<std::size_t> rbf_components;
    std::optional<double> rbf_fixed_scale;
    std::vector<double> phi;
    std::optional<std::uint64_t> phi_seed;
    std::optional<int> population;
    std::optional<int> generations;
    std::vector<double> init_low;
    std::vector<double> init_high;
    std::vector<int> strategies;

    void attach(CLI::App* app, bool data_flags) {
        auto env = [](const std::string& s) { return std::string(kEnvPrefix) + s; };
        app->add_option("--config", config, "INI run configuration")->envname(env("CONFIG"));
        app->add_option("--seed", seed, "master random seed")->envname(env("SEED"));
        app->add_option("--out-dir", out_dir, "output directory")->envname(env("OUT_DIR"));
        app->add_option("--lambda", lambda, "STLSQ threshold (default 8.0e-5)")->envname(env("LAMBDA"));
        app->add_option("--kappa", kappa, "sparsity weight in J_ms (default 8.0e-7)")->envname(env("KAPPA"));
        app->add_option("--threads", threads, "worker threads for candidate evaluation")->envname(env("THREADS"));
        if (!data_flags) return;
        app->add_option("--sr", sr, "sparse-regression dataset (CSV)");
        app->add_option("--ll", ll, "library-learning dataset(s) (CSV)");
        app->add_option("--holdout", holdout, "evaluation-only dataset(s) (CSV)");
        app->add_option("--sr-as-ll", sr_as_ll, "also use the SR data as the first LL dataset");
        app->add_option("--n-state", n_state, "number of state columns");
        app->add_option("--m-input", m_input, "number of input columns");
        app->add_option("--degree", degree, "polynomial degree (default 2)");
        app->add_option("--rbf-count", rbf_count, "number of Gaussian RBFs");
        app->add_option("--rbf-components", rbf_components, "u-indices the RBFs act on (default all)");
        app->add_option("--rbf-fixed-scale", rbf_fixed_scale, "hold RBF scales at this value");
        app->add_option("--phi", phi, "fixed Phi values");
        app->add_option("--phi-seed", phi_seed, "seed for a random fixed Phi");
        app->add_option("--population", population, "GA population size");
        app->add_option("--generations", generations, "GA generation cap");
        app->add_option("--init-low", init_low, "GA initial interval lower bound(s)");
        app->add_option("--init-high", init_high, "GA initial interval upper bound(s)");
        app->add_option("--strategies", strategies, "strategies to compare (1, 2, 3)");
    }

    RunConfig resolve() const {
        RunConfig cfg = config ? cli::load_run_config(fs::path(*config)) : RunConfig{};
        if (seed) cfg.seed = *seed;
        if (out_dir) cfg.out_dir = *out_dir;
        if (lambda) cfg.stlsq.lambda = *lambda;
        if (kappa) cfg.kappa = *kappa;
        if (threads) cfg.threads = *threads;
        if (sr) cfg.sr = *sr;
        if (!ll.empty()) cfg.ll = ll;
        if (!holdout.empty()) cfg.holdout = holdout;
        if (sr_as_ll) cfg.sr_as_ll = *sr_as_ll;
        if (n_state) cfg.n_state = *n_state;
        if (m_input) cfg.m_input = *m_input;
        if (degree) cfg.degree = *degree;
        if (rbf_count) cfg.rbf_count = *rbf_count;
        if (!rbf_components.empty()) cfg.rbf_components = rbf_components;
        if (rbf_fixed_scale) cfg.rbf_fixed_scale = rbf_fixed_scale;
        if (!phi.empty()) cfg.phi = phi;
        if (phi_seed) cfg.phi_seed = phi_seed;
        if (population) cfg.population = *population;
        if (generations) cfg.generations = *generations;
        if (!init_low.empty()) cfg.init_low = init_low;
        if (!init_high.empty()) cfg.init_high = init_high;
        if (!strategies.empty()) cfg.strategies = strategies;
        return cfg;
    }
};

struct Data {
    TimeSeriesDataset sr;
    std::vector<TimeSeriesDataset> ll;
    std::vector<TimeSeriesDataset> holdout;

    std::vector<std::string> names() const {
        std::vector<std::string> out{sr.name()};
        for (const auto& d : ll) out.push_back(d.name());
        return out;
    }

    /// SR, LL and holdout datasets without repeats (by name).
    std::vector<TimeSeriesDataset> evaluation() const {
        std::vector<TimeSeriesDataset> out{sr};
        auto add = [&](const TimeSeriesDataset& d) {
            for (const auto& e : out)
                if (e.name() == d.name()) return;
            out.push_back(d);
        };
        for (const auto& d : ll) add(d);
        for (const auto& d : holdout) add(d);
        return out;
    }
};

Data load_data(const RunConfig& cfg, bool need_ll) {
    if (cfg.sr.empty()) throw UsageError("an SR dataset is required (--sr or [data] sr)");
    if (cfg.n_state < 1) throw UsageError("--n-state is required");
    cfg.validate();
    Data d{load_csv(cfg.sr, cfg.n_state, cfg.m_input), {}, {}};
    if (cfg.sr_as_ll) d.ll.push_back(d.sr);
    for (const auto& p : cfg.ll) d.ll.push_back(load_csv(p, cfg.n_state, cfg.m_input));
    for (const auto& p : cfg.holdout) d.holdout.push_back(load_csv(p, cfg.n_state, cfg.m_input));
    if (need_ll && d.ll.empty()) throw UsageError("at least one LL dataset is required (--ll or --sr-as-ll true)");
    return d;
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    fn(out);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void print_summary(const SindyModel& model, const TimeSeriesDataset& sr) {
    std::cout << "library size p = " << model.spec().size() << ", phi_dim = " << model.spec().phi_dim() << '\n';
    std::cout << "||Xi||_0 = " << l0_norm(model.xi()) << '\n';
    std::cout << "J_os(" << sr.name() << ") = " << detail::format_double(j_os(model, sr)) << '\n';
    write_equations(std::cout, model);
}

int cmd_simulate(const std::string& plant_name, Index steps, std::uint64_t seed, std::optional<double> noise,
                 const std::string& excitation, int hold, const std::optional<std::string>& out) {
    auto plant = find_plant(plant_name);
    if (noise) plant.noise_stddev = *noise;
    InputSignal signal;
    if (excitation == "steps") signal.kind = SignalKind::PiecewiseConstant;
    else if (excitation == "sines") signal.kind = SignalKind::Sinusoids;
    else if (excitation == "chirp") signal.kind = SignalKind::Chirp;
    else throw UsageError("--excitation must be steps, sines or chirp");
    signal.hold = hold;
    const auto ds = simulate(plant, ExcitationSpec::uniform(plant.m_input(), signal), plant.x0, steps, seed);
    const fs::path path = out ? fs::path(*out) : fs::path(ds.name() + ".csv");
    save_csv(ds, path);
    std::cout << "wrote " << path.string() << " (" << ds.length() << " samples, n_state = " << ds.n_state()
              << ", m_input = " << ds.m_input() << ")\n";
    return 0;
}

int cmd_fit(const CommonFlags& flags) {
    const auto cfg = flags.resolve();
    const auto data = load_data(cfg, false);
    const auto spec = cfg.library();
    const Eigen::VectorXd phi = cfg.fixed_phi(spec);
    const SindyModel model(spec, phi, fit(spec, shifted(data.sr), phi, cfg.stlsq));

    const auto dir = prepare_out_dir(cfg);
    Provenance prov{"fit", cfg.seed, data.names(), cfg.to_json(), std::nullopt};
    if (!data.ll.empty()) prov.loss = j_ms(model, data.ll, cfg.weights(data.ll.size()), cfg.bound, cfg.penalty);
    save_model(model, dir / "model.json", prov);
    write_file(dir / "loss_report.txt", [&](std::ostream& out) {
        out << "J_os(" << data.sr.name() << ") = " << detail::format_double(j_os(model, data.sr)) << '\n';
        if (prov.loss) write_loss_report(out, *prov.loss);
        write_equations(out, model);
    });
    print_summary(model, data.sr);
    if (prov.loss) std::cout << "J_ms = " << detail::format_double(prov.loss->j_ms) << '\n';
    return 0;
}

int cmd_lom(const CommonFlags& flags) {
    const auto cfg = flags.resolve();
    const auto data = load_data(cfg, true);
    const auto spec = cfg.library();
    const auto lom = cfg.lom(spec.phi_dim(), data.ll.size());
    const auto trace = optimize(spec, data.sr, data.ll, lom);
    const SindyModel model(spec, trace.best_phi, trace.best_xi);

    const auto dir = prepare_out_dir(cfg);
    save_model(model, dir / "model.json", Provenance{"lom", cfg.seed, data.names(), cfg.to_json(), trace.best_report});
    write_file(dir / "convergence.csv", [&](std::ostream& out) { write_trace_csv(out, trace); });
    write_file(dir / "loss_report.txt", [&](std::ostream& out) {
        write_loss_report(out, trace.best_report);
        write_equations(out, model);
    });
    print_summary(model, data.sr);
    std::cout << "generations = " << trace.generations.size() << ", evaluations = " << trace.evaluations << '\n';
    std::cout << "J_ms = " << detail::format_double(trace.best_report.j_ms) << '\n';
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& mode,
                const std::optional<std::string>& out, double bound) {
    const auto model = load_model(model_path);
    const auto ds = load_csv(data_path, model.n_state(), model.m_input());
    Eigen::MatrixXd predicted;
    Index first = 0;
    bool diverged = false;
    std::optional<Index> diverged_at;
    if (mode == "rlt") {
        auto roll = predict_rlt(model, ds, bound);
        predicted = std::move(roll.trajectory);
        diverged = roll.diverged;
        diverged_at = roll.diverged_at;
    } else if (mode == "one-step") {
        auto pred = predict_one_step(model, ds);
        first = 1;
        if (!pred.diverged_columns.empty()) {
            diverged = true;
            diverged_at = pred.diverged_columns.front() + 1;
            predicted = pred.states.leftCols(pred.diverged_columns.front());
        } else {
            predicted = std::move(pred.states);
        }
    } else {
        throw UsageError("--mode must be one-step or rlt");
    }
    if (out) write_file(*out, [&](std::ostream& o) { write_prediction_csv(o, ds, predicted, first, diverged); });

    std::cout << "mode " << mode << " on " << ds.name() << ": " << predicted.cols() << " predicted samples";
    if (diverged) std::cout << ", diverged at step " << *diverged_at;
    std::cout << '\n';
    const Eigen::MatrixXd truth = ds.states().middleCols(first, predicted.cols());
    for (Index j = 0; j < model.n_state(); ++j)
        std::cout << "||E_x" << j + 1 << "||_2 = "
                  << (diverged ? std::string("diverged") : detail::format_double((predicted.row(j) - truth.row(j)).norm()))
                  << '\n';
    return 0;
}

int cmd_compare(const CommonFlags& flags) {
    const auto cfg = flags.resolve();
    const auto data = load_data(cfg, true);
    const auto poly = cfg.polynomial();
    const auto full = cfg.library();
    std::vector<Strategy> strategies;
    for (int s : cfg.strategies) {
        if (s == 1) strategies.push_back({"S1", poly, PhiMode::None, Eigen::VectorXd(0)});
        if (s > 1 && full.phi_dim() == 0) throw UsageError("strategies 2 and 3 need --rbf-count >= 1");
        if (s == 2) strategies.push_back({"S2", full, PhiMode::Fixed, cfg.fixed_phi(full)});
        if (s == 3) strategies.push_back({"S3", full, PhiMode::Optimized, Eigen::VectorXd(0)});
    }
    const auto lom = cfg.lom(full.phi_dim(), data.ll.size());
    const auto report = run_strategy_comparison(strategies, data.sr, data.ll, data.evaluation(), lom);

    const auto dir = prepare_out_dir(cfg);
    write_file(dir / "comparison.txt", [&](std::ostream& out) { write_comparison_text(out, report); });
    write_file(dir / "comparison.csv", [&](std::ostream& out) { write_comparison_csv(out, report); });
    write_file(dir / "xi_pattern.csv", [&](std::ostream& out) { write_xi_pattern_csv(out, report); });
    for (const auto& s : report.strategies) {
        save_model(s.model, dir / ("model_" + s.name + ".json"),
                   Provenance{"compare", cfg.seed, data.names(), cfg.to_json(), s.loss});
        if (s.trace)
            write_file(dir / ("convergence_" + s.name + ".csv"), [&](std::ostream& out) { write_trace_csv(out, *s.trace); });
    }
    write_comparison_text(std::cout, report);
    return 0;
}

int cmd_model_info(const std::string& model_path) {
    const auto doc = read_model_document(model_path);
    const auto model = model_from_json(doc);
    std::cout << "format version " << doc.at("version").get<int>() << '\n';
    std::cout << "n_state = " << model.n_state() << ", m_input = " << model.m_input()
              << ", p = " << model.spec().size() << ", phi_dim = " << model.spec().phi_dim() << '\n';
    std::cout << "||Xi||_0 = " << l0_norm(model.xi()) << '\n';
    if (model.phi().size() > 0) {
        std::cout << "phi =";
        for (Index i = 0; i < model.phi().size(); ++i) std::cout << ' ' << detail::format_double(model.phi()(i));
        std::cout << '\n';
    }
    write_equations(std::cout, model);
    const auto& prov = doc.at("provenance");
    std::cout << "produced by: " << prov.value("command", std::string("?"));
    if (prov.contains("loss") && prov.at("loss").is_object())
        std::cout << ", J_ms = " << detail::format_double(prov.at("loss").at("j_ms").get<double>());
    std::cout << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse identification of discrete-time dynamics with library optimization"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "simulate a built-in synthetic plant to CSV");
    std::string plant;
    Index sim_steps = 2000;
    std::uint64_t sim_seed = 0;
    std::optional<double> sim_noise;
    std::string excitation = "steps";
    int hold = 20;
    std::optional<std::string> sim_out;
    sim->add_option("--plant", plant, "P1, P2, P3 or P4")->required();
    sim->add_option("--steps", sim_steps, "number of transitions N (file has N+1 rows)");
    sim->add_option("--seed", sim_seed, "random seed")->envname(std::string(kEnvPrefix) + "SEED");
    sim->add_option("--noise", sim_noise, "observation noise stddev");
    sim->add_option("--excitation", excitation, "steps, sines or chirp");
    sim->add_option("--hold", hold, "samples per level for step excitation");
    sim->add_option("--out", sim_out, "output CSV path");

    CommonFlags fit_flags, lom_flags, cmp_flags;
    auto* fit_cmd = app.add_subcommand("fit", "conventional SINDy fit with a fixed library");
    fit_flags.attach(fit_cmd, true);
    auto* lom_cmd = app.add_subcommand("lom", "library optimization (two-layer SINDy)");
    lom_flags.attach(lom_cmd, true);
    auto* cmp_cmd = app.add_subcommand("compare", "compare fixed, random and optimized libraries");
    cmp_flags.attach(cmp_cmd, true);

    auto* pred = app.add_subcommand("predict", "one-step or recursive long-term prediction");
    std::string model_path, data_path, mode = "rlt";
    std::optional<std::string> pred_out;
    double bound = kDefaultDivergenceBound;
    pred->add_option("--model", model_path, "model file")->required();
    pred->add_option("--data", data_path, "dataset CSV")->required();
    pred->add_option("--mode", mode, "one-step or rlt");
    pred->add_option("--out", pred_out, "predicted-vs-true CSV");
    pred->add_option("--bound", bound, "divergence bound on the infinity norm");

    auto* info = app.add_subcommand("model-info", "describe a model file");
    std::string info_path;
    info->add_option("--model", info_path, "model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sim) return cmd_simulate(plant, sim_steps, sim_seed, sim_noise, excitation, hold, sim_out);
        if (*fit_cmd) return cmd_fit(fit_flags);
        if (*lom_cmd) return cmd_lom(lom_flags);
        if (*cmp_cmd) return cmd_compare(cmp_flags);
        if (*pred) return cmd_predict(model_path, data_path, mode, pred_out, bound);
        if (*info) return cmd_model_info(info_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
