// Tune the RBF of plant P3 by library optimization and compare with a polynomial-only fit.
#include <iostream>

#include "sindy_lom/sindy_lom.hpp"

int main() {
    using namespace sindy_lom;
    auto plant = find_plant("P3");
    plant.noise_stddev = 0.01;
    const auto sr = simulate(plant, 1000, 1, "sr");
    const auto ll = simulate(plant, 1000, 2, "ll");
    const auto held = simulate(plant, 1000, 3, "held");

    LomConfig cfg;
    cfg.weights = LossWeights::uniform(2, 1);
    cfg.ga.init_low = plant.init_low;
    cfg.ga.init_high = plant.init_high;
    cfg.ga.population_size = 40;
    cfg.ga.max_generations = 60;
    cfg.ga.seed = 1;

    const std::vector<Strategy> strategies{
        {"poly", plant.fit_library, PhiMode::None, Eigen::VectorXd(0)},
        {"optimized", plant.parametrized_library(), PhiMode::Optimized, Eigen::VectorXd(0)},
    };
    const auto report = run_strategy_comparison(strategies, sr, {sr, ll}, {sr, ll, held}, cfg);
    write_comparison_text(std::cout, report);

    const auto& best = report.strategies.back();
    std::cout << "\ncenter " << best.model.phi()(0) << " (true " << plant.truth.phi()(0) << "), scale "
              << best.model.phi()(1) << " (true " << plant.truth.phi()(1) << ")\n";
    write_equations(std::cout, best.model);
    return 0;
}
