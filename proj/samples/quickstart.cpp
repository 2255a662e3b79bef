// Identify plant P1 from simulated data and print the recovered equations.
#include <iostream>

#include "sindy_lom/sindy_lom.hpp"

int main() {
    using namespace sindy_lom;
    const auto plant = find_plant("P1");
    const auto data = simulate(plant, 2000, /*seed=*/1);

    const auto library = polynomial_library(plant.n_state(), plant.m_input(), 2);
    const Eigen::VectorXd no_phi(0);
    const SindyModel model(library, no_phi, fit(library, shifted(data), no_phi, StlsqConfig{}));

    write_equations(std::cout, model);
    std::cout << "J_os = " << j_os(model, data) << '\n';
    return 0;
}
