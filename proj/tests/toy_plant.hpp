#pragma once

#include "support.hpp"

namespace sindy_lom::fixtures {

/// x+ = 0.5 x + w + exp(-(x - 3)^2) with one fixed-scale RBF: Phi is the single center.
struct CenterToy {
    LibrarySpec library;
    TimeSeriesDataset sr;
    std::vector<TimeSeriesDataset> ll;

    static constexpr double kCenter = 3.0;

    static CenterToy make(std::uint64_t seed = 1) {
        const auto lib = append_rbfs(polynomial_library(1, 1, 1), 1, RbfOptions{{0}, 1.0});
        Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(lib.size(), 1);
        xi(1, 0) = 0.5;
        xi(2, 0) = 1.0;
        xi(3, 0) = 1.0;
        const SindyModel truth(lib, Eigen::VectorXd::Constant(1, kCenter), CoefficientMatrix(xi));
        SyntheticPlant plant{"toy", "", truth, polynomial_library(1, 1, 1), RbfOptions{{0}, 1.0}, 1, {},
                             Eigen::VectorXd::Constant(1, 2.0), 0.0, Eigen::VectorXd::Constant(1, 0.0),
                             Eigen::VectorXd::Constant(1, 6.0)};
        InputSignal sig;
        sig.low = 0.5;
        sig.high = 2.0;
        plant.excitation = ExcitationSpec::uniform(1, sig);
        return {lib, simulate(plant, 400, seed, "toy_sr"), {simulate(plant, 400, seed + 1, "toy_ll")}};
    }
};

}  // namespace sindy_lom::fixtures
