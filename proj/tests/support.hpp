#pragma once

#include <Eigen/Core>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "sindy_lom/sindy_lom.hpp"

namespace sindy_lom::fixtures {

/// Scratch directory under the system temp dir, removed on destruction.
class TempDir {
   public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("sindy_lom_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

   private:
    std::filesystem::path path_;
};

inline Eigen::MatrixXd random_matrix(Index rows, Index cols, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd m(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) m(r, c) = g(rng);
    return m;
}

/// Scalar model x+ = a*x (+ b*w when m = 1) on a degree-1 polynomial library.
inline SindyModel scalar_linear(double a, double b = 0.0, Index m = 0) {
    auto lib = polynomial_library(1, m, 1);
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(lib.size(), 1);
    xi(1, 0) = a;
    if (m > 0) xi(2, 0) = b;
    return SindyModel(lib, Eigen::VectorXd(0), CoefficientMatrix(xi));
}

}  // namespace sindy_lom::fixtures
