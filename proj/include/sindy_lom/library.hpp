#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sindy_lom/dataset.hpp"
#include "sindy_lom/error.hpp"

namespace sindy_lom {

/// Floor applied to |sigma| so a zero scale never divides by zero.
inline constexpr double kSigmaFloor = 1e-12;

enum class BasisKind { Constant, Monomial, GaussianRbf };

/**
 * One column of the library Theta(x, w; Phi).
 *
 * Variables are indexed over u = (x_1..x_n, w_1..w_m). A Monomial stores one
 * exponent per entry of u. A GaussianRbf acts on the entries of u listed in
 * `components` and reads its center (and, unless `fixed_scale` is set, its
 * scale) from the parameter vector Phi through the slot indices.
 */
struct BasisDescriptor {
    BasisKind kind = BasisKind::Constant;
    std::vector<int> exponents;
    std::vector<std::size_t> components;
    std::vector<std::size_t> center_slots;
    std::vector<std::size_t> scale_slots;
    std::optional<double> fixed_scale;

    static BasisDescriptor constant() { return {}; }

    static BasisDescriptor monomial(std::vector<int> exps) {
        BasisDescriptor d;
        d.kind = BasisKind::Monomial;
        d.exponents = std::move(exps);
        return d;
    }

    bool parametrized() const { return kind == BasisKind::GaussianRbf; }

    friend bool operator==(const BasisDescriptor&, const BasisDescriptor&) = default;
};

class LibrarySpec {
   public:
    LibrarySpec(Index n_state, Index m_input, std::vector<BasisDescriptor> descriptors)
        : n_state_(n_state), m_input_(m_input), descriptors_(std::move(descriptors)) {
        if (n_state_ < 1 || m_input_ < 0) throw DimensionError("library: invalid n_state/m_input");
        if (descriptors_.empty()) throw DimensionError("library: needs at least one basis function");
        const auto u_dim = static_cast<std::size_t>(n_state_ + m_input_);
        std::vector<std::size_t> slots;
        for (const auto& d : descriptors_) {
            switch (d.kind) {
                case BasisKind::Constant:
                    break;
                case BasisKind::Monomial:
                    if (d.exponents.size() != u_dim) throw DimensionError("library: monomial exponent arity");
                    if (std::any_of(d.exponents.begin(), d.exponents.end(), [](int e) { return e < 0; }))
                        throw DimensionError("library: negative monomial exponent");
                    break;
                case BasisKind::GaussianRbf:
                    if (d.components.empty() || d.center_slots.size() != d.components.size())
                        throw DimensionError("library: rbf center slot count");
                    if (std::any_of(d.components.begin(), d.components.end(),
                                    [&](std::size_t c) { return c >= u_dim; }))
                        throw DimensionError("library: rbf component out of range");
                    if (d.fixed_scale) {
                        if (!d.scale_slots.empty()) throw DimensionError("library: fixed-scale rbf claims scale slots");
                        if (!std::isfinite(*d.fixed_scale)) throw DimensionError("library: non-finite fixed scale");
                    } else if (d.scale_slots.size() != d.components.size()) {
                        throw DimensionError("library: rbf scale slot count");
                    }
                    slots.insert(slots.end(), d.center_slots.begin(), d.center_slots.end());
                    slots.insert(slots.end(), d.scale_slots.begin(), d.scale_slots.end());
                    break;
            }
        }
        std::sort(slots.begin(), slots.end());
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (slots[i] != i) throw DimensionError("library: rbf parameter slots must partition [0, phi_dim)");
        phi_dim_ = static_cast<Index>(slots.size());
    }

    Index n_state() const { return n_state_; }
    Index m_input() const { return m_input_; }
    Index u_dim() const { return n_state_ + m_input_; }
    /// Number of basis functions p.
    Index size() const { return static_cast<Index>(descriptors_.size()); }
    Index phi_dim() const { return phi_dim_; }
    const std::vector<BasisDescriptor>& descriptors() const { return descriptors_; }
    const BasisDescriptor& operator[](Index i) const { return descriptors_[static_cast<std::size_t>(i)]; }

    std::string variable_name(std::size_t u_index) const {
        const auto n = static_cast<std::size_t>(n_state_);
        return u_index < n ? "x" + std::to_string(u_index + 1) : "w" + std::to_string(u_index - n + 1);
    }

    /// Human-readable label, e.g. "1", "x1", "x1*w2", "x2^2", "rbf1".
    std::string label(Index i) const {
        const auto& d = (*this)[i];
        switch (d.kind) {
            case BasisKind::Constant:
                return "1";
            case BasisKind::Monomial: {
                std::string s;
                for (std::size_t v = 0; v < d.exponents.size(); ++v) {
                    if (d.exponents[v] == 0) continue;
                    if (!s.empty()) s += '*';
                    s += variable_name(v);
                    if (d.exponents[v] > 1) s += '^' + std::to_string(d.exponents[v]);
                }
                return s.empty() ? "1" : s;
            }
            case BasisKind::GaussianRbf: {
                Index ordinal = 0;
                for (Index j = 0; j <= i; ++j) ordinal += (*this)[j].parametrized() ? 1 : 0;
                return "rbf" + std::to_string(ordinal);
            }
        }
        return {};
    }

    friend bool operator==(const LibrarySpec& a, const LibrarySpec& b) {
        return a.n_state_ == b.n_state_ && a.m_input_ == b.m_input_ && a.descriptors_ == b.descriptors_;
    }

   private:
    Index n_state_;
    Index m_input_;
    std::vector<BasisDescriptor> descriptors_;
    Index phi_dim_ = 0;
};

/**
 * Constant plus every monomial in u = (x, w) of total degree <= `degree`.
 *
 * Terms are grouped by degree; inside a group they follow the lexicographic
 * order of variable-index multisets, so for (n=2, m=4, degree=2) the columns are
 * 1, x1, x2, w1..w4, x1^2, x1*x2, x1*w1, ..., w4^2 (28 in total).
 */
inline LibrarySpec polynomial_library(Index n_state, Index m_input, int degree) {
    if (degree < 0) throw DimensionError("polynomial_library: degree must be >= 0");
    const auto u_dim = static_cast<std::size_t>(n_state + m_input);
    std::vector<BasisDescriptor> out{BasisDescriptor::constant()};
    std::vector<std::size_t> idx;
    for (int deg = 1; deg <= degree; ++deg) {
        // Non-decreasing index tuples of length deg, lexicographic.
        idx.assign(static_cast<std::size_t>(deg), 0);
        while (true) {
            std::vector<int> exps(u_dim, 0);
            for (auto v : idx) ++exps[v];
            out.push_back(BasisDescriptor::monomial(std::move(exps)));
            int pos = deg - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] + 1 == u_dim) --pos;
            if (pos < 0) break;
            const auto next = idx[static_cast<std::size_t>(pos)] + 1;
            for (auto q = static_cast<std::size_t>(pos); q < idx.size(); ++q) idx[q] = next;
        }
    }
    return LibrarySpec(n_state, m_input, std::move(out));
}

struct RbfOptions {
    /// Entries of u the RBF acts on; empty means all of u.
    std::vector<std::size_t> components;
    /// When set, the scale is this constant and only the centers are tunable.
    std::optional<double> fixed_scale;
};

/**
 * Appends `count` Gaussian RBFs. Fresh Phi slots are laid out as all the new
 * centers first (RBF by RBF), then all the new scales, i.e. Phi grows by
 * [mu_1 .. mu_count, sigma_1 .. sigma_count].
 */
inline LibrarySpec append_rbfs(const LibrarySpec& spec, Index count, const RbfOptions& opts = {}) {
    if (count < 1) throw DimensionError("append_rbfs: count must be >= 1");
    std::vector<std::size_t> comps = opts.components;
    if (comps.empty()) {
        comps.resize(static_cast<std::size_t>(spec.u_dim()));
        std::iota(comps.begin(), comps.end(), std::size_t{0});
    }
    const auto d = comps.size();
    auto next = static_cast<std::size_t>(spec.phi_dim());
    auto descriptors = spec.descriptors();
    const auto first_new = descriptors.size();
    for (Index i = 0; i < count; ++i) {
        BasisDescriptor b;
        b.kind = BasisKind::GaussianRbf;
        b.components = comps;
        b.fixed_scale = opts.fixed_scale;
        for (std::size_t c = 0; c < d; ++c) b.center_slots.push_back(next++);
        descriptors.push_back(std::move(b));
    }
    if (!opts.fixed_scale) {
        for (auto i = first_new; i < descriptors.size(); ++i)
            for (std::size_t c = 0; c < d; ++c) descriptors[i].scale_slots.push_back(next++);
    }
    return LibrarySpec(spec.n_state(), spec.m_input(), std::move(descriptors));
}

namespace detail {

inline double eval_basis(const BasisDescriptor& d, const double* u, const double* phi) {
    switch (d.kind) {
        case BasisKind::Constant:
            return 1.0;
        case BasisKind::Monomial: {
            double v = 1.0;
            for (std::size_t i = 0; i < d.exponents.size(); ++i)
                for (int e = 0; e < d.exponents[i]; ++e) v *= u[i];
            return v;
        }
        case BasisKind::GaussianRbf: {
            double q = 0.0;
            for (std::size_t c = 0; c < d.components.size(); ++c) {
                const double s = std::max(std::abs(d.fixed_scale ? *d.fixed_scale : phi[d.scale_slots[c]]), kSigmaFloor);
                const double z = (u[d.components[c]] - phi[d.center_slots[c]]) / s;
                q += z * z;
            }
            return std::exp(-q);
        }
    }
    return 0.0;
}

inline void check_phi(const LibrarySpec& spec, const Eigen::VectorXd& phi) {
    if (phi.size() != spec.phi_dim())
        throw DimensionError("phi has " + std::to_string(phi.size()) + " entries, library expects " +
                             std::to_string(spec.phi_dim()));
    if (!phi.allFinite()) throw DataError("phi contains non-finite values");
}

}  // namespace detail

/// Theta(x, w; Phi) as a 1 x p row.
inline Eigen::RowVectorXd eval_row(const LibrarySpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                   const Eigen::VectorXd& phi) {
    if (x.size() != spec.n_state() || w.size() != spec.m_input())
        throw DimensionError("eval_row: state/input dimension mismatch");
    if (!x.allFinite() || !w.allFinite()) throw DataError("eval_row: non-finite input");
    detail::check_phi(spec, phi);
    Eigen::VectorXd u(spec.u_dim());
    u << x, w;
    Eigen::RowVectorXd row(spec.size());
    for (Index j = 0; j < spec.size(); ++j) row(j) = detail::eval_basis(spec[j], u.data(), phi.data());
    return row;
}

/// Row k is Theta(x(k), w(k); Phi); shape N x p.
inline Eigen::MatrixXd build_matrix(const LibrarySpec& spec, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                                    const Eigen::VectorXd& phi) {
    if (X.rows() != spec.n_state() || W.rows() != spec.m_input() || X.cols() != W.cols())
        throw DimensionError("build_matrix: sample matrices do not match the library");
    detail::check_phi(spec, phi);
    const Index n = X.cols();
    Eigen::MatrixXd theta(n, spec.size());
    Eigen::VectorXd u(spec.u_dim());
    for (Index k = 0; k < n; ++k) {
        u.head(spec.n_state()) = X.col(k);
        u.tail(spec.m_input()) = W.col(k);
        for (Index j = 0; j < spec.size(); ++j) theta(k, j) = detail::eval_basis(spec[j], u.data(), phi.data());
    }
    return theta;
}

inline Eigen::MatrixXd build_matrix(const LibrarySpec& spec, const ShiftedMatrices& sm, const Eigen::VectorXd& phi) {
    return build_matrix(spec, sm.X, sm.W, phi);
}

}  // namespace sindy_lom
