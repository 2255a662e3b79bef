#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "sindy_lom/dataset.hpp"
#include "sindy_lom/liboptim.hpp"
#include "sindy_lom/loss.hpp"
#include "sindy_lom/rollout.hpp"

namespace sindy_lom {

namespace detail {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4e", v);
    return buf;
}

inline std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace detail

inline void write_loss_report(std::ostream& out, const LossReport& r) {
    out << "J_ms            " << detail::format_double(r.j_ms) << '\n';
    out << "||Xi||_0        " << r.l0_count << '\n';
    out << "kappa*||Xi||_0  " << detail::format_double(r.sparsity_penalty) << '\n';
    for (const auto& d : r.per_dataset) {
        out << "dataset " << d.name << ": ";
        if (d.diverged) {
            out << "diverged at step " << *d.diverged_at << '\n';
            continue;
        }
        out << "term " << detail::format_double(d.term) << ", ||E_j||_2 =";
        for (double e : d.component_errors) out << ' ' << detail::format_double(e);
        out << '\n';
    }
}

/// Sparse equation listing, one line per state component.
inline void write_equations(std::ostream& out, const SindyModel& model) {
    const auto& spec = model.spec();
    for (Index j = 0; j < model.n_state(); ++j) {
        out << "x" << j + 1 << "(k+1) =";
        bool any = false;
        for (Index i = 0; i < spec.size(); ++i) {
            const double c = model.xi()(i, j);
            if (c == 0.0) continue;
            out << (any ? " + " : " ") << detail::format_double(c) << " " << spec.label(i);
            any = true;
        }
        if (!any) out << " 0";
        out << '\n';
    }
}

/// Columns: k, x_j (true), x_j_hat (predicted) per component, diverged.
inline void write_prediction_csv(std::ostream& out, const TimeSeriesDataset& ds, const Eigen::MatrixXd& predicted,
                                 Index first_index, bool diverged) {
    out << "k";
    for (Index j = 0; j < ds.n_state(); ++j) out << ",x" << j + 1;
    for (Index j = 0; j < ds.n_state(); ++j) out << ",x" << j + 1 << "_hat";
    out << ",diverged\n";
    for (Index c = 0; c < predicted.cols(); ++c) {
        const Index k = first_index + c;
        out << k;
        for (Index j = 0; j < ds.n_state(); ++j) out << ',' << detail::format_double(ds.states()(j, k));
        for (Index j = 0; j < ds.n_state(); ++j) out << ',' << detail::format_double(predicted(j, c));
        out << ',' << (diverged ? 1 : 0) << '\n';
    }
}

inline void write_trace_csv(std::ostream& out, const OptimTrace& trace) {
    out << "generation,best,mean\n";
    for (const auto& g : trace.generations)
        out << g.generation << ',' << detail::format_double(g.best) << ',' << detail::format_double(g.mean) << '\n';
}

/// Strategy x dataset x component table of RLT 2-norm errors ("diverged" where applicable).
inline void write_comparison_text(std::ostream& out, const ComparisonReport& report) {
    out << "2-norm error of the RLT prediction ||E_hat_j||_2\n";
    out << detail::pad("strategy", 14) << detail::pad("dataset", 18) << detail::pad("component", 11)
        << detail::pad("rlt", 14) << detail::pad("one-step", 14) << '\n';
    for (const auto& s : report.strategies) {
        for (const auto& d : s.datasets) {
            const auto n = static_cast<std::size_t>(s.model.n_state());
            for (std::size_t j = 0; j < n; ++j) {
                out << detail::pad(s.name, 14) << detail::pad(d.dataset, 18)
                    << detail::pad("x" + std::to_string(j + 1), 11)
                    << detail::pad(d.rlt_diverged ? "diverged" : detail::sci(d.rlt_errors[j]), 14)
                    << detail::pad(d.one_step_errors.empty() ? "diverged" : detail::sci(d.one_step_errors[j]), 14)
                    << '\n';
            }
        }
    }
    out << "\nnormalized terms (1/(R sqrt N)) sum_j r_j ||E_j|| / ||X_j||\n";
    out << detail::pad("strategy", 14) << detail::pad("dataset", 18) << detail::pad("rlt", 14)
        << detail::pad("one-step", 14) << "rlt/one-step\n";
    for (const auto& s : report.strategies) {
        for (const auto& d : s.datasets) {
            out << detail::pad(s.name, 14) << detail::pad(d.dataset, 18)
                << detail::pad(d.rlt_diverged ? "diverged" : detail::sci(d.rlt_term), 14)
                << detail::pad(detail::sci(d.one_step_term), 14)
                << (d.rlt_diverged ? std::string("-") : detail::sci(d.rlt_term / d.one_step_term)) << '\n';
        }
    }
    out << "\nJ_ms over LL datasets\n";
    for (const auto& s : report.strategies)
        out << detail::pad(s.name, 14) << detail::format_double(s.loss.j_ms) << "  (||Xi||_0 = " << s.loss.l0_count
            << (s.loss.diverged() ? ", diverged" : "") << ")\n";
}

inline void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
    out << "strategy,dataset,component,rlt_error,one_step_error,rlt_term,one_step_term,diverged\n";
    for (const auto& s : report.strategies) {
        for (const auto& d : s.datasets) {
            for (Index j = 0; j < s.model.n_state(); ++j) {
                const auto jj = static_cast<std::size_t>(j);
                out << s.name << ',' << d.dataset << ",x" << j + 1 << ','
                    << (d.rlt_diverged ? "diverged" : detail::format_double(d.rlt_errors[jj])) << ','
                    << (d.one_step_errors.empty() ? "diverged" : detail::format_double(d.one_step_errors[jj])) << ','
                    << (d.rlt_diverged ? "diverged" : detail::format_double(d.rlt_term)) << ','
                    << detail::format_double(d.one_step_term) << ',' << (d.rlt_diverged ? 1 : 0) << '\n';
            }
        }
    }
}

/// Long-format nonzero pattern of Xi per strategy.
inline void write_xi_pattern_csv(std::ostream& out, const ComparisonReport& report) {
    out << "strategy,row,term,component,value\n";
    for (const auto& s : report.strategies) {
        const auto& xi = s.model.xi();
        for (Index c = 0; c < xi.cols(); ++c)
            for (Index r = 0; r < xi.rows(); ++r)
                if (xi(r, c) != 0.0)
                    out << s.name << ',' << r + 1 << ',' << s.model.spec().label(r) << ",x" << c + 1 << ','
                        << detail::format_double(xi(r, c)) << '\n';
    }
}

}  // namespace sindy_lom
