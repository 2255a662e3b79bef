#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sindy_lom/error.hpp"
#include "sindy_lom/library.hpp"
#include "sindy_lom/loss.hpp"
#include "sindy_lom/rollout.hpp"
#include "sindy_lom/stlsq.hpp"

namespace sindy_lom {

inline constexpr int kModelFormatVersion = 1;

using Json = nlohmann::ordered_json;

/// Free-form record of how a model was produced. No timestamps, so files are reproducible.
struct Provenance {
    std::string command;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> datasets;
    Json config = Json::object();
    std::optional<LossReport> loss;
};

inline Json loss_to_json(const LossReport& r) {
    Json per = Json::array();
    for (const auto& d : r.per_dataset) {
        Json e{{"name", d.name}, {"term", d.term}, {"diverged", d.diverged}};
        if (d.diverged_at) e["diverged_at"] = *d.diverged_at;
        e["component_errors"] = d.component_errors;
        per.push_back(std::move(e));
    }
    return Json{{"j_ms", r.j_ms},
                {"l0_count", r.l0_count},
                {"sparsity_penalty", r.sparsity_penalty},
                {"per_dataset", std::move(per)}};
}

inline Json library_to_json(const LibrarySpec& spec) {
    Json basis = Json::array();
    for (const auto& d : spec.descriptors()) {
        switch (d.kind) {
            case BasisKind::Constant:
                basis.push_back(Json{{"kind", "constant"}});
                break;
            case BasisKind::Monomial:
                basis.push_back(Json{{"kind", "monomial"}, {"exponents", d.exponents}});
                break;
            case BasisKind::GaussianRbf: {
                Json b{{"kind", "gaussian_rbf"}, {"components", d.components}, {"center_slots", d.center_slots}};
                if (d.fixed_scale)
                    b["fixed_scale"] = *d.fixed_scale;
                else
                    b["scale_slots"] = d.scale_slots;
                basis.push_back(std::move(b));
                break;
            }
        }
    }
    return Json{{"n_state", spec.n_state()},
                {"m_input", spec.m_input()},
                {"phi_dim", spec.phi_dim()},
                {"basis", std::move(basis)}};
}

inline LibrarySpec library_from_json(const Json& j) {
    std::vector<BasisDescriptor> descriptors;
    for (const auto& b : j.at("basis")) {
        const auto kind = b.at("kind").get<std::string>();
        if (kind == "constant") {
            descriptors.push_back(BasisDescriptor::constant());
        } else if (kind == "monomial") {
            descriptors.push_back(BasisDescriptor::monomial(b.at("exponents").get<std::vector<int>>()));
        } else if (kind == "gaussian_rbf") {
            BasisDescriptor d;
            d.kind = BasisKind::GaussianRbf;
            d.components = b.at("components").get<std::vector<std::size_t>>();
            d.center_slots = b.at("center_slots").get<std::vector<std::size_t>>();
            if (b.contains("fixed_scale"))
                d.fixed_scale = b.at("fixed_scale").get<double>();
            else
                d.scale_slots = b.at("scale_slots").get<std::vector<std::size_t>>();
            descriptors.push_back(std::move(d));
        } else {
            throw FormatError("model: unknown basis kind '" + kind + "'");
        }
    }
    LibrarySpec spec(j.at("n_state").get<Index>(), j.at("m_input").get<Index>(), std::move(descriptors));
    if (spec.phi_dim() != j.at("phi_dim").get<Index>()) throw DimensionError("model: phi_dim does not match basis slots");
    return spec;
}

inline Json model_to_json(const SindyModel& model, const Provenance& prov = {}) {
    Json phi = Json::array();
    for (Index i = 0; i < model.phi().size(); ++i) phi.push_back(model.phi()(i));
    Json entries = Json::array();
    const auto& xi = model.xi();
    for (Index c = 0; c < xi.cols(); ++c)
        for (Index r = 0; r < xi.rows(); ++r)
            if (xi(r, c) != 0.0) entries.push_back(Json::array({r, c, xi(r, c)}));

    Json p{{"command", prov.command}};
    p["seed"] = prov.seed ? Json(*prov.seed) : Json(nullptr);
    p["datasets"] = prov.datasets;
    p["config"] = prov.config;
    p["loss"] = prov.loss ? loss_to_json(*prov.loss) : Json(nullptr);

    return Json{{"version", kModelFormatVersion},
                {"library", library_to_json(model.spec())},
                {"phi", std::move(phi)},
                {"xi", Json{{"rows", xi.rows()}, {"cols", xi.cols()}, {"entries", std::move(entries)}}},
                {"provenance", std::move(p)}};
}

/// Rebuilds a model; validates version, shapes and slot coverage.
inline SindyModel model_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("version")) throw FormatError("model: missing version");
    if (!j.at("version").is_number_integer() || j.at("version").get<int>() != kModelFormatVersion)
        throw FormatError("model: unsupported format_version " + j.at("version").dump());
    try {
        auto spec = library_from_json(j.at("library"));
        const auto phi_values = j.at("phi").get<std::vector<double>>();
        Eigen::VectorXd phi = Eigen::Map<const Eigen::VectorXd>(phi_values.data(), static_cast<Index>(phi_values.size()));
        const auto& xj = j.at("xi");
        const auto rows = xj.at("rows").get<Index>(), cols = xj.at("cols").get<Index>();
        if (rows != spec.size() || cols != spec.n_state())
            throw DimensionError("model: Xi is " + std::to_string(rows) + "x" + std::to_string(cols) +
                                 ", library needs " + std::to_string(spec.size()) + "x" + std::to_string(spec.n_state()));
        Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(rows, cols);
        for (const auto& e : xj.at("entries")) {
            const auto r = e.at(0).get<Index>(), c = e.at(1).get<Index>();
            if (r < 0 || r >= rows || c < 0 || c >= cols) throw DimensionError("model: Xi triplet out of range");
            xi(r, c) = e.at(2).get<double>();
        }
        return SindyModel(std::move(spec), std::move(phi), CoefficientMatrix(std::move(xi)));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model: malformed document: ") + e.what());
    }
}

inline void save_model(const SindyModel& model, const std::filesystem::path& path, const Provenance& prov = {}) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file '" + path.string() + "'");
    out << model_to_json(model, prov).dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline Json read_model_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("model file '" + path.string() + "' is malformed: " + e.what());
    }
}

inline SindyModel load_model(const std::filesystem::path& path) { return model_from_json(read_model_document(path)); }

}  // namespace sindy_lom
