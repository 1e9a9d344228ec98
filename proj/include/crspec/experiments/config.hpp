#pragma once

// Experiment configuration: one JSON document per experiment. Every field is
// validated before any computation; errors name the offending field path.

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crspec/core/error.hpp"
#include "crspec/embedding/embedding.hpp"
#include "crspec/models/circle_bundle.hpp"
#include "crspec/models/lattice.hpp"
#include "crspec/models/torus.hpp"
#include "crspec/specfun/bump.hpp"

namespace crspec::experiments {

using Json = nlohmann::ordered_json;

inline constexpr const char* kExperimentSchema = "crspec-experiment/1";
inline constexpr const char* kSuiteSchema = "crspec-suite/1";

enum class ExperimentKind {
    spectrum, measure, trace, kernel_diag, kernel_offdiag, embed_pullback,
    embed_equivariance, embed_inject, sphere_defect, weyl, fit
};

inline const std::vector<std::pair<std::string, ExperimentKind>>& experiment_kinds() {
    static const std::vector<std::pair<std::string, ExperimentKind>> kinds{
        {"spectrum", ExperimentKind::spectrum},
        {"measure", ExperimentKind::measure},
        {"trace", ExperimentKind::trace},
        {"kernel-diag", ExperimentKind::kernel_diag},
        {"kernel-offdiag", ExperimentKind::kernel_offdiag},
        {"embed-pullback", ExperimentKind::embed_pullback},
        {"embed-equivariance", ExperimentKind::embed_equivariance},
        {"embed-inject", ExperimentKind::embed_inject},
        {"sphere-defect", ExperimentKind::sphere_defect},
        {"weyl", ExperimentKind::weyl},
        {"fit", ExperimentKind::fit},
    };
    return kinds;
}

inline std::string to_string(ExperimentKind k) {
    for (const auto& [name, kind] : experiment_kinds()) {
        if (kind == k) return name;
    }
    return "?";
}

struct ModelSpec {
    std::string kind = "torus";  // torus | circle-bundle | projective
    int n = 2;
    double eps = 0.5;
    OperatorVariant variant = OperatorVariant::grauert;
    int d = 1;
    std::vector<std::string> hilbert_coeffs;  // "p" or "p/q", constant term first
};

struct ChiSpec {
    double delta1 = 1.0;
    double delta2 = 2.0;
    std::string profile = "exp";
};

struct PointSpec {
    std::vector<double> x;
    std::vector<double> dir;  // scaled onto |y| = eps
};

// One embedded acceptance check: metric value must lie in [min, max].
struct Check {
    std::string metric;
    std::optional<double> min;
    std::optional<double> max;
};

struct ExperimentConfig {
    std::string name;
    ModelSpec model;
    ChiSpec chi;
    std::vector<double> ks;
    ExperimentKind kind = ExperimentKind::measure;
    std::uint64_t seed = 1;
    std::optional<PointSpec> point;
    std::optional<PointSpec> point_q;
    embedding::Scaling scaling = embedding::Scaling::rescaled;
    int samples = 64;
    double separation_floor = 0.05;
    int power = 1;
    double lambda_max = 0.0;
    std::string input;  // series CSV for kind = fit
    std::string report_path;
    std::string csv_path;
    ResourceBudget budget;
    std::vector<Check> checks;
    Json source;  // the parsed document, embedded verbatim in reports
};

namespace detail {

inline const Json& require(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError("missing field `" + path + "`");
    return j.at(key);
}

inline double number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ValidationError("field `" + path + "` must be a number");
    return v.get<double>();
}

inline std::int64_t integer(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ValidationError("field `" + path + "` must be an integer");
    return v.get<std::int64_t>();
}

inline std::string text(const Json& v, const std::string& path) {
    if (!v.is_string()) throw ValidationError("field `" + path + "` must be a string");
    return v.get<std::string>();
}

inline std::vector<double> numbers(const Json& v, const std::string& path) {
    if (!v.is_array()) throw ValidationError("field `" + path + "` must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline void only_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& path) {
    if (!j.is_object()) throw ValidationError("field `" + path + "` must be an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || item.key() == a;
        if (!ok) throw ValidationError("unknown field `" + (path.empty() ? "" : path + ".") + item.key() + "`");
    }
}

inline PointSpec point_spec(const Json& v, const std::string& path) {
    only_keys(v, {"x", "dir"}, path);
    PointSpec p;
    p.x = numbers(require(v, "x", path + ".x"), path + ".x");
    p.dir = numbers(require(v, "dir", path + ".dir"), path + ".dir");
    return p;
}

}  // namespace detail

inline ModelSpec parse_model(const Json& j) {
    using namespace detail;
    only_keys(j, {"kind", "n", "eps", "operator_variant", "d", "hilbert_coeffs"}, "model");
    ModelSpec m;
    m.kind = text(require(j, "kind", "model.kind"), "model.kind");
    if (m.kind == "torus") {
        m.n = static_cast<int>(integer(require(j, "n", "model.n"), "model.n"));
        if (m.n < 2) throw ValidationError("field `model.n` must be >= 2");
        m.eps = number(require(j, "eps", "model.eps"), "model.eps");
        if (!(m.eps > 0.0)) throw ValidationError("field `model.eps` must be > 0");
        if (j.contains("operator_variant")) {
            const auto v = text(j["operator_variant"], "model.operator_variant");
            try {
                m.variant = operator_variant_from(v);
            } catch (const ValidationError&) {
                throw ValidationError("field `model.operator_variant` must be grauert or reeb");
            }
        }
    } else if (m.kind == "circle-bundle") {
        m.d = static_cast<int>(integer(require(j, "d", "model.d"), "model.d"));
        const auto& c = require(j, "hilbert_coeffs", "model.hilbert_coeffs");
        if (!c.is_array()) throw ValidationError("field `model.hilbert_coeffs` must be an array");
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::string path = "model.hilbert_coeffs[" + std::to_string(i) + "]";
            m.hilbert_coeffs.push_back(c[i].is_number_integer() ? std::to_string(c[i].get<std::int64_t>())
                                                                : text(c[i], path));
        }
    } else if (m.kind == "projective") {
        m.d = static_cast<int>(integer(require(j, "d", "model.d"), "model.d"));
        if (m.d < 1) throw ValidationError("field `model.d` must be >= 1");
    } else {
        throw ValidationError("field `model.kind` must be torus, circle-bundle or projective");
    }
    return m;
}

inline ChiSpec parse_chi(const Json& j) {
    using namespace detail;
    only_keys(j, {"delta1", "delta2", "profile"}, "chi");
    ChiSpec c;
    c.delta1 = number(require(j, "delta1", "chi.delta1"), "chi.delta1");
    c.delta2 = number(require(j, "delta2", "chi.delta2"), "chi.delta2");
    if (j.contains("profile")) c.profile = text(j["profile"], "chi.profile");
    (void)BumpFunction(c.delta1, c.delta2, profile_by_id(c.profile));  // messages name chi.delta1
    return c;
}

inline ExperimentConfig parse_experiment(const Json& j) {
    using namespace detail;
    only_keys(j, {"schema", "name", "model", "chi", "ks", "experiment", "seed", "point", "point_q", "scaling",
                  "samples", "separation_floor", "power", "lambda_max", "input", "output", "budget", "checks"},
              "");
    ExperimentConfig c;
    c.source = j;
    const auto schema = text(require(j, "schema", "schema"), "schema");
    if (schema != kExperimentSchema) {
        throw ValidationError("field `schema` must be \"" + std::string(kExperimentSchema) + "\"");
    }
    if (j.contains("name")) c.name = text(j["name"], "name");

    const auto kind = text(require(j, "experiment", "experiment"), "experiment");
    bool found = false;
    for (const auto& [nm, k] : experiment_kinds()) {
        if (nm == kind) {
            c.kind = k;
            found = true;
        }
    }
    if (!found) throw ValidationError("field `experiment` has unknown kind '" + kind + "'");

    if (c.kind != ExperimentKind::fit) {
        c.model = parse_model(require(j, "model", "model"));
        if (j.contains("chi")) c.chi = parse_chi(j["chi"]);
    }
    if (j.contains("ks")) {
        c.ks = numbers(j["ks"], "ks");
        for (std::size_t i = 0; i < c.ks.size(); ++i) {
            if (!(c.ks[i] > 0.0)) throw ValidationError("field `ks[" + std::to_string(i) + "]` must be > 0");
            if (i > 0 && !(c.ks[i] > c.ks[i - 1])) throw ValidationError("field `ks` must be strictly ascending");
        }
    }
    if (j.contains("seed")) {
        const auto s = integer(j["seed"], "seed");
        if (s < 0) throw ValidationError("field `seed` must be >= 0");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("point")) c.point = point_spec(j["point"], "point");
    if (j.contains("point_q")) c.point_q = point_spec(j["point_q"], "point_q");
    if (j.contains("scaling")) {
        try {
            c.scaling = embedding::scaling_from(text(j["scaling"], "scaling"));
        } catch (const ValidationError&) {
            throw ValidationError("field `scaling` must be plain, rescaled or sphere-normalized");
        }
    }
    if (j.contains("samples")) {
        c.samples = static_cast<int>(integer(j["samples"], "samples"));
        if (c.samples < 1) throw ValidationError("field `samples` must be >= 1");
    }
    if (j.contains("separation_floor")) {
        c.separation_floor = number(j["separation_floor"], "separation_floor");
        if (!(c.separation_floor > 0.0)) throw ValidationError("field `separation_floor` must be > 0");
    }
    if (j.contains("power")) {
        c.power = static_cast<int>(integer(j["power"], "power"));
        if (c.power < 1) throw ValidationError("field `power` must be >= 1");
    }
    if (j.contains("lambda_max")) {
        c.lambda_max = number(j["lambda_max"], "lambda_max");
        if (!(c.lambda_max > 0.0)) throw ValidationError("field `lambda_max` must be > 0");
    }
    if (j.contains("input")) c.input = text(j["input"], "input");
    if (j.contains("output")) {
        const auto& o = j["output"];
        only_keys(o, {"report", "csv"}, "output");
        if (o.contains("report")) c.report_path = text(o["report"], "output.report");
        if (o.contains("csv")) c.csv_path = text(o["csv"], "output.csv");
    }
    if (j.contains("budget")) {
        const auto& b = j["budget"];
        only_keys(b, {"max_bytes", "max_modes"}, "budget");
        if (b.contains("max_bytes")) {
            const auto v = integer(b["max_bytes"], "budget.max_bytes");
            if (v <= 0) throw ValidationError("field `budget.max_bytes` must be > 0");
            c.budget.max_bytes = static_cast<std::size_t>(v);
        }
        if (b.contains("max_modes")) {
            const auto v = integer(b["max_modes"], "budget.max_modes");
            if (v <= 0) throw ValidationError("field `budget.max_modes` must be > 0");
            c.budget.max_modes = static_cast<std::size_t>(v);
        }
    }
    if (j.contains("checks")) {
        const auto& arr = j["checks"];
        if (!arr.is_array()) throw ValidationError("field `checks` must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "checks[" + std::to_string(i) + "]";
            only_keys(arr[i], {"metric", "min", "max"}, path);
            Check ch;
            ch.metric = text(require(arr[i], "metric", path + ".metric"), path + ".metric");
            if (arr[i].contains("min")) ch.min = number(arr[i]["min"], path + ".min");
            if (arr[i].contains("max")) ch.max = number(arr[i]["max"], path + ".max");
            if (!ch.min && !ch.max) throw ValidationError("field `" + path + "` needs min or max");
            c.checks.push_back(ch);
        }
    }

    // kind-specific requirements
    const auto need_ks = [&](std::size_t m) {
        if (c.ks.size() < m) {
            throw ValidationError("field `ks` needs at least " + std::to_string(m) + " values for experiment " + kind);
        }
    };
    const auto need_torus = [&] {
        if (c.model.kind != "torus") throw ValidationError("field `model.kind` must be torus for experiment " + kind);
    };
    switch (c.kind) {
        case ExperimentKind::spectrum:
            if (!(c.lambda_max > 0.0)) throw ValidationError("missing field `lambda_max`");
            break;
        case ExperimentKind::measure:
        case ExperimentKind::trace:
        case ExperimentKind::weyl: need_ks(1); break;
        case ExperimentKind::kernel_diag:
            need_torus();
            need_ks(3);
            if (!c.point) throw ValidationError("missing field `point`");
            break;
        case ExperimentKind::kernel_offdiag:
            need_torus();
            need_ks(1);
            if (!c.point || !c.point_q) throw ValidationError("missing field `point` or `point_q`");
            break;
        case ExperimentKind::embed_pullback:
        case ExperimentKind::embed_equivariance:
            need_torus();
            need_ks(1);
            if (!c.point) throw ValidationError("missing field `point`");
            break;
        case ExperimentKind::embed_inject:
        case ExperimentKind::sphere_defect:
            need_torus();
            need_ks(1);
            break;
        case ExperimentKind::fit:
            if (c.input.empty()) throw ValidationError("missing field `input`");
            break;
    }
    return c;
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

inline std::unique_ptr<ModelSpectrum> make_model(const ModelSpec& m) {
    if (m.kind == "torus") return std::make_unique<TorusGrauertTube>(m.n, m.eps, m.variant);
    if (m.kind == "projective") return std::make_unique<CircleBundleModel>(projective_space(m.d));
    std::vector<Rational> coeffs;
    for (const auto& s : m.hilbert_coeffs) coeffs.push_back(parse_rational(s));
    return std::make_unique<CircleBundleModel>(m.d, std::move(coeffs));
}

inline BumpFunction make_chi(const ChiSpec& c) { return BumpFunction(c.delta1, c.delta2, profile_by_id(c.profile)); }

inline PointX make_point(const TorusGrauertTube& model, const PointSpec& p) { return model.point(p.x, p.dir); }

}  // namespace crspec::experiments
