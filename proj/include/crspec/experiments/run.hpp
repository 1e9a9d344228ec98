#pragma once

// File-driven experiments. A run produces a self-describing JSON report (the
// config, the version string, derived-constant notes, results, metrics and
// check outcomes) and optionally a CSV. Reports carry no timings, so identical
// inputs give identical bytes.

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "crspec/asymfit/asymfit.hpp"
#include "crspec/core/format.hpp"
#include "crspec/embedding/embedding.hpp"
#include "crspec/experiments/config.hpp"
#include "crspec/kernels/kernels.hpp"
#include "crspec/spectral/spectral.hpp"

namespace crspec::experiments {

struct ExperimentOutput {
    Json report;
    std::string csv;  // empty when the experiment has no CSV product
    bool passed = true;
};

// Fitted decay rate of a series expected to vanish: rate = -slope of log v.
struct DecayFit {
    double rate = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

inline DecayFit fit_decay(const Series& s) {
    DecayFit out;
    for (const auto& p : s) {
        if (!(p.value > 0.0)) {
            out.note = "series reaches " + format_g17(p.value) + " at k = " + format_g17(p.k) +
                       "; a power law is undefined";
            return out;
        }
    }
    try {
        const auto f = asymfit::fit_power(s);
        out.rate = -f.exponent;
        out.r_squared = f.r_squared;
    } catch (const DomainError& e) {
        out.note = e.what();
    }
    return out;
}

inline Json fit_json(const asymfit::FitResult& f) {
    Json j;
    j["exponent"] = f.exponent;
    j["coefficient"] = f.coefficient;
    j["r_squared"] = f.r_squared;
    j["residuals"] = f.residuals;
    return j;
}

inline Json decay_json(const DecayFit& f) {
    Json j;
    j["rate"] = std::isfinite(f.rate) ? Json(f.rate) : Json(nullptr);
    j["r_squared"] = std::isfinite(f.r_squared) ? Json(f.r_squared) : Json(nullptr);
    if (!f.note.empty()) j["note"] = f.note;
    return j;
}

inline Json point_json(const PointX& p) {
    Json j;
    j["x"] = p.x;
    j["y"] = p.y;
    return j;
}

inline std::string series_csv(const Series& s) {
    std::ostringstream os;
    write_series_csv(os, s);
    return os.str();
}

inline Json provenance_notes(const ModelSpec& m) {
    Json notes = Json::array();
    if (m.kind == "torus") {
        notes.push_back("dV_xi/dV = 2^-(n-1) eps: xi ^ dxi^d / (2^d d!) evaluated on an orthonormal frame of T_pX "
                        "at y = eps e_1, constant on X by translation and rotation invariance");
        notes.push_back("sigma_P(xi) = eps for the grauert variant, 1 for the reeb variant (xi(R) = 1)");
        notes.push_back("C_P = vol(S^{n-1}) (grauert), eps^n vol(S^{n-1}) (reeb); equals "
                        "(dV_xi/dV) vol(X) / (2 pi^{d+1} sigma_P(xi)^{d+1})");
        notes.push_back("reeb-variant embeddings use eigenfunctions orthonormal for dV_xi: f_m = s_m / sqrt(dV_xi/dV)");
    } else {
        notes.push_back("C_P = leading Hilbert coefficient c_d (Euler-Maclaurin on sum_m mult(m) chi(m/k))");
    }
    return notes;
}

inline Json describe_model(const ModelSpec& m) {
    Json j;
    j["kind"] = m.kind;
    if (m.kind == "torus") {
        j["n"] = m.n;
        j["eps"] = m.eps;
        j["operator_variant"] = to_string(m.variant);
    } else {
        j["d"] = m.d;
        if (!m.hilbert_coeffs.empty()) j["hilbert_coeffs"] = m.hilbert_coeffs;
    }
    return j;
}

inline Json describe_chi(const ChiSpec& c) {
    Json j;
    j["delta1"] = c.delta1;
    j["delta2"] = c.delta2;
    j["profile"] = c.profile;
    return j;
}

namespace detail {

inline const TorusGrauertTube& torus(const ModelSpectrum& m) {
    const auto* t = dynamic_cast<const TorusGrauertTube*>(&m);
    if (t == nullptr) throw ValidationError("experiment needs model.kind = torus");
    return *t;
}

inline Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace detail

/// Runs one experiment. Embedded checks are evaluated against `metrics`; a
/// metric that is missing or not finite fails its check.
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    ExperimentOutput out;
    Json& r = out.report;
    r["version"] = kVersion;
    r["experiment"] = to_string(cfg.kind);
    if (!cfg.name.empty()) r["name"] = cfg.name;
    r["config"] = cfg.source;
    std::map<std::string, double> metrics;

    if (cfg.kind == ExperimentKind::fit) {
        std::ifstream in(cfg.input);
        if (!in) throw ValidationError("cannot open field `input` file '" + cfg.input + "'");
        const Series s = read_series_csv(in);
        const auto f = asymfit::fit_power(s);
        r["fit"] = fit_json(f);
        metrics["fit.exponent"] = f.exponent;
        metrics["fit.coefficient"] = f.coefficient;
        metrics["fit.r_squared"] = f.r_squared;
    } else {
        r["model"] = describe_model(cfg.model);
        r["chi"] = describe_chi(cfg.chi);
        r["provenance"] = provenance_notes(cfg.model);
        const auto model = make_model(cfg.model);
        const BumpFunction chi = make_chi(cfg.chi);
        const int d = model->cr_dimension();
        Json entries = Json::array();
        Series series;

        switch (cfg.kind) {
            case ExperimentKind::spectrum: {
                std::ostringstream os;
                os << "lambda,multiplicity\n";
                std::int64_t total = 0;
                std::size_t lines = 0;
                for (const auto& l : model->spectrum_up_to(cfg.lambda_max)) {
                    os << format_g17(l.lambda) << ',' << l.multiplicity << '\n';
                    total += l.multiplicity;
                    ++lines;
                }
                out.csv = os.str();
                r["lambda_max"] = cfg.lambda_max;
                r["lines"] = lines;
                r["total_multiplicity"] = total;
                metrics["lines"] = static_cast<double>(lines);
                metrics["total_multiplicity"] = static_cast<double>(total);
                break;
            }
            case ExperimentKind::measure: {
                double worst = 0.0, last = 0.0;
                for (double k : cfg.ks) {
                    const auto rep = spectral::mu_pairing(*model, chi, k);
                    Json e;
                    e["k"] = rep.k;
                    e["pairing"] = rep.pairing;
                    e["limit"] = detail::nullable(rep.limit);
                    e["n_eigen"] = rep.n_eigen;
                    entries.push_back(e);
                    series.push_back({k, rep.pairing});
                    last = std::abs(rep.pairing - rep.limit) / std::abs(rep.limit);
                    worst = std::max(worst, last);
                }
                metrics["last.rel_error"] = last;
                metrics["max.rel_error"] = worst;
                break;
            }
            case ExperimentKind::trace: {
                for (double k : cfg.ks) {
                    const double tr = spectral::trace_chi(*model, chi, k);
                    Json e;
                    e["k"] = k;
                    e["trace"] = tr;
                    e["scaled"] = tr / std::pow(k, d + 1);
                    entries.push_back(e);
                    series.push_back({k, tr});
                }
                metrics["last.trace"] = series.back().value;
                break;
            }
            case ExperimentKind::weyl: {
                series = spectral::weyl_scan(*model, cfg.ks);
                for (const auto& p : series) entries.push_back(Json{{"k", p.k}, {"count", p.value}});
                if (series.size() >= 3) {
                    const auto f = asymfit::fit_power(series);
                    r["fit"] = fit_json(f);
                    metrics["fit.exponent"] = f.exponent;
                    metrics["fit.coefficient"] = f.coefficient;
                    metrics["fit.r_squared"] = f.r_squared;
                }
                break;
            }
            case ExperimentKind::kernel_diag: {
                const auto& t = detail::torus(*model);
                const PointX p = make_point(t, *cfg.point);
                Series raw;
                for (double k : cfg.ks) {
                    const auto frame = build_frame(t, chi, k, false, VolumeForm::riemannian, cfg.budget);
                    const double v = kernels::kernel_diag(frame, p);
                    raw.push_back({k, v});
                    series.push_back({k, v / std::pow(k, d + 1)});
                    entries.push_back(Json{{"k", k}, {"diag", v}, {"rescaled", v / std::pow(k, d + 1)},
                                           {"modes", frame.size()}});
                }
                r["point"] = point_json(p);
                const auto f = asymfit::fit_power(raw);
                r["fit"] = fit_json(f);
                metrics["fit.exponent"] = f.exponent;
                metrics["fit.r_squared"] = f.r_squared;
                metrics["last.rescaled"] = series.back().value;
                break;
            }
            case ExperimentKind::kernel_offdiag: {
                const auto& t = detail::torus(*model);
                const PointX p = make_point(t, *cfg.point);
                const PointX q = make_point(t, *cfg.point_q);
                const double dist = kernels::product_distance(p, q);
                if (dist < cfg.separation_floor) {
                    throw ValidationError("points are " + format_g17(dist) + " apart, below `separation_floor` " +
                                          format_g17(cfg.separation_floor));
                }
                Json re = Json::array(), im = Json::array(), nz = Json::array();
                for (double k : cfg.ks) {
                    const auto frame = build_frame(t, chi, k, false, VolumeForm::riemannian, cfg.budget);
                    const auto v = kernels::kernel_eval(frame, p, q);
                    const double c = kernels::normalized_correlation(frame, p, q);
                    re.push_back(v.real());
                    im.push_back(v.imag());
                    nz.push_back(c);
                    series.push_back({k, c});
                }
                r["point_p"] = point_json(p);
                r["point_q"] = point_json(q);
                r["ks"] = cfg.ks;
                r["values_re"] = re;
                r["values_im"] = im;
                r["normalized"] = nz;
                const auto f = fit_decay(series);
                r["decay"] = decay_json(f);
                metrics["decay.rate"] = f.rate;
                metrics["decay.r_squared"] = f.r_squared;
                break;
            }
            case ExperimentKind::embed_pullback:
            case ExperimentKind::embed_equivariance: {
                const auto& t = detail::torus(*model);
                const PointX p = make_point(t, *cfg.point);
                const embedding::EmbeddingConfig ec{cfg.scaling, t.variant()};
                const double cprime = chi.moment(d + 2, true);
                Series dev, da, db, dc;
                double sphere_max = 0.0, reeb_last = 0.0;
                for (double k : cfg.ks) {
                    const embedding::Embedding emb(t, chi, k, ec, cfg.budget);
                    const auto w = emb.pullback_omega(p);
                    const auto cmp = embedding::compare_with_contact_form(w, t.geometry_constants());
                    const auto eq = emb.equivariance(p);
                    Json e;
                    e["k"] = k;
                    e["scaling"] = embedding::to_string(cfg.scaling);
                    e["point"] = point_json(p);
                    e["norm_sq"] = emb.norm_sq(p);
                    e["pullback"] = Json{{"dx", w.a}, {"sphere", w.b}, {"reeb_pairing", w.reeb_pairing},
                                         {"deviation", cmp.deviation}, {"xi_sign", cmp.sign}};
                    e["equivariance"] = Json{{"a", eq.a}, {"b", eq.b}, {"c", eq.c}};
                    entries.push_back(e);
                    dev.push_back({k, cmp.deviation});
                    da.push_back({k, std::abs(eq.a - cprime)});
                    db.push_back({k, std::abs(eq.b - cprime)});
                    dc.push_back({k, eq.c});
                    sphere_max = std::max(sphere_max, cmp.sphere_max);
                    reeb_last = w.reeb_pairing;
                }
                r["moments"] = Json{{"int_t^(d+2)_eta", cprime}, {"int_t^(d+3)_eta", chi.moment(d + 3, true)}};
                if (cfg.kind == ExperimentKind::embed_pullback) {
                    series = dev;
                    const auto f = fit_decay(dev);
                    r["decay"] = decay_json(f);
                    metrics["decay.rate"] = f.rate;
                    metrics["decay.r_squared"] = f.r_squared;
                    double dev_max = 0.0;
                    for (const auto& s : dev) dev_max = std::max(dev_max, s.value);
                    metrics["deviation.max"] = dev_max;
                    metrics["deviation.last"] = dev.back().value;
                    metrics["sphere.max"] = sphere_max;
                    metrics["last.reeb_pairing"] = reeb_last;
                } else {
                    series = dc;
                    const auto fa = fit_decay(da), fb = fit_decay(db), fc = fit_decay(dc);
                    r["decay"] = Json{{"a", decay_json(fa)}, {"b", decay_json(fb)}, {"c", decay_json(fc)}};
                    metrics["decay.a.rate"] = fa.rate;
                    metrics["decay.a.r_squared"] = fa.r_squared;
                    metrics["decay.b.rate"] = fb.rate;
                    metrics["decay.b.r_squared"] = fb.r_squared;
                    metrics["decay.c.rate"] = fc.rate;
                    metrics["decay.c.r_squared"] = fc.r_squared;
                }
                break;
            }
            case ExperimentKind::embed_inject: {
                const auto& t = detail::torus(*model);
                const auto samples = embedding::sample_points(t, static_cast<std::size_t>(cfg.samples), cfg.seed);
                for (double k : cfg.ks) {
                    const embedding::Embedding emb(t, chi, k, {cfg.scaling, t.variant()}, cfg.budget);
                    const auto inj = embedding::injectivity_scan(emb, samples, cfg.separation_floor);
                    entries.push_back(Json{{"k", k}, {"max_correlation", inj.max_correlation},
                                           {"pair", {inj.first, inj.second}}, {"min_separation", inj.min_separation}});
                    series.push_back({k, inj.max_correlation});
                }
                metrics["last.max_correlation"] = series.back().value;
                break;
            }
            case ExperimentKind::sphere_defect: {
                const auto& t = detail::torus(*model);
                const auto samples = embedding::sample_points(t, static_cast<std::size_t>(cfg.samples), cfg.seed);
                for (double k : cfg.ks) {
                    const embedding::Embedding emb(t, chi, k, {embedding::Scaling::sphere_normalized, t.variant()},
                                                   cfg.budget);
                    const auto sd = embedding::sphere_defect(emb, samples);
                    entries.push_back(Json{{"k", k}, {"sup_defect", sd.sup_defect}, {"cm_norms", sd.cm_norms}});
                    series.push_back({k, sd.sup_defect});
                }
                const auto f = fit_decay(series);
                r["decay"] = decay_json(f);
                metrics["decay.rate"] = f.rate;
                metrics["decay.r_squared"] = f.r_squared;
                break;
            }
            case ExperimentKind::fit: break;
        }
        if (!entries.empty()) r["entries"] = entries;
        if (out.csv.empty() && !series.empty()) out.csv = series_csv(series);
    }

    Json m = Json::object();
    for (const auto& [k, v] : metrics) m[k] = detail::nullable(v);
    r["metrics"] = m;

    Json checks = Json::array();
    for (const auto& ch : cfg.checks) {
        const auto it = metrics.find(ch.metric);
        const bool have = it != metrics.end() && std::isfinite(it->second);
        bool ok = have;
        if (have && ch.min) ok = ok && it->second >= *ch.min;
        if (have && ch.max) ok = ok && it->second <= *ch.max;
        Json c;
        c["metric"] = ch.metric;
        c["value"] = have ? Json(it->second) : Json(nullptr);
        if (ch.min) c["min"] = *ch.min;
        if (ch.max) c["max"] = *ch.max;
        c["pass"] = ok;
        checks.push_back(c);
        out.passed = out.passed && ok;
    }
    r["checks"] = checks;
    r["status"] = out.passed ? "pass" : "fail";
    return out;
}

}  // namespace crspec::experiments
