// crspec command-line driver. Exit codes: 0 ok, 1 validation, 2 resource,
// 3 numeric, 4 acceptance failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crspec/core/format.hpp"
#include "crspec/experiments/acceptance.hpp"
#include "crspec/experiments/config.hpp"
#include "crspec/experiments/run.hpp"
#include "crspec/specfun/bessel.hpp"
#include "crspec/specfun/gamma.hpp"

using namespace crspec;
using experiments::Json;

namespace {

// Flags that describe a model, a bump and a k ladder. Unset flags leave the
// config (or the built-in default) alone.
struct CommonFlags {
    std::string config;
    std::string out;
    std::string csv;
    std::optional<std::string> model;
    std::optional<int> n;
    std::optional<double> eps;
    std::optional<std::string> variant;
    std::optional<int> d;
    std::optional<double> delta1;
    std::optional<double> delta2;
    std::optional<std::string> profile;
    std::vector<double> ks;
    std::optional<std::int64_t> seed;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "experiment config (JSON)");
        app->add_option("--out", out, "output path (report; the CSV for `spectrum`)");
        app->add_option("--csv", csv, "CSV path (default: config output.csv)");
        app->add_option("--model", model, "torus | projective | circle-bundle");
        app->add_option("--n", n, "torus dimension n");
        app->add_option("--eps", eps, "tube radius");
        app->add_option("--variant", variant, "grauert | reeb");
        app->add_option("--d", d, "CR dimension (projective)");
        app->add_option("--delta1", delta1, "bump support start");
        app->add_option("--delta2", delta2, "bump support end");
        app->add_option("--profile", profile, "bump profile id");
        app->add_option("--ks", ks, "k ladder, comma separated")->delimiter(',');
        app->add_option("--seed", seed, "sampling seed");
    }

    Json build(const std::string& experiment) const {
        Json j;
        if (!config.empty()) {
            j = experiments::read_json_file(config);
        } else {
            j["schema"] = experiments::kExperimentSchema;
            j["model"] = Json{{"kind", "torus"}, {"n", 2}, {"eps", 0.5}, {"operator_variant", "grauert"}};
            j["chi"] = Json{{"delta1", 1.0}, {"delta2", 2.0}, {"profile", "exp"}};
        }
        if (!experiment.empty()) j["experiment"] = experiment;
        if (model) {
            j["model"] = Json{{"kind", *model}};
            if (*model == "torus") j["model"].update(Json{{"n", 2}, {"eps", 0.5}});
            if (*model == "projective") j["model"]["d"] = 1;
        }
        if (n) j["model"]["n"] = *n;
        if (eps) j["model"]["eps"] = *eps;
        if (variant) j["model"]["operator_variant"] = *variant;
        if (d) j["model"]["d"] = *d;
        if (delta1) j["chi"]["delta1"] = *delta1;
        if (delta2) j["chi"]["delta2"] = *delta2;
        if (profile) j["chi"]["profile"] = *profile;
        if (!ks.empty()) j["ks"] = ks;
        if (seed) j["seed"] = *seed;
        return j;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ResourceError("cannot write '" + path + "'");
    os << text;
    if (!os) throw ResourceError("write to '" + path + "' failed");
}

int emit(const experiments::ExperimentConfig& cfg, const CommonFlags& f) {
    const auto result = experiments::run_experiment(cfg);
    const std::string report = result.report.dump(2) + "\n";
    const std::string out = !f.out.empty() ? f.out : cfg.report_path;
    const std::string csv = !f.csv.empty() ? f.csv : cfg.csv_path;
    if (out.empty()) {
        std::cout << report;
    } else {
        write_text(out, report);
    }
    if (!csv.empty() && !result.csv.empty()) write_text(csv, result.csv);
    if (!result.passed) {
        std::cerr << "crspec: embedded acceptance checks failed\n";
        return static_cast<int>(ErrorCategory::acceptance);
    }
    return 0;
}

experiments::ExperimentConfig finish(Json j) { return experiments::parse_experiment(j); }

void point_option(CLI::App* app, const std::string& name, std::vector<double>& x, std::vector<double>& dir) {
    app->add_option("--" + name + "-x", x, "torus coordinates")->delimiter(',');
    app->add_option("--" + name + "-dir", dir, "sphere direction (scaled to |y| = eps)")->delimiter(',');
}

void set_point(Json& j, const char* key, const std::vector<double>& x, const std::vector<double>& dir) {
    if (!x.empty() || !dir.empty()) j[key] = Json{{"x", x}, {"dir", dir}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toeplitz spectra, kernels and embeddings on model CR manifolds"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // specfun-eval
    auto* sf = app.add_subcommand("specfun-eval", "evaluate a special function");
    std::string fn;
    int order = 2, nu = 0, p = 0, j = 0;
    double t = 0.0, d1 = 1.0, d2 = 2.0;
    bool squared = false;
    sf->add_option("function", fn, "gamma | log_gamma | gamma_ratio | gamma_prime | bessel_i | sphere_volume | bump_moment")
        ->required();
    sf->add_option("--n", order, "order n of gamma_n");
    sf->add_option("--t", t, "argument");
    sf->add_option("--nu", nu, "Bessel order");
    sf->add_option("--j", j, "sphere dimension");
    sf->add_option("--p", p, "moment power");
    sf->add_option("--delta1", d1, "bump support start");
    sf->add_option("--delta2", d2, "bump support end");
    sf->add_flag("--squared", squared, "moment of chi^2");

    // spectrum
    auto* sp = app.add_subcommand("spectrum", "export eigenvalues with multiplicities");
    CommonFlags spf;
    double lambda_max = 0.0;
    std::string shells_out;
    spf.attach(sp);
    sp->add_option("--lambda-max", lambda_max, "cutoff");
    sp->add_option("--shells", shells_out, "also export lattice shells (torus) as norm_sq,count,lambda");

    // measure, trace
    auto* me = app.add_subcommand("measure", "scaled spectral measure pairings");
    CommonFlags mef;
    std::string measure_kind;
    mef.attach(me);
    me->add_option("--kind", measure_kind, "measure | weyl");
    auto* tr = app.add_subcommand("trace", "traces of chi_k(T_P)");
    CommonFlags trf;
    trf.attach(tr);

    // kernel
    auto* ke = app.add_subcommand("kernel", "kernel probes (diag | offdiag)");
    CommonFlags kef;
    std::string kernel_kind;
    std::vector<double> px, pdir, qx, qdir;
    kef.attach(ke);
    ke->add_option("--kind", kernel_kind, "diag | offdiag");
    point_option(ke, "p", px, pdir);
    point_option(ke, "q", qx, qdir);

    // embed
    auto* em = app.add_subcommand("embed", "embedding probes (pullback | equivariance | inject | sphere-defect)");
    CommonFlags emf;
    std::string embed_kind, scaling;
    std::vector<double> ex, edir;
    std::optional<int> samples;
    emf.attach(em);
    em->add_option("--kind", embed_kind, "pullback | equivariance | inject | sphere-defect");
    em->add_option("--scaling", scaling, "plain | rescaled | sphere-normalized");
    em->add_option("--samples", samples, "sample count for scans");
    point_option(em, "p", ex, edir);

    // fit
    auto* fi = app.add_subcommand("fit", "power-law fit of a k,value CSV");
    std::string fit_input, fit_out;
    fi->add_option("--input", fit_input, "series CSV")->required();
    fi->add_option("--out", fit_out, "report path (default stdout)");

    // report-all
    auto* ra = app.add_subcommand("report-all", "run the full acceptance suite");
    std::string suite_config, suite_out;
    ra->add_option("--config", suite_config, "suite config (JSON)")->required();
    ra->add_option("--out", suite_out, "report path (default: config output.report, else stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ErrorCategory::validation);
    }

    try {
        if (sf->parsed()) {
            double v = 0.0;
            if (fn == "gamma") v = specfun::gamma(order, t);
            else if (fn == "log_gamma") v = specfun::log_gamma(order, t);
            else if (fn == "gamma_ratio") v = specfun::gamma_ratio(order, t);
            else if (fn == "gamma_prime") v = specfun::gamma_prime(order, t);
            else if (fn == "bessel_i") v = specfun::bessel_i(nu, t);
            else if (fn == "sphere_volume") v = specfun::sphere_volume(j);
            else if (fn == "bump_moment") v = bump_moment(BumpFunction(d1, d2), p, squared);
            else throw ValidationError("unknown function '" + fn + "'");
            std::cout << format_g17(v) << '\n';
            return 0;
        }
        if (sp->parsed()) {
            Json jc = spf.build("spectrum");
            if (lambda_max > 0.0) jc["lambda_max"] = lambda_max;
            const auto cfg = finish(jc);
            if (!shells_out.empty()) {
                const auto model = experiments::make_model(cfg.model);
                const auto* torus = dynamic_cast<const TorusGrauertTube*>(model.get());
                if (torus == nullptr) throw ValidationError("--shells needs model.kind = torus");
                std::ostringstream os;
                os << "norm_sq,count,lambda\n";
                for (const auto& s : torus->window_shells(0.0, std::nextafter(cfg.lambda_max, 1e300))) {
                    os << s.norm_sq << ',' << s.count << ',' << format_g17(s.lambda) << '\n';
                }
                write_text(shells_out, os.str());
            }
            // for this subcommand --out names the spectrum CSV
            const auto result = experiments::run_experiment(cfg);
            const std::string csv = !spf.out.empty() ? spf.out : !spf.csv.empty() ? spf.csv : cfg.csv_path;
            if (csv.empty()) {
                std::cout << result.csv;
            } else {
                write_text(csv, result.csv);
            }
            if (!cfg.report_path.empty()) write_text(cfg.report_path, result.report.dump(2) + "\n");
            return result.passed ? 0 : static_cast<int>(ErrorCategory::acceptance);
        }
        if (me->parsed()) {
            Json jc = mef.build("");
            if (!measure_kind.empty()) {
                if (measure_kind != "measure" && measure_kind != "weyl") throw ValidationError("--kind must be measure or weyl");
                jc["experiment"] = measure_kind;
            }
            if (!jc.contains("experiment")) jc["experiment"] = "measure";
            const std::string e = jc["experiment"].is_string() ? jc["experiment"].get<std::string>() : "";
            if (e != "measure" && e != "weyl") throw ValidationError("field `experiment` must be measure or weyl");
            return emit(finish(jc), mef);
        }
        if (tr->parsed()) return emit(finish(trf.build("trace")), trf);
        if (ke->parsed()) {
            Json jc = kef.build("");
            if (!kernel_kind.empty()) {
                if (kernel_kind != "diag" && kernel_kind != "offdiag") throw ValidationError("--kind must be diag or offdiag");
                jc["experiment"] = "kernel-" + kernel_kind;
            }
            if (!jc.contains("experiment")) jc["experiment"] = "kernel-diag";
            set_point(jc, "point", px, pdir);
            set_point(jc, "point_q", qx, qdir);
            const std::string e = jc["experiment"].is_string() ? jc["experiment"].get<std::string>() : "";
            if (e != "kernel-diag" && e != "kernel-offdiag") throw ValidationError("field `experiment` must be kernel-diag or kernel-offdiag");
            return emit(finish(jc), kef);
        }
        if (em->parsed()) {
            Json jc = emf.build("");
            if (!embed_kind.empty()) {
                if (embed_kind == "pullback") jc["experiment"] = "embed-pullback";
                else if (embed_kind == "equivariance") jc["experiment"] = "embed-equivariance";
                else if (embed_kind == "inject") jc["experiment"] = "embed-inject";
                else if (embed_kind == "sphere-defect") jc["experiment"] = "sphere-defect";
                else throw ValidationError("--kind must be pullback, equivariance, inject or sphere-defect");
            }
            if (!jc.contains("experiment")) jc["experiment"] = "embed-pullback";
            if (!scaling.empty()) jc["scaling"] = scaling;
            if (samples) jc["samples"] = *samples;
            set_point(jc, "point", ex, edir);
            const std::string e = jc["experiment"].is_string() ? jc["experiment"].get<std::string>() : "";
            if (e != "embed-pullback" && e != "embed-equivariance" && e != "embed-inject" && e != "sphere-defect") {
                throw ValidationError("field `experiment` must be an embedding experiment");
            }
            return emit(finish(jc), emf);
        }
        if (fi->parsed()) {
            Json jc;
            jc["schema"] = experiments::kExperimentSchema;
            jc["experiment"] = "fit";
            jc["input"] = fit_input;
            CommonFlags f;
            f.out = fit_out;
            return emit(finish(jc), f);
        }
        if (ra->parsed()) {
            const auto cfg = acceptance::parse_suite(experiments::read_json_file(suite_config));
            const Json report = acceptance::run_suite(cfg);
            const std::string text = report.dump(2) + "\n";
            const std::string out = !suite_out.empty() ? suite_out : cfg.report_path;
            if (out.empty()) {
                std::cout << text;
            } else {
                write_text(out, text);
            }
            for (const auto& c : report["criteria"]) {
                std::cerr << (c["pass"].get<bool>() ? "PASS" : "FAIL") << " criterion " << c["id"].get<int>() << ": "
                          << c["summary"].get<std::string>() << '\n';
            }
            return report["all_pass"].get<bool>() ? 0 : static_cast<int>(ErrorCategory::acceptance);
        }
    } catch (const Error& e) {
        std::cerr << "crspec: " << e.what() << '\n';
        return e.exit_code();
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "crspec: invalid config: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::validation);
    } catch (const std::bad_alloc&) {
        std::cerr << "crspec: out of memory\n";
        return static_cast<int>(ErrorCategory::resource);
    }
    return 0;
}
