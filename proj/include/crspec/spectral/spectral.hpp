#pragma once

// Counting function, scaled spectral measures mu_k = k^{-(d+1)} sum_j delta(t - lambda_j / k),
// their limits C_P t^d dt, and traces Tr chi_k(T_P) = sum_j chi(lambda_j / k).

#include <cmath>
#include <cstdint>
#include <vector>

#include "crspec/core/error.hpp"
#include "crspec/core/series.hpp"
#include "crspec/core/summation.hpp"
#include "crspec/models/model_spectrum.hpp"
#include "crspec/specfun/bump.hpp"

namespace crspec::spectral {

struct MeasurePairingReport {
    double k = 0.0;
    double pairing = 0.0;
    double limit = 0.0;
    std::int64_t n_eigen = 0;
};

inline void require_k(double k, double floor, const char* op) {
    if (!(k >= floor) || !std::isfinite(k)) {
        throw ValidationError(std::string(op) + ": k must be >= " + std::to_string(floor));
    }
}

/// N(k): multiplicity-weighted count of eigenvalues <= k.
inline std::int64_t counting(const ModelSpectrum& model, double k) {
    require_k(k, 0.0, "counting");
    if (k == 0.0) return 0;
    return model.count_up_to(k);
}

struct WindowSum {
    double sum = 0.0;
    std::int64_t n_eigen = 0;
};

// sum mult * chi(lambda / k) over lambda in (k delta1, k delta2), ascending
// lambda, compensated. The single accumulation path behind trace and pairing.
inline WindowSum window_sum(const ModelSpectrum& model, const BumpFunction& chi, double k) {
    WindowSum out;
    CompensatedSum acc;
    for (const auto& line : model.spectrum_in(k * chi.delta1(), k * chi.delta2())) {
        acc.add(static_cast<double>(line.multiplicity) * chi(line.lambda / k));
        out.n_eigen += line.multiplicity;
    }
    out.sum = acc.value();
    return out;
}

/// Tr chi_k(T_P).
inline double trace_chi(const ModelSpectrum& model, const BumpFunction& chi, double k) {
    require_k(k, 1.0, "trace_chi");
    return window_sum(model, chi, k).sum;
}

/// C_P int t^d chi(t) dt.
inline double limit_pairing(const ModelSpectrum& model, const BumpFunction& chi) {
    const auto c = model.limit_constant();
    if (!c) throw ValidationError("model " + model.name() + " has no registered limit constant");
    return *c * chi.moment(model.cr_dimension());
}

/// <mu_k, chi> = k^{-(d+1)} Tr chi_k(T_P), with the limit pairing attached
/// when the model provides C_P (NaN otherwise).
inline MeasurePairingReport mu_pairing(const ModelSpectrum& model, const BumpFunction& chi, double k) {
    require_k(k, 1.0, "mu_pairing");
    const WindowSum w = window_sum(model, chi, k);
    MeasurePairingReport r;
    r.k = k;
    r.pairing = w.sum / std::pow(k, model.cr_dimension() + 1);
    r.n_eigen = w.n_eigen;
    r.limit = model.limit_constant() ? limit_pairing(model, chi) : std::nan("");
    return r;
}

/// (k, N(k)) for ascending ks.
inline Series weyl_scan(const ModelSpectrum& model, const std::vector<double>& ks) {
    Series out;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (i > 0 && !(ks[i] > ks[i - 1])) throw ValidationError("weyl_scan: ks must be strictly ascending");
        out.push_back({ks[i], static_cast<double>(counting(model, ks[i]))});
    }
    return out;
}

}  // namespace crspec::spectral
