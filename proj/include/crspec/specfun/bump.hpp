#pragma once

#include <cmath>
#include <string>

#include "crspec/core/error.hpp"
#include "crspec/specfun/quadrature.hpp"

namespace crspec {

// A smooth profile on (delta1, delta2). Profiles are identified by id so that
// reports can name them; the function is only called strictly inside the support.
struct BumpProfile {
    std::string id;
    double (*fn)(double t, double delta1, double delta2) = nullptr;
};

namespace profiles {

inline double exp_profile(double t, double d1, double d2) {
    return std::exp(-1.0 / ((t - d1) * (d2 - t)));
}

inline BumpProfile exponential() { return {"exp", &exp_profile}; }

}  // namespace profiles

inline BumpProfile profile_by_id(const std::string& id) {
    if (id == "exp") return profiles::exponential();
    throw ValidationError("unknown bump profile '" + id + "' (available: exp)");
}

// Compactly supported test function chi with supp chi in [delta1, delta2],
// 0 < delta1 < delta2. eval returns exact zeros outside the open support.
class BumpFunction {
public:
    BumpFunction(double delta1, double delta2, BumpProfile profile = profiles::exponential(),
                 double amplitude = 1.0)
        : delta1_(delta1), delta2_(delta2), amplitude_(amplitude), profile_(std::move(profile)) {
        if (!(delta1 > 0.0)) throw ValidationError("chi.delta1 must be > 0");
        if (!(delta2 > delta1)) throw ValidationError("chi.delta1 must be < chi.delta2");
        if (profile_.fn == nullptr) throw ValidationError("chi.profile has no evaluator");
        if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw ValidationError("chi.amplitude must be > 0");
    }

    double delta1() const noexcept { return delta1_; }
    double delta2() const noexcept { return delta2_; }
    double amplitude() const noexcept { return amplitude_; }
    const std::string& profile_id() const noexcept { return profile_.id; }

    BumpFunction scaled(double c) const { return BumpFunction(delta1_, delta2_, profile_, amplitude_ * c); }

    double operator()(double t) const noexcept {
        if (t <= delta1_ || t >= delta2_) return 0.0;
        return amplitude_ * profile_.fn(t, delta1_, delta2_);
    }

    // eta = |chi|^2
    double squared(double t) const noexcept {
        const double v = (*this)(t);
        return v * v;
    }

    double eval(double t, bool squared_flag) const noexcept {
        return squared_flag ? squared(t) : (*this)(t);
    }

    /// int t^p chi(t) dt, or int t^p |chi(t)|^2 dt when `squared_flag` is set.
    double moment(int p, bool squared_flag = false) const {
        if (p < 0) throw DomainError("bump moment: p must be >= 0");
        return quad::integrate(
            [&](double t) { return std::pow(t, p) * eval(t, squared_flag); }, delta1_, delta2_);
    }

private:
    double delta1_;
    double delta2_;
    double amplitude_;
    BumpProfile profile_;
};

inline double bump_moment(const BumpFunction& chi, int p, bool squared) {
    return chi.moment(p, squared);
}

}  // namespace crspec
