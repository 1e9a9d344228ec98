#pragma once

// The finite set of lattice modes m with chi(lambda_m / k) possibly nonzero,
// i.e. lambda_m / k in (delta1, delta2), stored structure-of-arrays. Modes are
// grouped by shell (ascending norm, hence ascending lambda) and are in
// lexicographic order within a shell, which fixes every reduction order.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "crspec/core/error.hpp"
#include "crspec/models/torus.hpp"
#include "crspec/specfun/bump.hpp"

namespace crspec {

// Volume form for which the eigenfunctions are orthonormal. `contact` uses
// dV_xi = kappa dV, so f_m = s_m / sqrt(kappa).
enum class VolumeForm { riemannian, contact };

struct FrameShell {
    std::int64_t norm_sq = 0;
    std::int64_t count = 0;
    double lambda = 0.0;
    double weight = 0.0;       // chi(lambda / k) or eta(lambda / k)
    double log_norm_sq = 0.0;  // log of ||s_m||^2 in the frame's volume form
    double log_term = 0.0;     // log(weight) - log_norm_sq; -inf for zero weight
};

class ModeFrame {
public:
    ModeFrame(const TorusGrauertTube& model, double k, bool squared, VolumeForm volume)
        : model_(model), k_(k), squared_(squared), volume_(volume), coords_(model.n()) {}

    const TorusGrauertTube& model() const noexcept { return model_; }
    int n() const noexcept { return model_.n(); }
    double k() const noexcept { return k_; }
    bool squared() const noexcept { return squared_; }
    VolumeForm volume() const noexcept { return volume_; }

    std::size_t size() const noexcept { return shell_of_.size(); }
    bool empty() const noexcept { return shell_of_.empty(); }

    const std::vector<FrameShell>& shells() const noexcept { return shells_; }
    const FrameShell& shell(std::size_t mode) const noexcept { return shells_[shell_of_[mode]]; }
    std::uint32_t shell_index(std::size_t mode) const noexcept { return shell_of_[mode]; }

    int coord(std::size_t mode, int axis) const noexcept { return coords_[axis][mode]; }
    const std::int16_t* axis(int a) const noexcept { return coords_[a].data(); }
    int max_abs_coord() const noexcept { return max_abs_; }

    // <m, v> in a fixed summation order.
    double dot(std::size_t mode, const double* v) const noexcept {
        double s = 0.0;
        for (int a = 0; a < n(); ++a) s += coords_[a][mode] * v[a];
        return s;
    }

    std::vector<std::int64_t> vector_of(std::size_t mode) const {
        std::vector<std::int64_t> m(n());
        for (int a = 0; a < n(); ++a) m[a] = coords_[a][mode];
        return m;
    }

private:
    friend ModeFrame build_frame(const TorusGrauertTube&, const BumpFunction&, double, bool, VolumeForm,
                                 const ResourceBudget&);

    TorusGrauertTube model_;
    double k_;
    bool squared_;
    VolumeForm volume_;
    std::vector<FrameShell> shells_;
    std::vector<std::vector<std::int16_t>> coords_;
    std::vector<std::uint32_t> shell_of_;
    int max_abs_ = 0;
};

namespace detail {

// Lexicographic enumeration of m in Z^n with lo_sq <= |m|^2 <= hi_sq.
template <class Visit>
void enumerate_annulus(int n, std::int64_t lo_sq, std::int64_t hi_sq, Visit&& visit) {
    std::vector<std::int64_t> m(n, 0);
    const auto isqrt = [](std::int64_t v) {
        auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
        while (r * r > v) --r;
        while ((r + 1) * (r + 1) <= v) ++r;
        return r;
    };
    const auto rec = [&](auto&& self, int axis, std::int64_t partial) -> void {
        const std::int64_t room = hi_sq - partial;
        if (room < 0) return;
        const std::int64_t top = isqrt(room);
        if (axis == n - 1) {
            const std::int64_t need = lo_sq - partial;
            std::int64_t bottom = 0;
            if (need > 0) {
                bottom = isqrt(need);
                if (bottom * bottom < need) ++bottom;
            }
            if (bottom > top) return;
            for (std::int64_t v = -top; v <= -bottom; ++v) {
                if (v == 0) continue;
                m[axis] = v;
                visit(m, partial + v * v);
            }
            for (std::int64_t v = bottom; v <= top; ++v) {
                m[axis] = v;
                visit(m, partial + v * v);
            }
            return;
        }
        for (std::int64_t v = -top; v <= top; ++v) {
            m[axis] = v;
            self(self, axis + 1, partial + v * v);
        }
    };
    rec(rec, 0, 0);
}

}  // namespace detail

/// All modes with lambda_m / k in (delta1, delta2). Weights are chi(lambda/k),
/// or eta = chi^2 when `squared` is set.
inline ModeFrame build_frame(const TorusGrauertTube& model, const BumpFunction& chi, double k, bool squared,
                             VolumeForm volume = VolumeForm::riemannian, const ResourceBudget& budget = {}) {
    if (!(k >= 1.0) || !std::isfinite(k)) throw ValidationError("build_frame: k must be >= 1");
    ModeFrame frame(model, k, squared, volume);
    const auto window = model.window_shells(k * chi.delta1(), k * chi.delta2(), budget);
    if (window.empty()) return frame;

    std::int64_t total = 0;
    for (const auto& s : window) total += s.count;
    const std::size_t bytes =
        static_cast<std::size_t>(total) * (model.n() * sizeof(std::int16_t) + sizeof(std::uint32_t)) * 2;
    if (static_cast<std::size_t>(total) > budget.max_modes || bytes > budget.max_bytes) {
        throw ResourceError("mode frame needs " + std::to_string(total) + " modes (" + std::to_string(bytes) +
                            " bytes); budget is " + std::to_string(budget.max_modes) + " modes / " +
                            std::to_string(budget.max_bytes) + " bytes");
    }
    const std::int64_t lo_sq = window.front().norm_sq;
    const std::int64_t hi_sq = window.back().norm_sq;
    if (hi_sq > std::int64_t{32767} * 32767) throw ResourceError("mode coordinates exceed 16-bit storage");

    const double log_kappa = std::log(model.geometry_constants().dvxi_over_dv);
    std::vector<std::int32_t> index_of(static_cast<std::size_t>(hi_sq - lo_sq + 1), -1);
    for (std::size_t i = 0; i < window.size(); ++i) {
        const auto& w = window[i];
        FrameShell fs;
        fs.norm_sq = w.norm_sq;
        fs.count = w.count;
        fs.lambda = w.lambda;
        fs.weight = chi.eval(w.lambda / k, squared);
        fs.log_norm_sq = model.shell_data(std::sqrt(static_cast<double>(w.norm_sq))).log_norm_sq;
        if (volume == VolumeForm::contact) fs.log_norm_sq += log_kappa;
        fs.log_term = fs.weight > 0.0 ? std::log(fs.weight) - fs.log_norm_sq
                                      : -std::numeric_limits<double>::infinity();
        frame.shells_.push_back(fs);
        index_of[static_cast<std::size_t>(w.norm_sq - lo_sq)] = static_cast<std::int32_t>(i);
    }

    // Counting sort by shell: offsets from the exact shell counts.
    std::vector<std::size_t> next(window.size());
    std::size_t offset = 0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        next[i] = offset;
        offset += static_cast<std::size_t>(window[i].count);
    }
    const int n = model.n();
    for (auto& c : frame.coords_) c.assign(offset, 0);
    frame.shell_of_.assign(offset, 0);
    int max_abs = 0;
    detail::enumerate_annulus(n, lo_sq, hi_sq, [&](const std::vector<std::int64_t>& m, std::int64_t norm_sq) {
        const std::int32_t s = index_of[static_cast<std::size_t>(norm_sq - lo_sq)];
        if (s < 0) return;
        const std::size_t slot = next[s]++;
        for (int a = 0; a < n; ++a) {
            frame.coords_[a][slot] = static_cast<std::int16_t>(m[a]);
            max_abs = std::max(max_abs, static_cast<int>(m[a] < 0 ? -m[a] : m[a]));
        }
        frame.shell_of_[slot] = static_cast<std::uint32_t>(s);
    });
    std::size_t expected = 0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        expected += static_cast<std::size_t>(window[i].count);
        if (next[i] != expected) throw DomainError("mode enumeration disagrees with the shell counts");
    }
    frame.max_abs_ = max_abs;
    return frame;
}

}  // namespace crspec
