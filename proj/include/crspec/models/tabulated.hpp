#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crspec/core/error.hpp"
#include "crspec/models/model_spectrum.hpp"

namespace crspec {

// An explicit finite list of eigenvalues. Lines may repeat a lambda; they are
// kept in the given order after a stable sort.
class TabulatedSpectrum final : public ModelSpectrum {
public:
    TabulatedSpectrum(int d, std::vector<SpectralLine> lines, std::optional<double> limit = std::nullopt)
        : d_(d), lines_(std::move(lines)), limit_(limit) {
        if (d < 1) throw ValidationError("tabulated spectrum: d must be >= 1");
        for (const auto& l : lines_) {
            if (!(l.lambda > 0.0) || l.multiplicity < 1) {
                throw ModelValidityError("tabulated spectrum needs lambda > 0 and multiplicity >= 1");
            }
        }
        std::stable_sort(lines_.begin(), lines_.end(),
                         [](const SpectralLine& a, const SpectralLine& b) { return a.lambda < b.lambda; });
    }

    int cr_dimension() const override { return d_; }
    std::string name() const override { return "tabulated(" + std::to_string(lines_.size()) + " lines)"; }
    std::optional<double> limit_constant() const override { return limit_; }

    std::vector<SpectralLine> spectrum_up_to(double cutoff) const override {
        if (!(cutoff > 0.0)) throw ValidationError("spectrum cutoff must be > 0");
        std::vector<SpectralLine> out;
        for (const auto& l : lines_) {
            if (l.lambda > cutoff) break;
            out.push_back(l);
        }
        return out;
    }

private:
    int d_;
    std::vector<SpectralLine> lines_;
    std::optional<double> limit_;
};

}  // namespace crspec
