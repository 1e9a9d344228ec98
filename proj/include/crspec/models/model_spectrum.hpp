#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace crspec {

struct SpectralLine {
    double lambda = 0.0;
    std::int64_t multiplicity = 0;
};

// Positive spectrum of a Toeplitz operator on a model CR manifold of CR
// dimension d (real dimension 2d + 1). Lines are returned in ascending order
// with exact multiplicities.
class ModelSpectrum {
public:
    virtual ~ModelSpectrum() = default;

    virtual int cr_dimension() const = 0;

    // All eigenvalues 0 < lambda <= cutoff. cutoff must be > 0.
    virtual std::vector<SpectralLine> spectrum_up_to(double cutoff) const = 0;

    // Lines with lo < lambda < hi (open window), ascending.
    virtual std::vector<SpectralLine> spectrum_in(double lo, double hi) const {
        std::vector<SpectralLine> out;
        if (!(hi > 0.0) || !(hi > lo)) return out;
        for (const auto& l : spectrum_up_to(hi)) {
            if (l.lambda > lo && l.lambda < hi) out.push_back(l);
        }
        return out;
    }

    // Multiplicity-weighted number of eigenvalues <= cutoff.
    virtual std::int64_t count_up_to(double cutoff) const {
        if (!(cutoff > 0.0)) return 0;
        std::int64_t total = 0;
        for (const auto& l : spectrum_up_to(cutoff)) total += l.multiplicity;
        return total;
    }

    // C_P in mu_k -> C_P t^d dt, when the model knows it.
    virtual std::optional<double> limit_constant() const { return std::nullopt; }

    virtual std::string name() const = 0;
};

}  // namespace crspec
