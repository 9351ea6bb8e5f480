#pragma once

#include <string>

#include "remest/rng.hpp"

namespace remest {

enum class NoiseFamily { gaussian, laplace, uniform, triangular };

NoiseFamily noise_family_from_string(const std::string& name);
std::string to_string(NoiseFamily family);

/// Symmetric unimodal noise with a closed-form density and CDF.
///
/// `truncation_radius()` bounds the support used for grid sampling and
/// quadrature. Tail mass beyond the radius, per family:
///   gaussian   8·scale   ~1.2e-15
///   laplace    36·scale  ~2.3e-16   (8·scale would leave 3.4e-4 and break
///                                    the 1e-6 mass guard on filters)
///   uniform    scale     0 (exact support)
///   triangular scale     0 (exact support)
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::gaussian;
    double scale = 1.0;

    NoiseSpec() = default;
    NoiseSpec(NoiseFamily f, double s);

    double pdf(double x) const;
    double cdf(double x) const;
    double truncation_radius() const;
    double truncated_mass_bound() const;

    /// One draw from the (untruncated) distribution.
    double sample(Rng& rng) const;
};

} // namespace remest
