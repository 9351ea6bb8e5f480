#include "remest/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "remest/errors.hpp"

namespace remest {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kSqrt2 = 1.41421356237309504880;
} // namespace

NoiseFamily noise_family_from_string(const std::string& name) {
    if (name == "gaussian") return NoiseFamily::gaussian;
    if (name == "laplace") return NoiseFamily::laplace;
    if (name == "uniform") return NoiseFamily::uniform;
    if (name == "triangular") return NoiseFamily::triangular;
    throw validation_error("unknown noise family '" + name +
                           "' (expected gaussian|laplace|uniform|triangular)");
}

std::string to_string(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::gaussian: return "gaussian";
        case NoiseFamily::laplace: return "laplace";
        case NoiseFamily::uniform: return "uniform";
        case NoiseFamily::triangular: return "triangular";
    }
    return "?";
}

NoiseSpec::NoiseSpec(NoiseFamily f, double s) : family(f), scale(s) {
    if (!(s > 0.0) || !std::isfinite(s))
        throw validation_error("noise scale must be a positive finite real");
}

double NoiseSpec::pdf(double x) const {
    const double s = scale;
    switch (family) {
        case NoiseFamily::gaussian: {
            double z = x / s;
            return kInvSqrt2Pi / s * std::exp(-0.5 * z * z);
        }
        case NoiseFamily::laplace:
            return std::exp(-std::fabs(x) / s) / (2.0 * s);
        case NoiseFamily::uniform:
            return std::fabs(x) <= s ? 1.0 / (2.0 * s) : 0.0;
        case NoiseFamily::triangular: {
            double a = std::fabs(x);
            return a <= s ? (1.0 - a / s) / s : 0.0;
        }
    }
    return 0.0;
}

double NoiseSpec::cdf(double x) const {
    const double s = scale;
    switch (family) {
        case NoiseFamily::gaussian:
            return 0.5 * (1.0 + std::erf(x / (s * kSqrt2)));
        case NoiseFamily::laplace:
            return x < 0.0 ? 0.5 * std::exp(x / s) : 1.0 - 0.5 * std::exp(-x / s);
        case NoiseFamily::uniform: {
            if (x <= -s) return 0.0;
            if (x >= s) return 1.0;
            return (x + s) / (2.0 * s);
        }
        case NoiseFamily::triangular: {
            if (x <= -s) return 0.0;
            if (x >= s) return 1.0;
            if (x <= 0.0) {
                double u = (x + s) / s;
                return 0.5 * u * u;
            }
            double u = (s - x) / s;
            return 1.0 - 0.5 * u * u;
        }
    }
    return 0.0;
}

double NoiseSpec::truncation_radius() const {
    switch (family) {
        case NoiseFamily::gaussian: return 8.0 * scale;
        case NoiseFamily::laplace: return 36.0 * scale;
        case NoiseFamily::uniform:
        case NoiseFamily::triangular: return scale;
    }
    return 8.0 * scale;
}

double NoiseSpec::truncated_mass_bound() const {
    switch (family) {
        case NoiseFamily::gaussian: return 1.3e-15;
        case NoiseFamily::laplace: return 2.4e-16;
        case NoiseFamily::uniform:
        case NoiseFamily::triangular: return 0.0;
    }
    return 1.3e-15;
}

double NoiseSpec::sample(Rng& rng) const {
    const double s = scale;
    switch (family) {
        case NoiseFamily::gaussian: {
            // Box-Muller, one deterministic pair of uniforms per draw.
            double u1 = 1.0 - rng.next_double(); // (0, 1]
            double u2 = rng.next_double();
            return s * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647693 * u2);
        }
        case NoiseFamily::laplace: {
            double u = rng.next_double();
            if (u < 0.5) return s * std::log(2.0 * u + 1e-300);
            return -s * std::log(2.0 * (1.0 - u) + 1e-300);
        }
        case NoiseFamily::uniform:
            return s * (2.0 * rng.next_double() - 1.0);
        case NoiseFamily::triangular: {
            double u = rng.next_double();
            if (u < 0.5) return s * (std::sqrt(2.0 * u) - 1.0);
            return s * (1.0 - std::sqrt(2.0 * (1.0 - u)));
        }
    }
    return 0.0;
}

} // namespace remest
