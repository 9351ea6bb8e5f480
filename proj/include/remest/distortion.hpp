#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "remest/errors.hpp"

namespace remest {

enum class DistortionKind { squared, absolute, even_power };

/// Even distortion on the real line: d(e) = d(-e), d(0) = 0, nondecreasing on
/// [0, inf). even_power carries the exponent p (even integer >= 2).
struct DistortionFn {
    DistortionKind kind = DistortionKind::squared;
    int power = 2;

    static DistortionFn squared() { return {DistortionKind::squared, 2}; }
    static DistortionFn absolute() { return {DistortionKind::absolute, 1}; }
    static DistortionFn even_power(int p) {
        if (p < 2 || p % 2 != 0) throw validation_error("even-power distortion needs an even p >= 2");
        return {DistortionKind::even_power, p};
    }

    double operator()(double e) const {
        switch (kind) {
            case DistortionKind::squared: return e * e;
            case DistortionKind::absolute: return std::fabs(e);
            case DistortionKind::even_power: return std::pow(std::fabs(e), power);
        }
        return 0.0;
    }
};

DistortionFn distortion_from_string(const std::string& name);
std::string to_string(const DistortionFn& d);

/// Distortion for finite alphabets: an explicit nonnegative n x n matrix,
/// no structure assumed. d[x][xhat].
struct FiniteDistortion {
    std::vector<std::vector<double>> d;

    std::size_t size() const { return d.size(); }
    double operator()(std::size_t x, std::size_t xhat) const { return d[x][xhat]; }

    static FiniteDistortion zero_one(std::size_t n) {
        FiniteDistortion out;
        out.d.assign(n, std::vector<double>(n, 1.0));
        for (std::size_t i = 0; i < n; ++i) out.d[i][i] = 0.0;
        return out;
    }

    void validate() const {
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i].size() != d.size())
                throw validation_error("distortion matrix is not square");
            for (double v : d[i])
                if (!(v >= 0.0)) throw validation_error("distortion matrix has a negative entry");
        }
    }
};

} // namespace remest
