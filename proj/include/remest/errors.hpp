#pragma once

#include <stdexcept>
#include <string>

namespace remest {

/// Invalid model/config input (bad row sums, non-odd grid, a == 0, ...).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// A size/budget guard refused the instance (node budget, enumeration count, ...).
class guard_error : public std::runtime_error {
public:
    explicit guard_error(const std::string& what) : std::runtime_error(what) {}
};

/// Conditioning on an event of (numerically) zero probability.
class degenerate_conditioning_error : public std::runtime_error {
public:
    explicit degenerate_conditioning_error(const std::string& what) : std::runtime_error(what) {}
};

/// Grid too small for the requested dynamics: pre-normalization mass drifted
/// beyond the declared tolerance.
class truncation_overflow_error : public std::runtime_error {
public:
    explicit truncation_overflow_error(const std::string& what) : std::runtime_error(what) {}
};

/// Threshold extraction found a sign pattern incompatible with a single
/// crossing; the solver refuses to report a threshold silently.
class structure_violation_error : public std::runtime_error {
public:
    explicit structure_violation_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace remest
