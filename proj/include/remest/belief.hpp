#pragma once

#include <cstdint>
#include <vector>

#include "remest/distortion.hpp"
#include "remest/grid.hpp"
#include "remest/models.hpp"
#include "remest/noise.hpp"

namespace remest {

/// Ternary reception outcome: blank0 = channel OFF, blank1 = ON but silent,
/// received = a payload got through. A deterministic function of (U_t, S_t).
enum class ReceptionFlag { blank0, blank1, received };

ReceptionFlag reception_flag(const ChannelSymbol& y);

/// Probability mass function over a finite alphabet.
struct FinitePMF {
    std::vector<double> probs;

    FinitePMF() = default;
    explicit FinitePMF(std::vector<double> p) : probs(std::move(p)) {}
    static FinitePMF dirac(std::size_t n, std::size_t x);

    std::size_t size() const { return probs.size(); }
    void validate() const;
    double mass() const;

    /// Key with components rounded to 12 decimal digits; used to merge
    /// numerically identical beliefs during reachable-set enumeration.
    std::vector<std::int64_t> rounded_key() const;
};

/// Transmit/no-transmit map over a finite alphabet or over grid cells.
/// decide[x] = 1 means transmit. B0/B1 partition the domain by construction.
struct Prescription {
    std::vector<std::uint8_t> decide;

    static Prescription from_bits(std::size_t n, unsigned bits); // x=0 is the high bit
    std::size_t size() const { return decide.size(); }
    double mass_no_transmit(const FinitePMF& pmf) const;
    double mass_transmit(const FinitePMF& pmf) const;
};

/// Threshold prescription around c: transmit iff |e - c| >= k. Ties at the
/// boundary transmit, matching the ">=" in the optimal transmitter.
struct ThresholdPrescription {
    double center = 0.0;
    double threshold = 0.0;

    bool transmits(double e) const;
    /// Cellwise materialization: decide evaluated at the grid points.
    Prescription materialize(const SymmetricGrid& grid) const;
};

/// Probability density tabulated at the points of a symmetric grid; each
/// value represents the density over its cell. Quadrature mass is
/// step * sum(values) and is kept at 1 (within 1e-9) by every filter.
struct GridDensity {
    SymmetricGrid grid;
    std::vector<double> values;

    GridDensity() = default;
    GridDensity(SymmetricGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {}

    /// Grid Dirac at 0: all mass 1/h in the center cell.
    static GridDensity dirac0(const SymmetricGrid& grid);
    /// Noise density sampled at the grid points, renormalized to mass 1.
    static GridDensity from_noise(const SymmetricGrid& grid, const NoiseSpec& noise);

    std::size_t size() const { return values.size(); }
    double mass() const;
    void renormalize();
};

// Finite-alphabet belief filters.

/// Pre-transmission update: pi1 = pi2 * P (row vector times matrix).
FinitePMF f1_finite(const FinitePMF& post, const FiniteMarkovSource& source);

/// Post-transmission update: payload x -> dirac at x; blank1 -> restriction
/// to the no-transmit set, renormalized; blank0 -> unchanged.
FinitePMF f2_finite(const FinitePMF& pre, const Prescription& phi, const ChannelSymbol& y);

// Error-process belief filters (AR(1) change of variables).

/// received = 0: density of a*E+ convolved with the noise density, evaluated
/// on the grid and renormalized; received = 1: the noise density itself.
GridDensity f1_error(const GridDensity& post, double a, const NoiseSpec& noise, int received);

GridDensity f2_error(const GridDensity& pre, const ThresholdPrescription& phi, ReceptionFlag h);
GridDensity f2_error(const GridDensity& pre, const Prescription& phi, ReceptionFlag h);

/// Cell values sorted descending and placed center-out (0, +h, -h, +2h, ...).
/// Same multiset of cell values; idempotent exactly.
GridDensity symmetric_decreasing_rearrangement(const GridDensity& f);

/// Concentration (majorization) order: true iff at every grid radius the
/// central mass of the rearrangement of xi dominates that of pi within tol.
/// Equivalently, partial sums of the sorted cell values of xi dominate.
bool majorizes(const GridDensity& xi, const GridDensity& pi, double tol = 1e-9);

/// Symmetric about `center` (a grid point) and nonincreasing away from it,
/// both within tol.
bool is_asu(const GridDensity& f, double center, double tol);

struct GridEstimate {
    double value = 0.0;
    double estimate = 0.0;
};

struct FiniteEstimate {
    double value = 0.0;
    std::size_t estimate = 0;
};

/// min over grid-point candidates of integral d(e - ehat) post(e) de, by
/// midpoint quadrature; ties resolved toward the candidate closest to 0.
GridEstimate expected_distortion(const GridDensity& post, const DistortionFn& d);

/// min over the alphabet of sum_x d(x, xhat) post(x); ties -> smallest index.
FiniteEstimate expected_distortion(const FinitePMF& post, const FiniteDistortion& d);

namespace belief_detail {
constexpr double kMassInvariantTol = 1e-9;
constexpr double kRenormGuardTol = 1e-6;
constexpr double kDegenerateMassTol = 1e-12;
} // namespace belief_detail

} // namespace remest
