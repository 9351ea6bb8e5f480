#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <vector>

#include "remest/distortion.hpp"
#include "remest/grid.hpp"
#include "remest/models.hpp"

namespace remest {

/// Discretization of the error line plus midpoint quadrature nodes for the
/// noise expectation (the quadrature backend; the default backend integrates
/// the noise CDF exactly and needs no nodes).
struct SolverGrid {
    SymmetricGrid grid;
    std::vector<double> w_nodes;
    std::vector<double> w_weights; // normalized, sum 1

    static SolverGrid make(double half_width, std::size_t n_points, const NoiseSpec& noise);
};

/// How E_W[J_{t+1}(a e + W, .)] is evaluated.
///
/// analytic_cdf: exact noise mass per grid cell against the cell-constant
/// value interpolant, reorganized as J(0) + sum_r dJ_r * M0(rho_r - h/2 | e).
/// M0 is exactly even and nondecreasing in |e| for every family, so evenness
/// and the even-increasing property of every layer hold to float roundoff.
/// quadrature: midpoint nodes over the truncated noise support with linear
/// interpolation of J_{t+1}; kept as an independent cross-check route.
enum class WExpectation { analytic_cdf, quadrature };

/// Tabulated value functions J_t(e, s) with both branch values retained.
/// s indexes the previous channel state S_{t-1}; layer T+1 is exactly zero.
/// Arguments beyond [-L, L] use clamped extrapolation.
struct ValueGrid {
    SymmetricGrid grid;
    std::size_t horizon = 0; // T

    // J[t][s][i], t in 0..T+1; J0/J1 for decision stages t in 0..T.
    std::vector<std::array<std::vector<double>, 2>> J;
    std::vector<std::array<std::vector<double>, 2>> J0;
    std::vector<std::array<std::vector<double>, 2>> J1;

    double value_at(std::size_t t, int s, double e) const {
        return grid.interpolate(J[t][s], e);
    }
    /// J_0(0, s) averaged over the initial channel distribution.
    double initial_value(const GilbertElliottChannel& channel) const;
};

inline constexpr double kThresholdInf = std::numeric_limits<double>::infinity();

/// k_t(s) for t = 0..T, s in {0,1}; s is the previous channel state S_{t-1}.
/// Transmit iff |e| >= k_t(s); +inf means never transmit within the grid.
struct ThresholdSchedule {
    std::vector<std::array<double, 2>> k;
    std::vector<std::array<bool, 2>> refined;
    std::vector<std::array<int, 2>> sign_changes;   // class changes of J0-J1 on e >= 0
    std::vector<std::array<bool, 2>> structure_ok;  // no-transmit set is a prefix

    std::size_t horizon() const { return k.empty() ? 0 : k.size() - 1; }
    bool transmits(std::size_t t, int s, double e) const;
    bool all_structure_ok() const;

    static ThresholdSchedule constant(std::size_t T, double value);
};

struct BackwardOptions {
    WExpectation backend = WExpectation::analytic_cdf;
    int threads = 1;
};

/// Backward induction for the single-agent error-process control problem:
///   J0_t(e,s) = d(e) + Q_{s0} E[J_{t+1}(ae+W,0)] + Q_{s1} E[J_{t+1}(ae+W,1)]
///   J1_t(e,s) = lambda + Q_{s0} d(e) + Q_{s0} E[J_{t+1}(ae+W,0)]
///                                    + Q_{s1} E[J_{t+1}(W,1)]
///   J_t = min(J0_t, J1_t),  J_{T+1} = 0.
ValueGrid backward_induction(const AR1Source& source, const GilbertElliottChannel& channel,
                             const DistortionFn& d, double lambda, std::size_t T,
                             const SolverGrid& grid, const BackwardOptions& opts = {});

/// Thresholds from the sign of J0 - J1 on e >= 0: k_t(s) is the smallest grid
/// point where transmitting is weakly optimal (J0 - J1 >= 0); +inf if none.
/// With refine = true, a sub-cell linear crossing is reported instead and
/// flagged. Non-prefix no-transmit sets are flagged, never silently accepted.
ThresholdSchedule extract_thresholds(const ValueGrid& vg, bool refine = false);

/// 1 - integral_{-y}^{y} mu(a e + w) dw via the closed-form noise CDF.
double m0(double y, double e, double a, const NoiseSpec& noise);

struct StructureReport {
    double max_evenness_violation = 0.0;   // |J(e)-J(-e)| over all layers
    double max_ei_violation = 0.0;         // decrease of J along e >= 0
    double max_min_identity_violation = 0.0;
    double max_terminal_violation = 0.0;
    double m0_max_violation = 0.0;         // decrease of m0 along e >= 0
    int max_sign_changes = 0;
    int prefix_violations = 0;
    std::vector<std::array<int, 2>> sign_changes;

    bool ok(double tol = 1e-9) const {
        return max_evenness_violation <= tol && max_ei_violation <= tol &&
               max_min_identity_violation <= tol && max_terminal_violation <= tol &&
               max_sign_changes <= 1 && prefix_violations == 0;
    }
};

/// Numerical certificate for the structural claims: evenness and the
/// even-increasing property of J, the min identity, m0 monotonicity, and the
/// single-crossing pattern of J0 - J1.
StructureReport check_structure(const ValueGrid& vg, const NoiseSpec& noise, double a);

/// Default grid half-width: 20 times the stationary error scale when the
/// source is stable, 20 noise scales otherwise.
double default_half_width(const AR1Source& source);

} // namespace remest
