#pragma once

#include <cstdint>
#include <vector>

#include "remest/belief.hpp"
#include "remest/dp_threshold.hpp"
#include "remest/models.hpp"

namespace remest {

/// One closed-loop episode. z is the receiver reconstruction driver:
/// z_t = payload on reception, a * z_{t-1} otherwise, z_{-1} = 0; under the
/// Kalman-like estimator xhat_t == z_t along every path.
struct TrajectoryStep {
    double x = 0.0;
    int s = 0;
    int u = 0;
    ChannelSymbol y;
    ReceptionFlag h = ReceptionFlag::blank0;
    double z = 0.0;
    double xhat = 0.0;
    double cost = 0.0;
};

struct TrajectoryRecord {
    int initial_channel_state = 0; // S_{-1}
    std::vector<TrajectoryStep> steps;
};

struct CostEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_reps = 0;
    double transmission_mean = 0.0; // lambda * (expected transmissions per episode)
    double distortion_mean = 0.0;
    double tx_count_mean = 0.0;     // expected transmissions per episode
    double tx_count_std_error = 0.0;
};

struct Ar1Models {
    AR1Source source;
    GilbertElliottChannel channel;
    DistortionFn distortion;
    double lambda = 1.0;
};

/// One episode under the threshold transmitter (transmit iff
/// |x_t - a xhat_{t-1}| >= k_t(s_{t-1})) and the Kalman-like estimator.
/// Draw order per step is fixed (channel, then noise) so common random
/// numbers pair trajectories across policies.
TrajectoryRecord run_episode(const Ar1Models& models, const ThresholdSchedule& policy,
                             std::size_t T, Rng& rng);

struct SimulateOptions {
    int threads = 1;
};

/// Mean and standard error of the total episode cost over n_reps episodes.
/// Replication r uses the substream (master_seed, r); aggregation runs in
/// replication order, so the result is bit-identical at any thread count.
CostEstimate monte_carlo_cost(const Ar1Models& models, const ThresholdSchedule& policy,
                              std::size_t T, std::uint64_t n_reps, std::uint64_t master_seed,
                              const SimulateOptions& opts = {});

struct PerturbationEntry {
    int t = -1; // -1 = joint (all entries shifted together)
    int s = -1;
    double delta = 0.0;
    double mean_difference = 0.0; // perturbed - base
    double paired_std_error = 0.0;
};

struct PerturbationReport {
    double base_mean = 0.0;
    std::vector<PerturbationEntry> entries;
    /// Largest improvement in units of the paired standard error
    /// (positive = some perturbation looked better than the base policy).
    double worst_improvement_sigma() const;
};

/// Local-optimality probe: applies each delta per (t, s) and jointly, with
/// common random numbers across base and perturbed runs.
PerturbationReport perturbation_check(const Ar1Models& models, const ThresholdSchedule& policy,
                                      const std::vector<double>& deltas, std::size_t T,
                                      std::uint64_t n_reps, std::uint64_t master_seed,
                                      const SimulateOptions& opts = {});

struct FiniteModels {
    FiniteMarkovSource source;
    GilbertElliottChannel channel;
    FiniteDistortion distortion;
    double lambda = 1.0;
};

class FiniteDPSolution; // dp_finite.hpp

/// Closed-loop replay of a finite-alphabet DP solution, tracking the pre-
/// and post-transmission beliefs online and looking prescriptions/estimates
/// up by the deduplicated belief key. A key miss means the replay diverged
/// from the solved graph and throws.
CostEstimate simulate_finite(const FiniteModels& models, const FiniteDPSolution& solution,
                             std::size_t T, std::uint64_t n_reps, std::uint64_t master_seed,
                             const SimulateOptions& opts = {});

} // namespace remest
