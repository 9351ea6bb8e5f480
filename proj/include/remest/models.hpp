#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "remest/distortion.hpp"
#include "remest/noise.hpp"
#include "remest/rng.hpp"

namespace remest {

/// Finite-alphabet Markov source: row-stochastic transition matrix P and an
/// initial distribution. Immutable after construction.
struct FiniteMarkovSource {
    std::size_t n_states = 0;
    std::vector<std::vector<double>> transition; // P[x][y]
    std::vector<double> initial;

    void validate() const;

    /// Draw the next state from row P[x].
    std::size_t step(std::size_t x, Rng& rng) const;
    std::size_t sample_initial(Rng& rng) const;
};

/// First-order autoregressive source X_{t+1} = a X_t + W_t with X_0 = 0.
/// a = 0 is rejected: the closed-loop estimator recursion degenerates to
/// xhat = 0 and the threshold solver's error process loses meaning.
struct AR1Source {
    double a = 1.0;
    NoiseSpec noise;

    void validate() const;
};

/// Two-state Markov packet-drop channel. State 0 = OFF (drops), 1 = ON.
/// q[r][s] = P(S_t = s | S_{t-1} = r). initial_state_dist is the law of the
/// pre-horizon state S_{-1} that the transmitter sees at t = 0.
struct GilbertElliottChannel {
    std::vector<std::vector<double>> q{{0.5, 0.5}, {0.5, 0.5}};
    std::vector<double> initial_state_dist{0.5, 0.5};

    void validate() const;
    std::vector<double> stationary() const;
};

/// Channel output alphabet: a real payload, blank0 (channel OFF), or blank1
/// (channel ON, nothing sent).
struct ChannelSymbol {
    enum class Tag { payload, blank0, blank1 };
    Tag tag = Tag::blank0;
    double value = 0.0;

    static ChannelSymbol payload(double v) { return {Tag::payload, v}; }
    static ChannelSymbol blank0() { return {Tag::blank0, 0.0}; }
    static ChannelSymbol blank1() { return {Tag::blank1, 0.0}; }

    bool is_payload() const { return tag == Tag::payload; }
};

/// Deterministic channel map: payload iff there is an input and the state is
/// ON; blank1 iff no input and ON; blank0 iff OFF.
ChannelSymbol channel_output(const std::optional<double>& input, int state);

/// One channel transition: returns 1 with probability q[s][1].
int channel_step(const GilbertElliottChannel& channel, int s, double draw);

/// X_{t+1} = a x + w with w drawn from the noise law.
double ar1_step(const AR1Source& source, double x, Rng& rng);

/// Per-step cost lambda * u + d(x - xhat).
double step_cost(double lambda, int u, const DistortionFn& d, double x, double xhat);

/// Finite-alphabet per-step cost lambda * u + d[x][xhat].
double step_cost(double lambda, int u, const FiniteDistortion& d, std::size_t x, std::size_t xhat);

namespace detail {
void validate_distribution(const std::vector<double>& p, const char* what);
void validate_stochastic_matrix(const std::vector<std::vector<double>>& m, const char* what);
std::size_t sample_index(const std::vector<double>& p, double draw);
} // namespace detail

} // namespace remest
