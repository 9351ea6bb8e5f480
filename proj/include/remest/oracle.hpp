#pragma once

#include <cstdint>
#include <vector>

#include "remest/dp_finite.hpp"
#include "remest/models.hpp"

namespace remest {
namespace oracle {

/// Tiny instance the brute-force machinery accepts: n <= 2 source states,
/// horizon T <= 2, and an enumerated-map count of at most 1e8.
struct TinyInstance {
    FiniteModels models;
    std::size_t horizon = 0;

    void validate() const;
};

/// Which information the transmitter maps may condition on.
///   full:       x_{0:t} and the channel-state history (past own inputs are
///               a deterministic function of these under a deterministic
///               strategy, so they index no extra reachable sets).
///   restricted: (x_t, channel-state/output history) only.
/// The receiver always conditions on (s_{-1:t}, y_{0:t}).
enum class Granularity { full, restricted };

/// Encoded-map strategy pair. Codes are produced by the encoders below and
/// the maps are total over the code spaces (unreachable codes are ignored).
struct StrategyProfile {
    Granularity granularity = Granularity::restricted;
    std::vector<std::vector<std::uint8_t>> transmitter; // [t][code] -> u
    std::vector<std::vector<std::uint8_t>> receiver;    // [t][code] -> xhat
};

// Code layout. obs steps pack (s_t, y_t) jointly: 0 = blank0 (s=0),
// 1 = blank1 (s=1, silent), 2+x = payload x (s=1).
std::size_t obs_step_code(std::size_t n, int s, int u, std::size_t x);
std::size_t obs_code_space(std::size_t n, std::size_t t); // (n+2)^t
std::size_t tx_code_restricted(std::size_t n, std::size_t x_t, int s_init, std::size_t obs_hist);
std::size_t tx_space_restricted(std::size_t n, std::size_t t);
std::size_t tx_code_full(std::size_t n, std::size_t t, std::size_t x_hist, int s_init,
                         std::size_t s_hist);
std::size_t tx_space_full(std::size_t n, std::size_t t);
std::size_t rx_code(std::size_t n, int s_init, std::size_t obs_hist_through_t);
std::size_t rx_space(std::size_t n, std::size_t t);

/// Exact expected total cost of an explicit profile: sums probability times
/// cost over every joint realization (x_{0:T}, s_{-1:T}); compensated
/// summation keeps 1e-9 comparisons honest.
double exact_cost(const TinyInstance& instance, const StrategyProfile& profile);

/// Profiles with constant transmit decisions, receiver by exact posterior
/// best response; handy baselines for tests.
StrategyProfile constant_transmit_profile(const TinyInstance& instance, int u,
                                          Granularity granularity = Granularity::restricted);

/// Exact posterior best-response receiver for the given transmitter maps.
void fill_best_response_receiver(const TinyInstance& instance, StrategyProfile& profile);

struct SearchResult {
    double min_cost = 0.0;
    StrategyProfile argmin;
    std::uint64_t enumerated_profiles = 0; // candidate maps for stages t < T
    std::vector<std::size_t> infoset_counts; // transmitter code-space size per t
};

/// Number of candidate transmitter maps the search enumerates (stages t < T;
/// the final stage is completed exactly per information set).
std::uint64_t profile_count(const TinyInstance& instance, Granularity granularity);

/// Global minimum of exact_cost over all profiles at the granularity.
/// Enumerates every transmitter map for stages t < T and completes stage T
/// exactly per realized information set (an exact one-stage decomposition);
/// the receiver is the exact posterior best response throughout. Ties go to
/// the first candidate in ascending code order.
SearchResult exhaustive_search(const TinyInstance& instance, Granularity granularity,
                               int threads = 1);

/// Exact expected cost of a solved finite DP policy by forward path-sum over
/// (belief node, source state) weights; independent of the DP backup code.
double evaluate_dp_policy(const FiniteDPSolution& solution, std::size_t T);

} // namespace oracle
} // namespace remest
