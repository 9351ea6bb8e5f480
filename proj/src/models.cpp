#include "remest/models.hpp"

#include <cmath>
#include <string>

namespace remest {

namespace detail {

void validate_distribution(const std::vector<double>& p, const char* what) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw validation_error(std::string(what) + " has a negative or non-finite entry");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw validation_error(std::string(what) + " sums to " + std::to_string(sum) +
                               ", expected 1 within 1e-12");
}

void validate_stochastic_matrix(const std::vector<std::vector<double>>& m, const char* what) {
    for (std::size_t r = 0; r < m.size(); ++r) {
        if (m[r].size() != m.size())
            throw validation_error(std::string(what) + " is not square");
        double sum = 0.0;
        for (double v : m[r]) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw validation_error(std::string(what) + " row " + std::to_string(r) +
                                       " has a negative or non-finite entry");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw validation_error(std::string(what) + " row " + std::to_string(r) + " sums to " +
                                   std::to_string(sum) + ", expected 1 within 1e-12");
    }
}

std::size_t sample_index(const std::vector<double>& p, double draw) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        acc += p[i];
        if (draw < acc) return i;
    }
    return p.size() - 1;
}

} // namespace detail

void FiniteMarkovSource::validate() const {
    if (n_states == 0 || transition.size() != n_states || initial.size() != n_states)
        throw validation_error("finite source dimensions are inconsistent");
    detail::validate_stochastic_matrix(transition, "source transition matrix");
    detail::validate_distribution(initial, "source initial distribution");
}

std::size_t FiniteMarkovSource::step(std::size_t x, Rng& rng) const {
    return detail::sample_index(transition[x], rng.next_double());
}

std::size_t FiniteMarkovSource::sample_initial(Rng& rng) const {
    return detail::sample_index(initial, rng.next_double());
}

void AR1Source::validate() const {
    if (!std::isfinite(a)) throw validation_error("ar1 gain a must be finite");
    if (a == 0.0) throw validation_error("ar1 gain a must be nonzero");
    if (!(noise.scale > 0.0)) throw validation_error("noise scale must be positive");
}

void GilbertElliottChannel::validate() const {
    if (q.size() != 2 || initial_state_dist.size() != 2)
        throw validation_error("channel matrices must be 2x2 / length-2");
    detail::validate_stochastic_matrix(q, "channel matrix Q");
    detail::validate_distribution(initial_state_dist, "channel initial distribution");
}

std::vector<double> GilbertElliottChannel::stationary() const {
    // Two-state chain: pi = (q10, q01) / (q01 + q10); falls back to the
    // initial distribution when the chain is not irreducible.
    double q01 = q[0][1];
    double q10 = q[1][0];
    double denom = q01 + q10;
    if (denom <= 0.0) return initial_state_dist;
    return {q10 / denom, q01 / denom};
}

ChannelSymbol channel_output(const std::optional<double>& input, int state) {
    if (state == 0) return ChannelSymbol::blank0();
    if (input.has_value()) return ChannelSymbol::payload(*input);
    return ChannelSymbol::blank1();
}

int channel_step(const GilbertElliottChannel& channel, int s, double draw) {
    return draw < channel.q[s][1] ? 1 : 0;
}

double ar1_step(const AR1Source& source, double x, Rng& rng) {
    return source.a * x + source.noise.sample(rng);
}

double step_cost(double lambda, int u, const DistortionFn& d, double x, double xhat) {
    return lambda * u + d(x - xhat);
}

double step_cost(double lambda, int u, const FiniteDistortion& d, std::size_t x, std::size_t xhat) {
    return lambda * u + d(x, xhat);
}

} // namespace remest
