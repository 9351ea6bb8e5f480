#include "remest/dp_finite.hpp"

#include <string>
#include <tuple>

namespace remest {

std::optional<std::size_t> ReachableGraph::find(std::size_t t, Stage stage, int s,
                                                const std::vector<std::int64_t>& key) const {
    auto it = index_.find({t, stage == Stage::pre ? 0 : 1, s, key});
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

namespace {

struct Builder {
    const FiniteModels& models;
    std::size_t budget;
    ReachableGraph g;

    std::size_t intern(std::size_t t, Stage stage, int s, const FinitePMF& pmf) {
        auto key = std::make_tuple(t, stage == Stage::pre ? 0 : 1, s, pmf.rounded_key());
        auto it = g.index_.find(key);
        if (it != g.index_.end()) return it->second;
        if (g.nodes.size() >= budget)
            throw guard_error("enumerate_reachable: node budget " + std::to_string(budget) +
                              " exceeded");
        std::size_t id = g.nodes.size();
        g.nodes.push_back(BeliefNode{id, t, stage, s, pmf});
        g.index_.emplace(std::move(key), id);
        return id;
    }
};

} // namespace

ReachableGraph enumerate_reachable(const FiniteModels& models, std::size_t T,
                                   const EnumerationGuards& guards) {
    models.source.validate();
    models.channel.validate();
    models.distortion.validate();
    const std::size_t n = models.source.n_states;
    if (models.distortion.size() != n)
        throw validation_error("distortion matrix size does not match the source alphabet");
    if (n > guards.max_states)
        throw guard_error("enumerate_reachable: n_states " + std::to_string(n) +
                          " exceeds the guard (" + std::to_string(guards.max_states) + ")");
    if (T > guards.max_horizon)
        throw guard_error("enumerate_reachable: horizon " + std::to_string(T) +
                          " exceeds the guard (" + std::to_string(guards.max_horizon) + ")");

    Builder b{models, guards.node_budget, {}};
    const auto n_phi = 1u << n;

    FinitePMF initial(models.source.initial);
    std::vector<std::size_t> frontier;
    for (int s = 0; s < 2; ++s) {
        if (models.channel.initial_state_dist[s] == 0.0) continue;
        std::size_t id = b.intern(0, Stage::pre, s, initial);
        b.g.initial_pre.push_back(id);
        frontier.push_back(id);
    }

    // Layer-by-layer expansion; nodes are created in BFS order, so ids are
    // deterministic given the instance.
    for (std::size_t t = 0; t <= T; ++t) {
        std::vector<std::size_t> post_layer;
        for (std::size_t pre_id : frontier) {
            const FinitePMF pre_pmf = b.g.nodes[pre_id].pmf; // copy: intern() may reallocate
            const int s_prev = b.g.nodes[pre_id].channel_bit;
            if (b.g.pre_edges.size() <= pre_id) b.g.pre_edges.resize(pre_id + 1);
            auto& edges = b.g.pre_edges[pre_id];
            edges.resize(n_phi);
            for (unsigned code = 0; code < n_phi; ++code) {
                Prescription phi = Prescription::from_bits(n, code);
                auto& e = edges[code];
                double q0 = models.channel.q[s_prev][0];
                double q1 = models.channel.q[s_prev][1];
                if (q0 > 0.0) {
                    // blank0: channel OFF, belief unchanged.
                    std::size_t id = b.intern(t, Stage::post, 0, pre_pmf);
                    e.blank0_prob = q0;
                    e.blank0_post = static_cast<std::ptrdiff_t>(id);
                    post_layer.push_back(id);
                }
                double m0 = phi.mass_no_transmit(pre_pmf);
                if (q1 > 0.0 && m0 > 0.0) {
                    FinitePMF restricted = f2_finite(pre_pmf, phi, ChannelSymbol::blank1());
                    std::size_t id = b.intern(t, Stage::post, 1, restricted);
                    e.blank1_prob = q1 * m0;
                    e.blank1_post = static_cast<std::ptrdiff_t>(id);
                    post_layer.push_back(id);
                }
                if (q1 > 0.0) {
                    for (std::size_t x = 0; x < n; ++x) {
                        if (!phi.decide[x] || pre_pmf.probs[x] == 0.0) continue;
                        std::size_t id = b.intern(t, Stage::post, 1, FinitePMF::dirac(n, x));
                        e.payloads.push_back({x, q1 * pre_pmf.probs[x], id});
                        post_layer.push_back(id);
                    }
                }
            }
        }
        // Post nodes advance by F1 to the next pre layer (t = T feeds the
        // zero-value terminal layer).
        std::vector<std::size_t> next_frontier;
        for (std::size_t post_id : post_layer) {
            if (b.g.post_child.size() <= post_id) b.g.post_child.resize(post_id + 1, -1);
            if (b.g.post_child[post_id] >= 0) continue;
            const FinitePMF post_pmf = b.g.nodes[post_id].pmf;
            const int s_cur = b.g.nodes[post_id].channel_bit;
            FinitePMF next = f1_finite(post_pmf, models.source);
            std::size_t id = b.intern(t + 1, Stage::pre, s_cur, next);
            b.g.post_child[post_id] = static_cast<std::ptrdiff_t>(id);
            next_frontier.push_back(id);
        }
        // Deduplicate while keeping first-seen (BFS) order.
        std::vector<std::size_t> uniq;
        for (std::size_t id : next_frontier) {
            bool seen = false;
            for (std::size_t u : uniq)
                if (u == id) { seen = true; break; }
            if (!seen) uniq.push_back(id);
        }
        frontier = std::move(uniq);
    }
    b.g.pre_edges.resize(b.g.nodes.size());
    b.g.post_child.resize(b.g.nodes.size(), -1);
    return b.g;
}

std::pair<double, std::size_t> backup_post(const ReachableGraph& graph, std::size_t post_id,
                                           const std::vector<double>& values,
                                           const FiniteDistortion& d) {
    const BeliefNode& node = graph.nodes[post_id];
    FiniteEstimate est = expected_distortion(node.pmf, d);
    std::ptrdiff_t child = graph.post_child[post_id];
    if (child < 0) throw validation_error("backup_post: successor pre value missing");
    return {est.value + values[static_cast<std::size_t>(child)], est.estimate};
}

std::pair<double, unsigned> backup_pre(const ReachableGraph& graph, std::size_t pre_id,
                                       const std::vector<double>& values, double lambda,
                                       const GilbertElliottChannel& channel) {
    const BeliefNode& node = graph.nodes[pre_id];
    const auto& edges = graph.pre_edges[pre_id];
    if (edges.empty()) throw validation_error("backup_pre: node has no prescription edges");
    const int s = node.channel_bit;
    const double q0 = channel.q[s][0];
    const double q1 = channel.q[s][1];
    const std::size_t n = node.pmf.size();

    double best = 0.0;
    unsigned best_code = 0;
    bool first = true;
    for (unsigned code = 0; code < edges.size(); ++code) {
        const auto& e = edges[code];
        Prescription phi = Prescription::from_bits(n, code);
        double m0 = phi.mass_no_transmit(node.pmf);
        double m1 = phi.mass_transmit(node.pmf);

        double v2_off = e.blank0_post >= 0 ? values[static_cast<std::size_t>(e.blank0_post)] : 0.0;
        double cost = lambda * m1;
        if (m0 > 0.0) {
            double w0 = q0 * v2_off;
            if (e.blank1_post >= 0) w0 += q1 * values[static_cast<std::size_t>(e.blank1_post)];
            cost += w0 * m0;
        }
        for (const auto& p : e.payloads) {
            double w1 = q0 * v2_off + q1 * values[p.post];
            cost += w1 * node.pmf.probs[p.x];
        }
        // Transmit branch under an OFF channel still lands on v2_off; when
        // q1 == 0 the payload edges are absent and the term reduces to
        // q0 * v2_off * pi(B1).
        if (q1 == 0.0) cost += q0 * v2_off * m1;

        if (first || cost < best) {
            best = cost;
            best_code = code;
            first = false;
        }
    }
    return {best, best_code};
}

Prescription FiniteDPSolution::policy(std::size_t pre_id) const {
    return Prescription::from_bits(models_.source.n_states, policy_[pre_id]);
}

double FiniteDPSolution::initial_value() const {
    double v = 0.0;
    for (std::size_t id : graph_.initial_pre)
        v += models_.channel.initial_state_dist[graph_.nodes[id].channel_bit] * values_[id];
    return v;
}

FiniteDPSolution solve_finite(const FiniteModels& models, std::size_t T,
                              const EnumerationGuards& guards) {
    FiniteDPSolution sol;
    sol.models_ = models;
    sol.horizon_ = T;
    sol.graph_ = enumerate_reachable(models, T, guards);
    const auto& g = sol.graph_;
    sol.values_.assign(g.nodes.size(), 0.0);
    sol.policy_.assign(g.nodes.size(), 0);
    sol.estimates_.assign(g.nodes.size(), 0);

    // Terminal pre layer (t = T+1) keeps value 0; then alternate post/pre
    // backups from t = T down to 0.
    for (std::size_t ti = 0; ti <= T; ++ti) {
        std::size_t t = T - ti;
        for (const auto& node : g.nodes) {
            if (node.t != t || node.stage != Stage::post) continue;
            auto [v, xhat] = backup_post(g, node.id, sol.values_, models.distortion);
            sol.values_[node.id] = v;
            sol.estimates_[node.id] = xhat;
        }
        for (const auto& node : g.nodes) {
            if (node.t != t || node.stage != Stage::pre) continue;
            auto [v, code] = backup_pre(g, node.id, sol.values_, models.lambda, models.channel);
            sol.values_[node.id] = v;
            sol.policy_[node.id] = code;
        }
    }
    return sol;
}

} // namespace remest
