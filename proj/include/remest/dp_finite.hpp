#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "remest/belief.hpp"
#include "remest/models.hpp"
#include "remest/simulator.hpp"

namespace remest {

enum class Stage { pre, post };

/// DP state (pi, s): the belief together with the conditioning channel bit
/// (S_{t-1} at pre stages, S_t at post stages).
struct BeliefNode {
    std::size_t id = 0;
    std::size_t t = 0;
    Stage stage = Stage::pre;
    int channel_bit = 0;
    FinitePMF pmf;
};

struct EnumerationGuards {
    std::size_t max_states = 4;
    std::size_t max_horizon = 5;
    std::size_t node_budget = 1000000;
};

/// All beliefs reachable from the initial pre-belief under every prescription
/// and every channel symbol, deduplicated by the 1e-12-rounded key. Edges are
/// labeled by (prescription, outcome); probability-zero branches are pruned.
/// A terminal pre layer at t = T+1 carries the zero boundary values.
struct ReachableGraph {
    struct PayloadEdge {
        std::size_t x = 0;
        double prob = 0.0; // Q_{s,1} * pi(x)
        std::size_t post = 0;
    };
    struct PrescriptionEdges {
        double blank0_prob = 0.0;            // Q_{s,0}
        std::ptrdiff_t blank0_post = -1;     // -1 when the branch has probability 0
        double blank1_prob = 0.0;            // Q_{s,1} * pi(B0)
        std::ptrdiff_t blank1_post = -1;
        std::vector<PayloadEdge> payloads;
    };

    std::vector<BeliefNode> nodes;
    std::vector<std::vector<PrescriptionEdges>> pre_edges; // [pre id][phi code]
    std::vector<std::ptrdiff_t> post_child;                // [post id] -> pre id at t+1
    std::vector<std::size_t> initial_pre;                  // t = 0 nodes, ascending channel bit

    std::size_t node_count() const { return nodes.size(); }
    std::optional<std::size_t> find(std::size_t t, Stage stage, int s,
                                    const std::vector<std::int64_t>& key) const;

private:
    friend ReachableGraph enumerate_reachable(const FiniteModels&, std::size_t,
                                              const EnumerationGuards&);
    std::map<std::tuple<std::size_t, int, int, std::vector<std::int64_t>>, std::size_t> index_;
};

ReachableGraph enumerate_reachable(const FiniteModels& models, std::size_t T,
                                   const EnumerationGuards& guards = {});

/// Values, prescriptions and estimates over the reachable graph.
class FiniteDPSolution {
public:
    const ReachableGraph& graph() const { return graph_; }
    const FiniteModels& models() const { return models_; }
    std::size_t horizon() const { return horizon_; }

    double value(std::size_t node_id) const { return values_[node_id]; }
    const std::vector<double>& values() const { return values_; }

    /// Optimal prescription code at a pre node (x = 0 is the high bit).
    unsigned policy_bits(std::size_t pre_id) const { return policy_[pre_id]; }
    Prescription policy(std::size_t pre_id) const;

    /// Optimal estimate at a post node.
    std::size_t estimate(std::size_t post_id) const { return estimates_[post_id]; }

    /// Optimal expected total cost: initial pre values weighted by the
    /// initial channel distribution.
    double initial_value() const;

private:
    friend FiniteDPSolution solve_finite(const FiniteModels&, std::size_t,
                                         const EnumerationGuards&);
    friend struct FiniteBackups;

    FiniteModels models_;
    std::size_t horizon_ = 0;
    ReachableGraph graph_;
    std::vector<double> values_;
    std::vector<unsigned> policy_;
    std::vector<std::size_t> estimates_;
};

/// One post-stage backup: min over xhat of the expected distortion plus the
/// successor pre value; ties resolve to the smallest index.
std::pair<double, std::size_t> backup_post(const ReachableGraph& graph, std::size_t post_id,
                                           const std::vector<double>& values,
                                           const FiniteDistortion& d);

/// One pre-stage backup over all 2^n prescriptions:
///   lambda pi(B1) + W0 pi(B0) + sum_{x in B1} W1(x) pi(x),
/// W0 = Q_{s0} V2(0, pi) + Q_{s1} V2(1, pi|phi), W1(x) = Q_{s0} V2(0, pi) +
/// Q_{s1} V2(1, dirac_x). Probability-zero branches contribute nothing; ties
/// resolve to the lexicographically smallest prescription.
std::pair<double, unsigned> backup_pre(const ReachableGraph& graph, std::size_t pre_id,
                                       const std::vector<double>& values, double lambda,
                                       const GilbertElliottChannel& channel);

FiniteDPSolution solve_finite(const FiniteModels& models, std::size_t T,
                              const EnumerationGuards& guards = {});

} // namespace remest
