#include "remest/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <thread>

#include "remest/rng.hpp"

namespace remest {
namespace oracle {

namespace {
constexpr std::uint64_t kProfileBudget = 100000000ull;
}

void TinyInstance::validate() const {
    models.source.validate();
    models.channel.validate();
    models.distortion.validate();
    if (models.source.n_states > 2)
        throw guard_error("oracle: n_states > 2 is outside the tiny-instance guard");
    if (horizon > 2) throw guard_error("oracle: horizon > 2 is outside the tiny-instance guard");
    if (models.distortion.size() != models.source.n_states)
        throw validation_error("oracle: distortion matrix does not match the alphabet");
}

std::size_t obs_step_code(std::size_t n, int s, int u, std::size_t x) {
    if (s == 0) return 0;
    if (!u) return 1;
    return 2 + x;
}

std::size_t obs_code_space(std::size_t n, std::size_t t) {
    std::size_t space = 1;
    for (std::size_t i = 0; i < t; ++i) space *= n + 2;
    return space;
}

std::size_t tx_code_restricted(std::size_t n, std::size_t x_t, int s_init, std::size_t obs_hist) {
    return x_t + n * (static_cast<std::size_t>(s_init) + 2 * obs_hist);
}

std::size_t tx_space_restricted(std::size_t n, std::size_t t) {
    return n * 2 * obs_code_space(n, t);
}

std::size_t tx_code_full(std::size_t n, std::size_t t, std::size_t x_hist, int s_init,
                         std::size_t s_hist) {
    std::size_t xs = 1;
    for (std::size_t i = 0; i <= t; ++i) xs *= n;
    return x_hist + xs * (static_cast<std::size_t>(s_init) + 2 * s_hist);
}

std::size_t tx_space_full(std::size_t n, std::size_t t) {
    std::size_t xs = 1;
    for (std::size_t i = 0; i <= t; ++i) xs *= n;
    return xs * (2u << t);
}

std::size_t rx_code(std::size_t n, int s_init, std::size_t obs_hist_through_t) {
    return static_cast<std::size_t>(s_init) + 2 * obs_hist_through_t;
}

std::size_t rx_space(std::size_t n, std::size_t t) {
    return 2 * obs_code_space(n, t + 1);
}

namespace {

struct Path {
    int s_init = 0;
    std::array<std::uint8_t, 3> s{};
    std::array<std::uint8_t, 3> x{};
    double prob = 0.0;
};

std::vector<Path> enumerate_paths(const TinyInstance& inst) {
    const auto& m = inst.models;
    const std::size_t n = m.source.n_states;
    const std::size_t T = inst.horizon;
    std::vector<Path> out;

    std::vector<std::size_t> svec(T + 1), xvec(T + 1);
    for (int s_init = 0; s_init < 2; ++s_init) {
        double p0 = m.channel.initial_state_dist[s_init];
        if (p0 == 0.0) continue;
        std::size_t s_count = 1;
        for (std::size_t t = 0; t <= T; ++t) s_count *= 2;
        std::size_t x_count = 1;
        for (std::size_t t = 0; t <= T; ++t) x_count *= n;
        for (std::size_t sc = 0; sc < s_count; ++sc) {
            std::size_t tmp = sc;
            double ps = p0;
            int prev = s_init;
            for (std::size_t t = 0; t <= T; ++t) {
                svec[t] = tmp % 2;
                tmp /= 2;
                ps *= m.channel.q[prev][svec[t]];
                prev = static_cast<int>(svec[t]);
            }
            if (ps == 0.0) continue;
            for (std::size_t xc = 0; xc < x_count; ++xc) {
                std::size_t xtmp = xc;
                double p = ps;
                for (std::size_t t = 0; t <= T; ++t) {
                    xvec[t] = xtmp % n;
                    xtmp /= n;
                    p *= t == 0 ? m.source.initial[xvec[0]]
                                : m.source.transition[xvec[t - 1]][xvec[t]];
                }
                if (p == 0.0) continue;
                Path path;
                path.s_init = s_init;
                path.prob = p;
                for (std::size_t t = 0; t <= T; ++t) {
                    path.s[t] = static_cast<std::uint8_t>(svec[t]);
                    path.x[t] = static_cast<std::uint8_t>(xvec[t]);
                }
                out.push_back(path);
            }
        }
    }
    return out;
}

std::size_t tx_code_for(const TinyInstance& inst, Granularity g, std::size_t t, const Path& p,
                        std::size_t obs_hist, std::size_t x_hist, std::size_t s_hist) {
    const std::size_t n = inst.models.source.n_states;
    if (g == Granularity::restricted)
        return tx_code_restricted(n, p.x[t], p.s_init, obs_hist);
    return tx_code_full(n, t, x_hist, p.s_init, s_hist);
}

} // namespace

double exact_cost(const TinyInstance& inst, const StrategyProfile& profile) {
    inst.validate();
    const auto& m = inst.models;
    const std::size_t n = m.source.n_states;
    const std::size_t T = inst.horizon;
    if (profile.transmitter.size() != T + 1 || profile.receiver.size() != T + 1)
        throw validation_error("exact_cost: profile horizon mismatch");

    KahanSum cost;
    for (const Path& p : enumerate_paths(inst)) {
        std::size_t obs_hist = 0, obs_mult = 1;
        std::size_t x_hist = 0, x_mult = 1;
        std::size_t s_hist = 0, s_mult = 1;
        for (std::size_t t = 0; t <= T; ++t) {
            x_hist += p.x[t] * x_mult;
            x_mult *= n;
            std::size_t code = tx_code_for(inst, profile.granularity, t, p, obs_hist, x_hist, s_hist);
            int u = profile.transmitter[t].at(code);
            std::size_t oc = obs_step_code(n, p.s[t], u, p.x[t]);
            obs_hist += oc * obs_mult;
            obs_mult *= n + 2;
            std::size_t rc = rx_code(n, p.s_init, obs_hist);
            std::size_t xhat = profile.receiver[t].at(rc);
            cost.add(p.prob * (m.lambda * u + m.distortion(p.x[t], xhat)));
            s_hist += static_cast<std::size_t>(p.s[t]) * s_mult;
            s_mult *= 2;
        }
    }
    return cost.value();
}

void fill_best_response_receiver(const TinyInstance& inst, StrategyProfile& profile) {
    const auto& m = inst.models;
    const std::size_t n = m.source.n_states;
    const std::size_t T = inst.horizon;
    profile.receiver.assign(T + 1, {});
    std::vector<std::vector<double>> mass(T + 1);
    for (std::size_t t = 0; t <= T; ++t) {
        profile.receiver[t].assign(rx_space(n, t), 0);
        mass[t].assign(rx_space(n, t) * n, 0.0);
    }
    for (const Path& p : enumerate_paths(inst)) {
        std::size_t obs_hist = 0, obs_mult = 1;
        std::size_t x_hist = 0, x_mult = 1;
        std::size_t s_hist = 0, s_mult = 1;
        for (std::size_t t = 0; t <= T; ++t) {
            x_hist += p.x[t] * x_mult;
            x_mult *= n;
            std::size_t code = tx_code_for(inst, profile.granularity, t, p, obs_hist, x_hist, s_hist);
            int u = profile.transmitter[t].at(code);
            obs_hist += obs_step_code(n, p.s[t], u, p.x[t]) * obs_mult;
            obs_mult *= n + 2;
            mass[t][rx_code(n, p.s_init, obs_hist) * n + p.x[t]] += p.prob;
            s_hist += static_cast<std::size_t>(p.s[t]) * s_mult;
            s_mult *= 2;
        }
    }
    for (std::size_t t = 0; t <= T; ++t) {
        for (std::size_t rc = 0; rc < rx_space(n, t); ++rc) {
            double best = 0.0;
            std::size_t best_x = 0;
            for (std::size_t xhat = 0; xhat < n; ++xhat) {
                double v = 0.0;
                for (std::size_t x = 0; x < n; ++x)
                    v += m.distortion(x, xhat) * mass[t][rc * n + x];
                if (xhat == 0 || v < best) {
                    best = v;
                    best_x = xhat;
                }
            }
            profile.receiver[t][rc] = static_cast<std::uint8_t>(best_x);
        }
    }
}

StrategyProfile constant_transmit_profile(const TinyInstance& inst, int u, Granularity g) {
    const std::size_t n = inst.models.source.n_states;
    const std::size_t T = inst.horizon;
    StrategyProfile out;
    out.granularity = g;
    out.transmitter.assign(T + 1, {});
    for (std::size_t t = 0; t <= T; ++t) {
        std::size_t space =
            g == Granularity::restricted ? tx_space_restricted(n, t) : tx_space_full(n, t);
        out.transmitter[t].assign(space, static_cast<std::uint8_t>(u));
    }
    fill_best_response_receiver(inst, out);
    return out;
}

std::uint64_t profile_count(const TinyInstance& inst, Granularity g) {
    inst.validate();
    const std::size_t n = inst.models.source.n_states;
    const std::size_t T = inst.horizon;
    std::size_t bits = 0;
    for (std::size_t t = 0; t < T; ++t)
        bits += g == Granularity::restricted ? tx_space_restricted(n, t) : tx_space_full(n, t);
    if (bits > 62) throw guard_error("oracle: enumeration width exceeds 62 bits");
    std::uint64_t count = 1ull << bits;
    if (count > kProfileBudget)
        throw guard_error("oracle: profile count " + std::to_string(count) +
                          " exceeds the 1e8 budget");
    return count;
}

namespace {

// Per-candidate scratch, reset by epoch stamps instead of clears.
struct Scratch {
    // Receiver masses for stages t < T, flat over [rx_offset[t] + code*n + x].
    std::vector<double> rx_mass;
    std::vector<std::uint32_t> rx_stamp;
    std::vector<std::size_t> rx_touched; // stamped (t-offset + code) slots
    std::vector<std::size_t> rx_offset;

    struct Entry {
        std::uint32_t local = 0;
        std::uint8_t x = 0;
        std::uint8_t sT = 0;
        double prob = 0.0;
    };
    std::vector<std::vector<Entry>> groups;
    std::vector<std::uint32_t> group_stamp;
    std::vector<std::size_t> touched_groups;

    std::uint32_t epoch = 0;

    void init(const TinyInstance& inst) {
        const std::size_t n = inst.models.source.n_states;
        const std::size_t T = inst.horizon;
        rx_offset.assign(T + 1, 0);
        std::size_t total = 0;
        for (std::size_t t = 0; t < T; ++t) {
            rx_offset[t] = total;
            total += rx_space(n, t);
        }
        rx_mass.assign(total * n, 0.0);
        rx_stamp.assign(total, 0);
        std::size_t g_space = 2 * obs_code_space(n, T);
        groups.assign(g_space, {});
        group_stamp.assign(g_space, 0);
        epoch = 0;
    }
};

struct Evaluator {
    const TinyInstance& inst;
    Granularity gran;
    std::vector<Path> paths;
    std::vector<std::size_t> bit_offset; // per stage t < T
    std::size_t n;
    std::size_t T;

    Evaluator(const TinyInstance& instance, Granularity g)
        : inst(instance), gran(g), paths(enumerate_paths(instance)),
          n(instance.models.source.n_states), T(instance.horizon) {
        bit_offset.assign(T + 1, 0);
        std::size_t acc = 0;
        for (std::size_t t = 0; t < T; ++t) {
            bit_offset[t] = acc;
            acc += gran == Granularity::restricted ? tx_space_restricted(n, t)
                                                   : tx_space_full(n, t);
        }
    }

    // Expected total cost of the candidate prefix with the exact stage-T
    // completion and posterior best-response receiver. If `record` is given,
    // the completed stage-T decisions are written into it.
    double evaluate(std::uint64_t candidate, Scratch& sc,
                    std::vector<std::uint8_t>* record_last_stage = nullptr) const {
        const auto& m = inst.models;
        ++sc.epoch;
        sc.rx_touched.clear();
        sc.touched_groups.clear();

        KahanSum cost;
        for (const Path& p : paths) {
            std::size_t obs_hist = 0, obs_mult = 1;
            std::size_t x_hist = 0, x_mult = 1;
            std::size_t s_hist = 0, s_mult = 1;
            for (std::size_t t = 0; t < T; ++t) {
                x_hist += p.x[t] * x_mult;
                x_mult *= n;
                std::size_t code = tx_code_for(inst, gran, t, p, obs_hist, x_hist, s_hist);
                int u = static_cast<int>((candidate >> (bit_offset[t] + code)) & 1ull);
                cost.add(p.prob * m.lambda * u);
                obs_hist += obs_step_code(n, p.s[t], u, p.x[t]) * obs_mult;
                obs_mult *= n + 2;

                std::size_t slot = sc.rx_offset[t] + rx_code(n, p.s_init, obs_hist);
                if (sc.rx_stamp[slot] != sc.epoch) {
                    sc.rx_stamp[slot] = sc.epoch;
                    for (std::size_t x = 0; x < n; ++x) sc.rx_mass[slot * n + x] = 0.0;
                    sc.rx_touched.push_back(slot);
                }
                sc.rx_mass[slot * n + p.x[t]] += p.prob;

                s_hist += static_cast<std::size_t>(p.s[t]) * s_mult;
                s_mult *= 2;
            }
            // Stage T: bucket by the common history (s_init, observations).
            x_hist += p.x[T] * x_mult;
            std::size_t g = rx_code(n, p.s_init, obs_hist); // obs through T-1
            if (sc.group_stamp[g] != sc.epoch) {
                sc.group_stamp[g] = sc.epoch;
                sc.groups[g].clear();
                sc.touched_groups.push_back(g);
            }
            std::uint32_t local = gran == Granularity::restricted
                                      ? static_cast<std::uint32_t>(p.x[T])
                                      : static_cast<std::uint32_t>(x_hist);
            sc.groups[g].push_back({local, p.x[T], p.s[T], p.prob});
        }

        // Posterior best-response receiver for stages t < T.
        for (std::size_t slot : sc.rx_touched) {
            double best = 0.0;
            for (std::size_t xhat = 0; xhat < n; ++xhat) {
                double v = 0.0;
                for (std::size_t x = 0; x < n; ++x)
                    v += m.distortion(x, xhat) * sc.rx_mass[slot * n + x];
                if (xhat == 0 || v < best) best = v;
            }
            cost.add(best);
        }

        // Exact completion of the final stage, one information set at a time.
        for (std::size_t g : sc.touched_groups) {
            const auto& entries = sc.groups[g];
            std::uint32_t locals[8];
            std::size_t n_locals = 0;
            for (const auto& e : entries) {
                bool seen = false;
                for (std::size_t i = 0; i < n_locals; ++i)
                    if (locals[i] == e.local) { seen = true; break; }
                if (!seen) locals[n_locals++] = e.local;
            }
            std::sort(locals, locals + n_locals);

            double best = 0.0;
            std::uint32_t best_map = 0;
            const std::uint32_t n_maps = 1u << n_locals;
            for (std::uint32_t map = 0; map < n_maps; ++map) {
                double v = 0.0;
                double ymass[4][2] = {};
                for (const auto& e : entries) {
                    std::size_t li = 0;
                    while (locals[li] != e.local) ++li;
                    int u = static_cast<int>((map >> li) & 1u);
                    v += m.lambda * u * e.prob;
                    ymass[obs_step_code(n, e.sT, u, e.x)][e.x] += e.prob;
                }
                for (std::size_t yc = 0; yc < n + 2; ++yc) {
                    double mass_total = 0.0;
                    for (std::size_t x = 0; x < n; ++x) mass_total += ymass[yc][x];
                    if (mass_total == 0.0) continue;
                    double dbest = 0.0;
                    for (std::size_t xhat = 0; xhat < n; ++xhat) {
                        double dv = 0.0;
                        for (std::size_t x = 0; x < n; ++x)
                            dv += m.distortion(x, xhat) * ymass[yc][x];
                        if (xhat == 0 || dv < dbest) dbest = dv;
                    }
                    v += dbest;
                }
                for (std::size_t yc = 0; yc < n + 2; ++yc)
                    for (std::size_t x = 0; x < n; ++x) ymass[yc][x] = 0.0;
                if (map == 0 || v < best) {
                    best = v;
                    best_map = map;
                }
            }
            cost.add(best);

            if (record_last_stage) {
                int s_init = static_cast<int>(g % 2);
                std::size_t obs_hist = g / 2;
                // The observation history pins down s_{0:T-1}: digit 0 means
                // the channel was OFF, anything else means ON.
                std::size_t s_hist = 0;
                std::size_t digits = obs_hist;
                for (std::size_t t = 0; t < T; ++t) {
                    if (digits % (n + 2) != 0) s_hist += (1u << t);
                    digits /= n + 2;
                }
                for (const auto& e : entries) {
                    std::size_t li = 0;
                    while (locals[li] != e.local) ++li;
                    int u = static_cast<int>((best_map >> li) & 1u);
                    std::size_t code = gran == Granularity::restricted
                                           ? tx_code_restricted(n, e.x, s_init, obs_hist)
                                           : tx_code_full(n, T, e.local, s_init, s_hist);
                    (*record_last_stage)[code] = static_cast<std::uint8_t>(u);
                }
            }
        }
        return cost.value();
    }
};

} // namespace

SearchResult exhaustive_search(const TinyInstance& inst, Granularity gran, int threads) {
    inst.validate();
    const std::uint64_t count = profile_count(inst, gran);
    const std::size_t n = inst.models.source.n_states;
    const std::size_t T = inst.horizon;

    Evaluator ev(inst, gran);

    struct Best {
        double cost = 0.0;
        std::uint64_t candidate = 0;
        bool valid = false;
    };
    auto scan = [&](std::uint64_t lo, std::uint64_t hi) {
        Scratch sc;
        sc.init(inst);
        Best best;
        for (std::uint64_t cand = lo; cand < hi; ++cand) {
            double v = ev.evaluate(cand, sc);
            if (!best.valid || v < best.cost) best = {v, cand, true};
        }
        return best;
    };

    Best best;
    if (threads <= 1 || count < 1024) {
        best = scan(0, count);
    } else {
        const auto n_threads = static_cast<std::uint64_t>(threads);
        std::vector<Best> partial(n_threads);
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (count + n_threads - 1) / n_threads;
        for (std::uint64_t i = 0; i < n_threads; ++i) {
            std::uint64_t lo = i * chunk;
            std::uint64_t hi = std::min(count, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, i, lo, hi] { partial[i] = scan(lo, hi); });
        }
        for (auto& th : pool) th.join();
        for (const auto& b : partial) {
            if (!b.valid) continue;
            if (!best.valid || b.cost < best.cost ||
                (b.cost == best.cost && b.candidate < best.candidate))
                best = b;
        }
    }

    SearchResult result;
    result.min_cost = best.cost;
    result.enumerated_profiles = count;
    for (std::size_t t = 0; t <= T; ++t)
        result.infoset_counts.push_back(gran == Granularity::restricted
                                            ? tx_space_restricted(n, t)
                                            : tx_space_full(n, t));

    // Materialize the argmin as an explicit profile.
    StrategyProfile prof;
    prof.granularity = gran;
    prof.transmitter.assign(T + 1, {});
    for (std::size_t t = 0; t <= T; ++t)
        prof.transmitter[t].assign(result.infoset_counts[t], 0);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t code = 0; code < result.infoset_counts[t]; ++code)
            prof.transmitter[t][code] =
                static_cast<std::uint8_t>((best.candidate >> (ev.bit_offset[t] + code)) & 1ull);
    {
        Scratch sc;
        sc.init(inst);
        ev.evaluate(best.candidate, sc, &prof.transmitter[T]);
    }
    fill_best_response_receiver(inst, prof);
    result.argmin = std::move(prof);
    return result;
}

double evaluate_dp_policy(const FiniteDPSolution& solution, std::size_t T) {
    const auto& graph = solution.graph();
    const auto& m = solution.models();
    const std::size_t n = m.source.n_states;
    if (solution.horizon() < T)
        throw validation_error("evaluate_dp_policy: horizon mismatch");

    std::map<std::pair<std::size_t, std::size_t>, double> weights; // (pre id, x) -> prob
    for (std::size_t id : graph.initial_pre) {
        double pc = m.channel.initial_state_dist[graph.nodes[id].channel_bit];
        for (std::size_t x = 0; x < n; ++x)
            if (m.source.initial[x] > 0.0) weights[{id, x}] += pc * m.source.initial[x];
    }

    KahanSum cost;
    for (std::size_t t = 0; t <= T; ++t) {
        std::map<std::pair<std::size_t, std::size_t>, double> next;
        for (const auto& [key, w] : weights) {
            auto [pre_id, x] = key;
            unsigned code = solution.policy_bits(pre_id);
            Prescription phi = Prescription::from_bits(n, code);
            int u = phi.decide[x];
            const auto& e = graph.pre_edges[pre_id][code];
            int s_prev = graph.nodes[pre_id].channel_bit;
            for (int s = 0; s < 2; ++s) {
                double q = m.channel.q[s_prev][s];
                if (q == 0.0) continue;
                std::ptrdiff_t post = -1;
                if (s == 0) {
                    post = e.blank0_post;
                } else if (u) {
                    for (const auto& pe : e.payloads)
                        if (pe.x == x) post = static_cast<std::ptrdiff_t>(pe.post);
                } else {
                    post = e.blank1_post;
                }
                if (post < 0)
                    throw std::logic_error("evaluate_dp_policy: missing edge for a reachable branch");
                auto post_id = static_cast<std::size_t>(post);
                std::size_t xhat = solution.estimate(post_id);
                cost.add(w * q * (m.lambda * u + m.distortion(x, xhat)));
                if (t < T) {
                    auto child = static_cast<std::size_t>(graph.post_child[post_id]);
                    for (std::size_t xn = 0; xn < n; ++xn) {
                        double p = m.source.transition[x][xn];
                        if (p > 0.0) next[{child, xn}] += w * q * p;
                    }
                }
            }
        }
        weights = std::move(next);
    }
    return cost.value();
}

} // namespace oracle
} // namespace remest
