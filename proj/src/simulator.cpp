#include "remest/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "remest/dp_finite.hpp"

namespace remest {

namespace {

struct EpisodeCost {
    double transmission = 0.0; // lambda * (number of transmissions)
    double distortion = 0.0;
    double tx_count = 0.0;
    double total() const { return transmission + distortion; }
};

EpisodeCost episode_cost(const Ar1Models& models, const ThresholdSchedule& policy, std::size_t T,
                         Rng& rng, TrajectoryRecord* record) {
    const double a = models.source.a;
    const double lambda = models.lambda;
    EpisodeCost out;

    int s_prev = static_cast<int>(detail::sample_index(models.channel.initial_state_dist,
                                                       rng.next_double()));
    if (record) record->initial_channel_state = s_prev;

    double x = 0.0; // X_0 = 0
    double xhat_prev = 0.0;
    double z_prev = 0.0;
    for (std::size_t t = 0; t <= T; ++t) {
        double e = x - a * xhat_prev;
        int u = policy.transmits(t, s_prev, e) ? 1 : 0;

        int s = channel_step(models.channel, s_prev, rng.next_double());
        ChannelSymbol y = channel_output(u ? std::optional<double>(x) : std::nullopt, s);
        ReceptionFlag h = reception_flag(y);

        double z = y.is_payload() ? y.value : a * z_prev;
        double xhat = y.is_payload() ? y.value : a * xhat_prev;
        double dist = models.distortion(x - xhat);

        out.transmission += lambda * u;
        out.distortion += dist;
        out.tx_count += u;
        if (record)
            record->steps.push_back({x, s, u, y, h, z, xhat, lambda * u + dist});

        xhat_prev = xhat;
        z_prev = z;
        s_prev = s;
        x = ar1_step(models.source, x, rng); // W_t drawn every step, policy-independent order
    }
    return out;
}

void run_chunked(std::uint64_t n_reps, int threads, const std::function<void(std::uint64_t, std::uint64_t)>& body) {
    if (threads <= 1 || n_reps < 128) {
        body(0, n_reps);
        return;
    }
    std::vector<std::thread> pool;
    const auto n_threads = static_cast<std::uint64_t>(threads);
    const std::uint64_t chunk = (n_reps + n_threads - 1) / n_threads;
    for (std::uint64_t i = 0; i < n_threads; ++i) {
        std::uint64_t lo = i * chunk;
        std::uint64_t hi = std::min(n_reps, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(body, lo, hi);
    }
    for (auto& th : pool) th.join();
}

CostEstimate aggregate(const std::vector<EpisodeCost>& reps) {
    // Replication-order Welford pass; bit-identical at any thread count
    // because the per-rep values are stored first.
    CostEstimate est;
    est.n_reps = reps.size();
    double mean = 0.0, m2 = 0.0;
    double tx_mean = 0.0, tx_m2 = 0.0;
    KahanSum tx_cost, dist_cost;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        double v = reps[r].total();
        double delta = v - mean;
        mean += delta / static_cast<double>(r + 1);
        m2 += delta * (v - mean);

        double c = reps[r].tx_count;
        double tdelta = c - tx_mean;
        tx_mean += tdelta / static_cast<double>(r + 1);
        tx_m2 += tdelta * (c - tx_mean);

        tx_cost.add(reps[r].transmission);
        dist_cost.add(reps[r].distortion);
    }
    const auto n = static_cast<double>(reps.size());
    est.mean = mean;
    est.std_error = reps.size() > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
    est.transmission_mean = tx_cost.value() / n;
    est.distortion_mean = dist_cost.value() / n;
    est.tx_count_mean = tx_mean;
    est.tx_count_std_error = reps.size() > 1 ? std::sqrt(tx_m2 / (n - 1.0) / n) : 0.0;
    return est;
}

} // namespace

TrajectoryRecord run_episode(const Ar1Models& models, const ThresholdSchedule& policy,
                             std::size_t T, Rng& rng) {
    if (policy.horizon() < T)
        throw validation_error("run_episode: policy horizon is shorter than the episode");
    models.source.validate();
    models.channel.validate();
    TrajectoryRecord record;
    episode_cost(models, policy, T, rng, &record);
    return record;
}

CostEstimate monte_carlo_cost(const Ar1Models& models, const ThresholdSchedule& policy,
                              std::size_t T, std::uint64_t n_reps, std::uint64_t master_seed,
                              const SimulateOptions& opts) {
    if (n_reps < 2) throw validation_error("monte_carlo_cost: n_reps must be >= 2");
    if (policy.horizon() < T)
        throw validation_error("monte_carlo_cost: policy horizon is shorter than the episode");
    models.source.validate();
    models.channel.validate();

    std::vector<EpisodeCost> reps(n_reps);
    run_chunked(n_reps, opts.threads, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t r = lo; r < hi; ++r) {
            Rng rng = Rng::for_replication(master_seed, r);
            reps[r] = episode_cost(models, policy, T, rng, nullptr);
        }
    });
    return aggregate(reps);
}

double PerturbationReport::worst_improvement_sigma() const {
    double worst = 0.0;
    for (const auto& e : entries) {
        if (e.mean_difference >= 0.0) continue;
        if (e.paired_std_error == 0.0) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, -e.mean_difference / e.paired_std_error);
    }
    return worst;
}

namespace {

ThresholdSchedule perturb(const ThresholdSchedule& base, int t, int s, double delta) {
    ThresholdSchedule out = base;
    for (std::size_t tt = 0; tt < out.k.size(); ++tt) {
        for (int ss = 0; ss < 2; ++ss) {
            bool hit = (t < 0 && s < 0) || (static_cast<int>(tt) == t && ss == s);
            if (!hit) continue;
            double k = out.k[tt][ss];
            if (std::isinf(k)) continue; // the never-transmit sentinel stays put
            out.k[tt][ss] = std::max(0.0, k + delta);
        }
    }
    return out;
}

} // namespace

PerturbationReport perturbation_check(const Ar1Models& models, const ThresholdSchedule& policy,
                                      const std::vector<double>& deltas, std::size_t T,
                                      std::uint64_t n_reps, std::uint64_t master_seed,
                                      const SimulateOptions& opts) {
    PerturbationReport report;

    std::vector<double> base(n_reps);
    run_chunked(n_reps, opts.threads, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t r = lo; r < hi; ++r) {
            Rng rng = Rng::for_replication(master_seed, r);
            base[r] = episode_cost(models, policy, T, rng, nullptr).total();
        }
    });
    {
        KahanSum s;
        for (double v : base) s.add(v);
        report.base_mean = s.value() / static_cast<double>(n_reps);
    }

    std::vector<std::pair<int, int>> targets;
    for (std::size_t t = 0; t <= T; ++t)
        for (int s = 0; s < 2; ++s) targets.emplace_back(static_cast<int>(t), s);
    targets.emplace_back(-1, -1); // joint

    std::vector<double> pert(n_reps);
    for (auto [t, s] : targets) {
        for (double delta : deltas) {
            ThresholdSchedule shifted = perturb(policy, t, s, delta);
            run_chunked(n_reps, opts.threads, [&](std::uint64_t lo, std::uint64_t hi) {
                for (std::uint64_t r = lo; r < hi; ++r) {
                    // Common random numbers: the same substream drives the
                    // channel and noise under base and perturbed policies.
                    Rng rng = Rng::for_replication(master_seed, r);
                    pert[r] = episode_cost(models, shifted, T, rng, nullptr).total();
                }
            });
            double mean = 0.0, m2 = 0.0;
            for (std::uint64_t r = 0; r < n_reps; ++r) {
                double d = pert[r] - base[r];
                double dd = d - mean;
                mean += dd / static_cast<double>(r + 1);
                m2 += dd * (d - mean);
            }
            const auto n = static_cast<double>(n_reps);
            double se = n_reps > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
            report.entries.push_back({t, s, delta, mean, se});
        }
    }
    return report;
}

CostEstimate simulate_finite(const FiniteModels& models, const FiniteDPSolution& solution,
                             std::size_t T, std::uint64_t n_reps, std::uint64_t master_seed,
                             const SimulateOptions& opts) {
    if (n_reps < 2) throw validation_error("simulate_finite: n_reps must be >= 2");
    if (solution.horizon() < T)
        throw validation_error("simulate_finite: solution horizon is shorter than the episode");
    const auto& graph = solution.graph();

    std::vector<EpisodeCost> reps(n_reps);
    run_chunked(n_reps, opts.threads, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t r = lo; r < hi; ++r) {
            Rng rng = Rng::for_replication(master_seed, r);
            EpisodeCost cost;

            int s_prev = static_cast<int>(detail::sample_index(models.channel.initial_state_dist,
                                                               rng.next_double()));
            std::size_t x = models.source.sample_initial(rng);
            FinitePMF pre(models.source.initial);
            for (std::size_t t = 0; t <= T; ++t) {
                auto pre_id = graph.find(t, Stage::pre, s_prev, pre.rounded_key());
                if (!pre_id)
                    throw std::logic_error("simulate_finite: pre-belief key miss during replay");
                Prescription phi = solution.policy(*pre_id);
                int u = phi.decide[x];

                int s = channel_step(models.channel, s_prev, rng.next_double());
                ChannelSymbol y = channel_output(
                    u ? std::optional<double>(static_cast<double>(x)) : std::nullopt, s);
                FinitePMF post = f2_finite(pre, phi, y);
                auto post_id = graph.find(t, Stage::post, s, post.rounded_key());
                if (!post_id)
                    throw std::logic_error("simulate_finite: post-belief key miss during replay");
                std::size_t xhat = solution.estimate(*post_id);

                cost.transmission += models.lambda * u;
                cost.distortion += models.distortion(x, xhat);
                cost.tx_count += u;

                pre = f1_finite(post, models.source);
                s_prev = s;
                x = models.source.step(x, rng);
            }
            reps[r] = cost;
        }
    });
    return aggregate(reps);
}

} // namespace remest
