#include "remest/dp_threshold.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "remest/rng.hpp"

namespace remest {

SolverGrid SolverGrid::make(double half_width, std::size_t n_points, const NoiseSpec& noise) {
    SolverGrid out;
    out.grid = SymmetricGrid(half_width, n_points);
    const double h = out.grid.step();
    const double radius = noise.truncation_radius();
    const auto m = static_cast<std::size_t>(std::ceil(2.0 * radius / h));
    const double dw = 2.0 * radius / static_cast<double>(m);
    out.w_nodes.resize(m);
    out.w_weights.resize(m);
    KahanSum total;
    for (std::size_t j = 0; j < m; ++j) {
        out.w_nodes[j] = -radius + (static_cast<double>(j) + 0.5) * dw;
        out.w_weights[j] = noise.pdf(out.w_nodes[j]) * dw;
        total.add(out.w_weights[j]);
    }
    for (double& w : out.w_weights) w /= total.value();
    return out;
}

double ValueGrid::initial_value(const GilbertElliottChannel& channel) const {
    const std::size_t c = grid.center();
    return channel.initial_state_dist[0] * J[0][0][c] + channel.initial_state_dist[1] * J[0][1][c];
}

bool ThresholdSchedule::transmits(std::size_t t, int s, double e) const {
    return std::fabs(e) >= k[t][s];
}

bool ThresholdSchedule::all_structure_ok() const {
    for (const auto& row : structure_ok)
        if (!row[0] || !row[1]) return false;
    return true;
}

ThresholdSchedule ThresholdSchedule::constant(std::size_t T, double value) {
    ThresholdSchedule out;
    out.k.assign(T + 1, {value, value});
    out.refined.assign(T + 1, {false, false});
    out.sign_changes.assign(T + 1, {0, 0});
    out.structure_ok.assign(T + 1, {true, true});
    return out;
}

double m0(double y, double e, double a, const NoiseSpec& noise) {
    if (y < 0.0) throw validation_error("m0: y must be nonnegative");
    // 1 - integral_{-y-ae}^{y-ae} mu(x) dx, clamped into [0,1] against roundoff.
    double v = 1.0 - (noise.cdf(y - a * e) - noise.cdf(-y - a * e));
    return std::min(1.0, std::max(0.0, v));
}

namespace {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& body);

// Radial tail-mass table for the analytic backend:
//   tail[i * K + (r-1)] = M0(rho_r - h/2 | rho_i),  r = 1..K, i = 0..K.
// Row i is contiguous over r so the per-cell accumulation streams memory.
std::vector<double> radial_tail_table(const SymmetricGrid& grid, double a, const NoiseSpec& noise,
                                      int threads) {
    const std::size_t K = grid.radii();
    const double h = grid.step();
    std::vector<double> tail(K * (K + 1));
    parallel_for(K + 1, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double rho = static_cast<double>(i) * h;
            double* row = tail.data() + i * K;
            for (std::size_t r = 1; r <= K; ++r)
                row[r - 1] = m0((static_cast<double>(r) - 0.5) * h, rho, a, noise);
        }
    });
    return tail;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& body) {
    if (threads <= 1 || count < 64) {
        body(0, count);
        return;
    }
    const auto n_threads = static_cast<std::size_t>(threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(body, lo, hi);
    }
    for (auto& th : pool) th.join();
}

// E_W[phi(ae + W)] for the radial table m (phi even, clamped beyond L):
//   m[0] + sum_r (m[r] - m[r-1]) * tail_r(|e|).
void radial_expectation_analytic(const std::vector<double>& m, const std::vector<double>& tail,
                                 std::size_t K, int threads, std::vector<double>& out) {
    std::vector<double> dm(K);
    for (std::size_t r = 1; r <= K; ++r) dm[r - 1] = m[r] - m[r - 1];
    out.resize(K + 1);
    parallel_for(K + 1, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double* row = tail.data() + i * K;
            KahanSum acc;
            for (std::size_t r = 0; r < K; ++r) acc.add(dm[r] * row[r]);
            out[i] = m[0] + acc.value();
        }
    });
}

// Quadrature backend: full-grid expectation with linear interpolation.
void full_expectation_quadrature(const SolverGrid& sg, const std::vector<double>& layer, double a,
                                 int threads, std::vector<double>& out) {
    const SymmetricGrid& g = sg.grid;
    out.resize(g.size());
    parallel_for(g.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double ae = a * g.point(i);
            KahanSum acc;
            for (std::size_t j = 0; j < sg.w_nodes.size(); ++j)
                acc.add(sg.w_weights[j] * g.interpolate(layer, ae + sg.w_nodes[j]));
            out[i] = acc.value();
        }
    });
}

} // namespace

ValueGrid backward_induction(const AR1Source& source, const GilbertElliottChannel& channel,
                             const DistortionFn& d, double lambda, std::size_t T,
                             const SolverGrid& sg, const BackwardOptions& opts) {
    source.validate();
    channel.validate();
    if (lambda < 0.0) throw validation_error("lambda must be nonnegative");

    const SymmetricGrid& g = sg.grid;
    const std::size_t n = g.size();
    const std::size_t K = g.radii();
    const std::size_t c = g.center();
    const double a = source.a;
    const double h = g.step();

    ValueGrid vg;
    vg.grid = g;
    vg.horizon = T;
    vg.J.assign(T + 2, {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)});
    vg.J0.assign(T + 1, {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)});
    vg.J1.assign(T + 1, {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)});

    const bool analytic = opts.backend == WExpectation::analytic_cdf;
    std::vector<double> tail;
    if (analytic) tail = radial_tail_table(g, a, source.noise, opts.threads);

    std::vector<double> dist(K + 1);
    for (std::size_t r = 0; r <= K; ++r) dist[r] = d(static_cast<double>(r) * h);

    std::array<std::vector<double>, 2> ew; // E_W[J_{t+1}(ae+W, s')] per next state s'
    std::vector<double> radial(K + 1);

    for (std::size_t ti = 0; ti <= T; ++ti) {
        const std::size_t t = T - ti;
        for (int snext = 0; snext < 2; ++snext) {
            if (analytic) {
                for (std::size_t r = 0; r <= K; ++r) radial[r] = vg.J[t + 1][snext][c + r];
                radial_expectation_analytic(radial, tail, K, opts.threads, ew[snext]);
            } else {
                full_expectation_quadrature(sg, vg.J[t + 1][snext], a, opts.threads, ew[snext]);
            }
        }
        for (int s = 0; s < 2; ++s) {
            const double q0 = channel.q[s][0];
            const double q1 = channel.q[s][1];
            if (analytic) {
                const double reset = ew[1][0]; // E_W[J_{t+1}(W, 1)] is the e = 0 column
                for (std::size_t r = 0; r <= K; ++r) {
                    double j0 = dist[r] + q0 * ew[0][r] + q1 * ew[1][r];
                    double j1 = lambda + q0 * dist[r] + q0 * ew[0][r] + q1 * reset;
                    double j = std::min(j0, j1);
                    vg.J0[t][s][c + r] = j0;
                    vg.J0[t][s][c - r] = j0;
                    vg.J1[t][s][c + r] = j1;
                    vg.J1[t][s][c - r] = j1;
                    vg.J[t][s][c + r] = j;
                    vg.J[t][s][c - r] = j;
                }
            } else {
                const double reset = ew[1][c];
                for (std::size_t i = 0; i < n; ++i) {
                    double de = d(g.point(i));
                    double j0 = de + q0 * ew[0][i] + q1 * ew[1][i];
                    double j1 = lambda + q0 * de + q0 * ew[0][i] + q1 * reset;
                    vg.J0[t][s][i] = j0;
                    vg.J1[t][s][i] = j1;
                    vg.J[t][s][i] = std::min(j0, j1);
                }
            }
        }
    }
    return vg;
}

ThresholdSchedule extract_thresholds(const ValueGrid& vg, bool refine) {
    const std::size_t T = vg.horizon;
    const std::size_t K = vg.grid.radii();
    const std::size_t c = vg.grid.center();
    const double h = vg.grid.step();

    ThresholdSchedule out;
    out.k.assign(T + 1, {kThresholdInf, kThresholdInf});
    out.refined.assign(T + 1, {false, false});
    out.sign_changes.assign(T + 1, {0, 0});
    out.structure_ok.assign(T + 1, {true, true});

    for (std::size_t t = 0; t <= T; ++t) {
        for (int s = 0; s < 2; ++s) {
            // Transmit is weakly optimal where J0 - J1 >= 0; the no-transmit
            // set on e >= 0 must be a prefix of the radial grid.
            bool prev_transmit = false;
            int changes = 0;
            std::ptrdiff_t first_transmit = -1;
            bool prefix_ok = true;
            for (std::size_t r = 0; r <= K; ++r) {
                double delta = vg.J0[t][s][c + r] - vg.J1[t][s][c + r];
                bool transmit = delta >= 0.0;
                if (r == 0) {
                    prev_transmit = transmit;
                } else if (transmit != prev_transmit) {
                    ++changes;
                    prev_transmit = transmit;
                }
                if (transmit && first_transmit < 0) first_transmit = static_cast<std::ptrdiff_t>(r);
                if (!transmit && first_transmit >= 0) prefix_ok = false;
            }
            out.sign_changes[t][s] = changes;
            out.structure_ok[t][s] = prefix_ok && changes <= 1;
            if (first_transmit >= 0) {
                auto r = static_cast<std::size_t>(first_transmit);
                double k = static_cast<double>(r) * h;
                if (refine && r > 0) {
                    double dlo = vg.J0[t][s][c + r - 1] - vg.J1[t][s][c + r - 1];
                    double dhi = vg.J0[t][s][c + r] - vg.J1[t][s][c + r];
                    if (dlo < 0.0 && dhi > dlo) {
                        k = (static_cast<double>(r) - 1.0) * h + h * (-dlo) / (dhi - dlo);
                        out.refined[t][s] = true;
                    }
                }
                out.k[t][s] = k;
            }
        }
    }
    return out;
}

StructureReport check_structure(const ValueGrid& vg, const NoiseSpec& noise, double a) {
    StructureReport rep;
    const std::size_t T = vg.horizon;
    const std::size_t K = vg.grid.radii();
    const std::size_t c = vg.grid.center();

    auto scan_even = [&](const std::vector<double>& layer) {
        for (std::size_t r = 1; r <= K; ++r)
            rep.max_evenness_violation =
                std::max(rep.max_evenness_violation, std::fabs(layer[c + r] - layer[c - r]));
    };
    auto scan_ei = [&](const std::vector<double>& layer) {
        for (std::size_t r = 0; r < K; ++r)
            rep.max_ei_violation = std::max(rep.max_ei_violation, layer[c + r] - layer[c + r + 1]);
    };

    for (std::size_t t = 0; t <= T; ++t) {
        for (int s = 0; s < 2; ++s) {
            scan_even(vg.J[t][s]);
            scan_even(vg.J0[t][s]);
            scan_even(vg.J1[t][s]);
            scan_ei(vg.J[t][s]);
            for (std::size_t i = 0; i < vg.grid.size(); ++i) {
                double m = std::min(vg.J0[t][s][i], vg.J1[t][s][i]);
                rep.max_min_identity_violation =
                    std::max(rep.max_min_identity_violation, std::fabs(vg.J[t][s][i] - m));
            }
        }
    }
    for (int s = 0; s < 2; ++s)
        for (double v : vg.J[T + 1][s])
            rep.max_terminal_violation = std::max(rep.max_terminal_violation, std::fabs(v));

    ThresholdSchedule sched = extract_thresholds(vg);
    rep.sign_changes = sched.sign_changes;
    for (std::size_t t = 0; t <= T; ++t)
        for (int s = 0; s < 2; ++s) {
            rep.max_sign_changes = std::max(rep.max_sign_changes, sched.sign_changes[t][s]);
            if (!sched.structure_ok[t][s]) ++rep.prefix_violations;
        }

    // m0 monotonicity over a (y, e >= 0) grid.
    const int m_pts = 200;
    const double y_max = 4.0 * noise.scale;
    const double e_max = 4.0 * noise.scale;
    for (int iy = 0; iy < m_pts; ++iy) {
        double y = y_max * static_cast<double>(iy) / (m_pts - 1);
        double prev = m0(y, 0.0, a, noise);
        for (int ie = 1; ie < m_pts; ++ie) {
            double e = e_max * static_cast<double>(ie) / (m_pts - 1);
            double cur = m0(y, e, a, noise);
            rep.m0_max_violation = std::max(rep.m0_max_violation, prev - cur);
            prev = cur;
        }
    }
    return rep;
}

double default_half_width(const AR1Source& source) {
    double s = source.noise.scale;
    double a = std::fabs(source.a);
    if (a < 1.0) return 20.0 * s / std::sqrt(1.0 - a * a);
    return 20.0 * s;
}

} // namespace remest
