#include "remest/belief.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "remest/rng.hpp"

namespace remest {

ReceptionFlag reception_flag(const ChannelSymbol& y) {
    switch (y.tag) {
        case ChannelSymbol::Tag::payload: return ReceptionFlag::received;
        case ChannelSymbol::Tag::blank0: return ReceptionFlag::blank0;
        case ChannelSymbol::Tag::blank1: return ReceptionFlag::blank1;
    }
    return ReceptionFlag::blank0;
}

FinitePMF FinitePMF::dirac(std::size_t n, std::size_t x) {
    FinitePMF out;
    out.probs.assign(n, 0.0);
    out.probs.at(x) = 1.0;
    return out;
}

void FinitePMF::validate() const {
    detail::validate_distribution(probs, "pmf");
}

double FinitePMF::mass() const {
    KahanSum s;
    for (double v : probs) s.add(v);
    return s.value();
}

std::vector<std::int64_t> FinitePMF::rounded_key() const {
    std::vector<std::int64_t> key(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        key[i] = std::llround(probs[i] * 1e12);
    return key;
}

Prescription Prescription::from_bits(std::size_t n, unsigned bits) {
    Prescription out;
    out.decide.resize(n);
    for (std::size_t x = 0; x < n; ++x)
        out.decide[x] = (bits >> (n - 1 - x)) & 1u; // x = 0 is the high bit: integer order == lex order
    return out;
}

double Prescription::mass_no_transmit(const FinitePMF& pmf) const {
    double m = 0.0;
    for (std::size_t x = 0; x < decide.size(); ++x)
        if (!decide[x]) m += pmf.probs[x];
    return m;
}

double Prescription::mass_transmit(const FinitePMF& pmf) const {
    double m = 0.0;
    for (std::size_t x = 0; x < decide.size(); ++x)
        if (decide[x]) m += pmf.probs[x];
    return m;
}

bool ThresholdPrescription::transmits(double e) const {
    return std::fabs(e - center) >= threshold;
}

Prescription ThresholdPrescription::materialize(const SymmetricGrid& grid) const {
    Prescription out;
    out.decide.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.decide[i] = transmits(grid.point(i)) ? 1 : 0;
    return out;
}

GridDensity GridDensity::dirac0(const SymmetricGrid& grid) {
    GridDensity out(grid, std::vector<double>(grid.size(), 0.0));
    out.values[grid.center()] = 1.0 / grid.step();
    return out;
}

GridDensity GridDensity::from_noise(const SymmetricGrid& grid, const NoiseSpec& noise) {
    GridDensity out(grid, std::vector<double>(grid.size(), 0.0));
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.values[i] = noise.pdf(grid.point(i));
    out.renormalize();
    return out;
}

double GridDensity::mass() const {
    KahanSum s;
    for (double v : values) s.add(v);
    return grid.step() * s.value();
}

void GridDensity::renormalize() {
    double m = mass();
    if (!(m > 0.0))
        throw degenerate_conditioning_error("grid density has nonpositive mass");
    for (double& v : values) v /= m;
}

FinitePMF f1_finite(const FinitePMF& post, const FiniteMarkovSource& source) {
    if (post.size() != source.n_states)
        throw validation_error("f1_finite: pmf length does not match source alphabet");
    FinitePMF out;
    out.probs.assign(source.n_states, 0.0);
    for (std::size_t x = 0; x < source.n_states; ++x) {
        double px = post.probs[x];
        if (px == 0.0) continue;
        for (std::size_t y = 0; y < source.n_states; ++y)
            out.probs[y] += px * source.transition[x][y];
    }
    return out;
}

FinitePMF f2_finite(const FinitePMF& pre, const Prescription& phi, const ChannelSymbol& y) {
    switch (y.tag) {
        case ChannelSymbol::Tag::blank0:
            return pre;
        case ChannelSymbol::Tag::payload: {
            auto x = static_cast<std::size_t>(std::llround(y.value));
            if (x >= pre.size() || std::fabs(y.value - static_cast<double>(x)) > 1e-9)
                throw validation_error("f2_finite: payload is not an alphabet element");
            return FinitePMF::dirac(pre.size(), x);
        }
        case ChannelSymbol::Tag::blank1: {
            if (phi.size() != pre.size())
                throw validation_error("f2_finite: prescription length mismatch");
            double m = phi.mass_no_transmit(pre);
            if (m <= belief_detail::kDegenerateMassTol)
                throw degenerate_conditioning_error(
                    "f2_finite: blank1 observed but the no-transmit set has zero mass");
            FinitePMF out = pre;
            for (std::size_t x = 0; x < out.size(); ++x)
                out.probs[x] = phi.decide[x] ? 0.0 : out.probs[x] / m;
            return out;
        }
    }
    return pre;
}

namespace {

// Density of a*E+ sampled at x: (1/|a|) * post(x/a), zero outside the grid
// (not clamped; the mass guard below catches real spill).
double scaled_density_at(const GridDensity& post, double a, double x) {
    double u = x / a;
    if (std::fabs(u) > post.grid.half_width()) return 0.0;
    return post.grid.interpolate(post.values, u) / std::fabs(a);
}

} // namespace

GridDensity f1_error(const GridDensity& post, double a, const NoiseSpec& noise, int received) {
    const SymmetricGrid& grid = post.grid;
    if (received) return GridDensity::from_noise(grid, noise);
    if (a == 0.0) throw validation_error("f1_error: a must be nonzero");

    const std::size_t n = grid.size();
    const double h = grid.step();

    std::vector<double> scaled(n);
    KahanSum scaled_mass;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = scaled_density_at(post, a, grid.point(i));
        scaled_mass.add(scaled[i]);
    }
    if (std::fabs(h * scaled_mass.value() - 1.0) > belief_detail::kRenormGuardTol)
        throw truncation_overflow_error(
            "f1_error: scaled density mass " + std::to_string(h * scaled_mass.value()) +
            " deviates from 1 by more than 1e-6 (grid too small for |a| dynamics)");

    // Direct midpoint-rule convolution over the truncated noise support.
    const double radius = noise.truncation_radius();
    const auto span = static_cast<std::ptrdiff_t>(radius / h) + 1;
    GridDensity out(grid, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<std::ptrdiff_t>(i);
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, ii - span);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, ii + span);
        KahanSum acc;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            double w = grid.point(i) - grid.point(static_cast<std::size_t>(j));
            if (std::fabs(w) > radius) continue;
            acc.add(scaled[static_cast<std::size_t>(j)] * noise.pdf(w));
        }
        out.values[i] = h * acc.value();
    }
    if (std::fabs(out.mass() - 1.0) > belief_detail::kRenormGuardTol)
        throw truncation_overflow_error(
            "f1_error: convolved mass " + std::to_string(out.mass()) +
            " deviates from 1 by more than 1e-6 (support left the grid)");
    out.renormalize();
    return out;
}

namespace {

GridDensity restrict_and_renormalize(const GridDensity& pre,
                                     const std::vector<std::uint8_t>& transmit) {
    GridDensity out = pre;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (transmit[i]) out.values[i] = 0.0;
    double m = out.mass();
    if (m <= belief_detail::kDegenerateMassTol)
        throw degenerate_conditioning_error(
            "f2_error: blank1 observed but the no-transmit region has zero mass");
    for (double& v : out.values) v /= m;
    return out;
}

} // namespace

GridDensity f2_error(const GridDensity& pre, const ThresholdPrescription& phi, ReceptionFlag h) {
    switch (h) {
        case ReceptionFlag::blank0: return pre;
        case ReceptionFlag::received: return GridDensity::dirac0(pre.grid);
        case ReceptionFlag::blank1: return restrict_and_renormalize(pre, phi.materialize(pre.grid).decide);
    }
    return pre;
}

GridDensity f2_error(const GridDensity& pre, const Prescription& phi, ReceptionFlag h) {
    if (phi.size() != pre.size())
        throw validation_error("f2_error: prescription length mismatch");
    switch (h) {
        case ReceptionFlag::blank0: return pre;
        case ReceptionFlag::received: return GridDensity::dirac0(pre.grid);
        case ReceptionFlag::blank1: return restrict_and_renormalize(pre, phi.decide);
    }
    return pre;
}

GridDensity symmetric_decreasing_rearrangement(const GridDensity& f) {
    std::vector<double> sorted = f.values;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    GridDensity out(f.grid, std::vector<double>(f.size(), 0.0));
    const std::size_t c = f.grid.center();
    out.values[c] = sorted[0];
    std::size_t m = 1;
    for (std::size_t r = 1; r <= f.grid.radii() && m < sorted.size(); ++r) {
        out.values[c + r] = sorted[m++];
        if (m < sorted.size()) out.values[c - r] = sorted[m++];
    }
    return out;
}

bool majorizes(const GridDensity& xi, const GridDensity& pi, double tol) {
    if (!xi.grid.same_as(pi.grid))
        throw validation_error("majorizes: densities live on different grids");
    std::vector<double> sx = xi.values;
    std::vector<double> sp = pi.values;
    std::sort(sx.begin(), sx.end(), std::greater<double>());
    std::sort(sp.begin(), sp.end(), std::greater<double>());
    const double h = xi.grid.step();
    // Central mass of the rearrangement at radius j is h times the sum of the
    // top (2j-1) cell values; dominance there is dominance of the tails
    // integrated from every radius outward.
    KahanSum cx, cp;
    for (std::size_t m = 0; m < sx.size(); ++m) {
        cx.add(sx[m]);
        cp.add(sp[m]);
        if (m % 2 == 0) {
            if (h * cx.value() < h * cp.value() - tol) return false;
        }
    }
    return true;
}

bool is_asu(const GridDensity& f, double center, double tol) {
    const SymmetricGrid& g = f.grid;
    double idxf = (center + g.half_width()) / g.step();
    auto c = static_cast<std::ptrdiff_t>(std::llround(idxf));
    if (c < 0 || c >= static_cast<std::ptrdiff_t>(g.size()) ||
        std::fabs(g.point(static_cast<std::size_t>(c)) - center) > 1e-9)
        throw validation_error("is_asu: center is not a grid point");

    const auto n = static_cast<std::ptrdiff_t>(g.size());
    const std::ptrdiff_t max_r = std::max(c, n - 1 - c);
    for (std::ptrdiff_t r = 1; r <= max_r; ++r) {
        double right = (c + r < n) ? f.values[static_cast<std::size_t>(c + r)] : 0.0;
        double left = (c - r >= 0) ? f.values[static_cast<std::size_t>(c - r)] : 0.0;
        if (std::fabs(right - left) > tol) return false;
    }
    // Monotone checks, one side at a time.
    for (std::ptrdiff_t i = c; i + 1 < n; ++i)
        if (f.values[static_cast<std::size_t>(i + 1)] > f.values[static_cast<std::size_t>(i)] + tol)
            return false;
    for (std::ptrdiff_t i = c; i - 1 >= 0; --i)
        if (f.values[static_cast<std::size_t>(i - 1)] > f.values[static_cast<std::size_t>(i)] + tol)
            return false;
    return true;
}

GridEstimate expected_distortion(const GridDensity& post, const DistortionFn& d) {
    const SymmetricGrid& g = post.grid;
    const double h = g.step();
    const std::size_t c = g.center();

    auto cost_at = [&](std::size_t k) {
        KahanSum acc;
        double ehat = g.point(k);
        for (std::size_t i = 0; i < g.size(); ++i)
            acc.add(d(g.point(i) - ehat) * post.values[i]);
        return h * acc.value();
    };

    // Candidates scanned center-out so exact ties land on the smallest |ehat|.
    GridEstimate best{cost_at(c), g.point(c)};
    for (std::size_t r = 1; r <= g.radii(); ++r) {
        for (std::size_t k : {c + r, c - r}) {
            double v = cost_at(k);
            if (v < best.value) best = {v, g.point(k)};
        }
    }
    return best;
}

FiniteEstimate expected_distortion(const FinitePMF& post, const FiniteDistortion& d) {
    if (post.size() != d.size())
        throw validation_error("expected_distortion: pmf/distortion size mismatch");
    FiniteEstimate best{0.0, 0};
    bool first = true;
    for (std::size_t xhat = 0; xhat < post.size(); ++xhat) {
        double v = 0.0;
        for (std::size_t x = 0; x < post.size(); ++x) v += d(x, xhat) * post.probs[x];
        if (first || v < best.value) {
            best = {v, xhat};
            first = false;
        }
    }
    return best;
}

} // namespace remest
