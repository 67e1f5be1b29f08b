#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ode.hpp"
#include "potential.hpp"
#include "transfer.hpp"

namespace scatter1d {

enum class Side { left, right };

// Stationary scattering solution for a wave incident from one side, normalized to unit
// incident amplitude. Coefficients follow psi = A e^{ikx} + B e^{-ikx} on each side.
struct WaveSolution {
    Side side = Side::left;
    double k = 1.0;
    std::vector<double> x;
    std::vector<cplx> psi;
    std::vector<cplx> dpsi;
    cplx a_minus{0.0}, b_minus{0.0}, a_plus{0.0}, b_plus{0.0};
    // int e^{+iky} v psi dy and int e^{-iky} v psi dy over the support, deltas included
    cplx moment_plus{0.0}, moment_minus{0.0};

    cplx transmission() const { return side == Side::left ? a_plus : b_minus; }
    cplx reflection() const { return side == Side::left ? b_minus : a_plus; }
};

namespace detail {

// Cut points: support ends, smooth segment ends, and delta locations.
inline std::vector<double> cut_points(const Potential& p, const Interval& sup) {
    std::vector<double> cuts{sup.lo, sup.hi};
    for (auto& s : smooth_segments(p)) {
        cuts.push_back(s.lo);
        cuts.push_back(s.hi);
    }
    for (auto& d : delta_terms(p)) cuts.push_back(d.location);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

inline bool inside_any(const std::vector<Interval>& segs, double x) {
    return std::any_of(segs.begin(), segs.end(), [x](const Interval& s) { return s.lo < x && x < s.hi; });
}

}  // namespace detail

// Integrates psi'' = (v - k^2) psi inward from the transmission side, starting from a
// purely outgoing wave; delta terms impose psi'(a+) = psi'(a-) + z psi(a).
inline WaveSolution scattering_solution(const Potential& p, double k, Side side, double tol = 1e-10) {
    require_positive_k(k);
    WaveSolution w;
    w.side = side;
    w.k = k;
    const auto sup_opt = support(p);
    const Interval sup = sup_opt ? *sup_opt : Interval{0.0, 0.0};
    const auto cuts = detail::cut_points(p, sup);
    const auto segs = smooth_segments(p);
    const auto deltas = delta_terms(p);
    const cplx ik{0.0, k};

    // state: psi, psi', J+ = int e^{iky} v psi, J- = int e^{-iky} v psi (oriented lo -> hi)
    std::array<cplx, 4> y{};
    const bool backward = side == Side::left;
    const double start = backward ? sup.hi : sup.lo;
    if (backward) {
        y[0] = std::exp(ik * start);
        y[1] = ik * y[0];
    } else {
        y[0] = std::exp(-ik * start);
        y[1] = -ik * y[0];
    }
    const double orient = backward ? -1.0 : 1.0;

    auto record = [&w](double x, const std::array<cplx, 4>& s) {
        if (!w.x.empty() && w.x.back() == x) return;
        w.x.push_back(x);
        w.psi.push_back(s[0]);
        w.dpsi.push_back(s[1]);
    };
    auto apply_deltas_at = [&](double x) {
        for (const auto& d : deltas) {
            if (d.location != x) continue;
            const cplx jump = d.strength * y[0];
            y[1] += backward ? -jump : jump;
            y[2] += d.strength * std::exp(ik * x) * y[0];
            y[3] += d.strength * std::exp(-ik * x) * y[0];
        }
    };
    auto rhs = [&p, k, orient](double x, const std::array<cplx, 4>& s, std::array<cplx, 4>& ds) {
        const cplx v = evaluate(p, x);
        ds[0] = s[1];
        ds[1] = (v - k * k) * s[0];
        ds[2] = orient * std::exp(cplx{0.0, k * x}) * v * s[0];
        ds[3] = orient * std::exp(cplx{0.0, -k * x}) * v * s[0];
    };

    record(start, y);
    const std::size_t n = cuts.size();
    for (std::size_t step = 0; step + 1 < n; ++step) {
        const double from = backward ? cuts[n - 1 - step] : cuts[step];
        const double to = backward ? cuts[n - 2 - step] : cuts[step + 1];
        if (step == 0) apply_deltas_at(from);
        if (detail::inside_any(segs, 0.5 * (from + to))) {
            y = ode::integrate<4>(rhs, y, from, to, tol * 1e-2, record);
        } else {
            const double h = to - from;
            const cplx c = std::cos(k * h), s = std::sin(k * h);
            const cplx psi = y[0] * c + y[1] / k * s;
            const cplx dpsi = -k * y[0] * s + y[1] * c;
            y[0] = psi;
            y[1] = dpsi;
        }
        apply_deltas_at(to);
        record(to, y);
    }
    if (n == 1) apply_deltas_at(cuts[0]);

    const cplx psi_end = y[0], dpsi_end = y[1];
    const double xe = backward ? sup.lo : sup.hi;
    const cplx a = 0.5 * (psi_end + dpsi_end / ik) * std::exp(-ik * xe);
    const cplx b = 0.5 * (psi_end - dpsi_end / ik) * std::exp(ik * xe);
    // Normalize to unit incident amplitude.
    const cplx norm = backward ? a : b;
    if (std::abs(norm) == 0.0) throw convergence_error("scattering solution has zero incident amplitude");
    for (auto& v : w.psi) v /= norm;
    for (auto& v : w.dpsi) v /= norm;
    if (backward) {
        std::reverse(w.x.begin(), w.x.end());
        std::reverse(w.psi.begin(), w.psi.end());
        std::reverse(w.dpsi.begin(), w.dpsi.end());
        w.a_minus = 1.0;
        w.b_minus = b / norm;
        w.a_plus = 1.0 / norm;
        w.b_plus = 0.0;
    } else {
        w.a_minus = 0.0;
        w.b_minus = 1.0 / norm;
        w.a_plus = a / norm;
        w.b_plus = 1.0;
    }
    w.moment_plus = y[2] / norm;
    w.moment_minus = y[3] / norm;
    return w;
}

// Reflection and transmission from the integral formulas
//   R^l = (1/2ik) int e^{iky} v psi^l,   R^r = (1/2ik) int e^{-iky} v psi^r,
//   T   = 1 + (1/2ik) int e^{-iky} v psi^l = 1 + (1/2ik) int e^{iky} v psi^r.
inline ScatteringData ls_amplitudes(const Potential& p, double k, double tol = 1e-10) {
    const auto left = scattering_solution(p, k, Side::left, tol);
    const auto right = scattering_solution(p, k, Side::right, tol);
    const cplx two_ik{0.0, 2.0 * k};
    const cplx t_left = 1.0 + left.moment_minus / two_ik;
    const cplx t_right = 1.0 + right.moment_plus / two_ik;
    if (std::abs(t_left - t_right) > 10.0 * tol * std::max(1.0, std::abs(t_left)))
        throw inconsistent_transmission("left and right integral formulas for T disagree");
    return {left.moment_plus / two_ik, right.moment_minus / two_ik, t_left, k};
}

}  // namespace scatter1d
