#pragma once

#include <cmath>
#include <vector>

#include "dynamical.hpp"
#include "ode.hpp"
#include "potential.hpp"
#include "transfer.hpp"
#include "wave.hpp"

namespace scatter1d {

// Trace of S along the curve z = e^{-2ikx}, x in [lo, hi]. The curve winds once
// (clockwise) around the unit circle every pi/k in x; loop_integrals holds the
// contribution of each successive loop to the integral of dz/S^2 (the last may be partial).
struct SCurveTrace {
    std::vector<double> x;
    std::vector<cplx> s;
    std::vector<cplx> ds;  // dS/dz
    int winding = 0;       // number of complete loops
    std::vector<cplx> loop_integrals;
    // -int S''/(S S') dz along the same curve. Its residue evaluation for SMIS profiles is
    // -8 pi i n alpha/(alpha+1)^2, which is not R^l; kept for comparison only.
    cplx ratio_integral{0.0};
};

struct SCurveResult {
    ScatteringData amplitudes;
    SCurveTrace trace;
};

// Solves z^2 S'' + (V(z)/4k^2) S = 0 with S(z-) = z-, S'(z-) = 1, parameterized by x.
// psi = e^{ikx} S(e^{-2ikx}) is then the solution equal to e^{-ikx} left of the support,
// and S (int dz/S^2) is the second solution (reduction of order). In the x chart, with
// P = dS/dz and W = int dz/S^2:
//   dS/dx = -2ik z P,   dP/dx = i v S / (2k z),   dW/dx = -2ik z / S^2,
// giving T = 1/P(z+), R^r = S(z+)/P(z+) - z+, R^l = W(z+) + 1/(S(z+) P(z+)) - 1/z-.
inline SCurveResult s_curve_solve(const Potential& p, double k, double tol = 1e-10) {
    require_positive_k(k);
    if (!delta_terms(p).empty()) throw invalid_input("the S-curve method does not accept delta terms");
    SCurveResult out;
    out.amplitudes = {0.0, 0.0, 1.0, k};
    const auto sup_opt = support(p);
    if (!sup_opt) return out;
    const Interval sup = *sup_opt;
    const auto segs = smooth_segments(p);
    const double loop = pi / k;

    auto cuts = detail::cut_points(p, sup);
    const int loops_total = int(std::ceil(sup.length() / loop - 1e-12));
    for (int j = 1; j < loops_total; ++j) cuts.push_back(sup.lo + j * loop);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    out.trace.winding = int(std::floor(sup.length() / loop + 1e-12));

    auto z_at = [k](double x) { return std::exp(cplx{0.0, -2.0 * k * x}); };
    std::array<cplx, 4> y{z_at(sup.lo), 1.0, 0.0, 0.0};
    const double pole_tol = std::max(tol, 1e-12);

    auto record = [&out, pole_tol](double x, const std::array<cplx, 4>& st) {
        if (std::abs(st[0]) < pole_tol || std::abs(st[1]) < pole_tol)
            throw contour_pole_error("S or dS/dz vanishes on the contour");
        if (!out.trace.x.empty() && out.trace.x.back() == x) return;
        out.trace.x.push_back(x);
        out.trace.s.push_back(st[0]);
        out.trace.ds.push_back(st[1]);
    };
    auto rhs = [&p, k](double x, const std::array<cplx, 4>& st, std::array<cplx, 4>& d) {
        const cplx v = evaluate(p, x);
        const cplx z = std::exp(cplx{0.0, -2.0 * k * x});
        d[0] = cplx{0.0, -2.0 * k} * z * st[1];
        d[1] = cplx{0.0, 1.0} * v * st[0] / (2.0 * k * z);
        d[2] = cplx{0.0, -2.0 * k} * z / (st[0] * st[0]);
        d[3] = cplx{0.0, -1.0} * v / (2.0 * k * z * st[1]);
    };

    record(sup.lo, y);
    double next_loop_end = sup.lo + loop;
    cplx loop_start_w = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double from = cuts[i], to = cuts[i + 1];
        if (detail::inside_any(segs, 0.5 * (from + to))) {
            y = ode::integrate<4>(rhs, y, from, to, tol * 1e-2, record);
        } else {
            // v = 0: S is linear in z and dz/S^2 integrates in closed form
            const cplx dz = z_at(to) - z_at(from);
            const cplx s_end = y[0] + y[1] * dz;
            y[2] += dz / (y[0] * s_end);
            y[0] = s_end;
        }
        record(to, y);
        if (to >= next_loop_end - 1e-12 * loop || i + 2 == cuts.size()) {
            out.trace.loop_integrals.push_back(y[2] - loop_start_w);
            loop_start_w = y[2];
            next_loop_end += loop;
        }
    }

    out.trace.ratio_integral = y[3];
    const cplx z_plus = z_at(sup.hi);
    out.amplitudes = {y[2] + 1.0 / (y[0] * y[1]) - 1.0 / z_at(sup.lo), y[0] / y[1] - z_plus, 1.0 / y[1], k};
    return out;
}

// S-curve amplitudes, or slicing when S or dS/dz hits zero on the contour.
struct SCurveAmplitudes {
    ScatteringData amplitudes;
    bool fell_back = false;
};

inline SCurveAmplitudes s_curve_amplitudes(const Potential& p, double k, double tol = 1e-10) {
    try {
        return {s_curve_solve(p, k, tol).amplitudes, false};
    } catch (const contour_pole_error&) {
        return {amplitudes_from_matrix(transfer_matrix_dynamical(p, k, tol)), true};
    }
}

}  // namespace scatter1d
