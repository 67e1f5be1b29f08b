#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace scatter1d::numerics {

// (e^z - 1)/z, accurate near z = 0.
inline cplx phi1(cplx z) {
    if (std::abs(z) < 0.5) {
        cplx term = 1.0, sum = 1.0;
        for (int j = 2; j < 24; ++j) {
            term *= z / double(j);
            sum += term;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

// First divided difference of exp at (x0, x1).
inline cplx exp_dd(cplx x0, cplx x1) { return std::exp(x0) * phi1(x1 - x0); }

// Second divided difference of exp at (x0, x1, x2); symmetric in its arguments.
inline cplx exp_dd(cplx x0, cplx x1, cplx x2) {
    // Order so that |p - r| is the largest pairwise distance.
    cplx p = x0, q = x1, r = x2;
    const double d01 = std::abs(x0 - x1), d02 = std::abs(x0 - x2), d12 = std::abs(x1 - x2);
    if (d01 >= d02 && d01 >= d12) {
        p = x0; q = x2; r = x1;
    } else if (d12 >= d01 && d12 >= d02) {
        p = x1; q = x0; r = x2;
    }
    if (std::abs(r - p) >= 0.5) return (exp_dd(q, r) - exp_dd(p, q)) / (r - p);

    // All three points are clustered: Taylor series about the centroid,
    // exp[y0,y1,y2] = sum_n h_n(y) / (n+2)!, h_n complete homogeneous.
    const cplx c = (x0 + x1 + x2) / 3.0;
    const cplx y0 = x0 - c, y1 = x1 - c, y2 = x2 - c;
    constexpr int terms = 30;
    std::array<cplx, terms> h1{}, h2{}, h3{};
    h1[0] = h2[0] = h3[0] = 1.0;
    for (int n = 1; n < terms; ++n) {
        h1[n] = h1[n - 1] * y0;
        h2[n] = h1[n] + y1 * h2[n - 1];
        h3[n] = h2[n] + y2 * h3[n - 1];
    }
    cplx sum = 0.0;
    double fact = 2.0;  // (n+2)!
    for (int n = 0; n < terms; ++n) {
        sum += h3[n] / fact;
        fact *= double(n + 3);
    }
    return std::exp(c) * sum;
}

// E(k) = (e^{-ikL} - 1)/k with E(0) = -iL.
inline cplx grating_E(double k, double L) { return -I_unit * L * phi1(cplx{0.0, -k * L}); }

// F(k1,k2) = int_0^L dx2 e^{-i k2 x2} int_0^{x2} dx1 e^{-i k1 x1}
//          = (E(k2) - E(k1+k2))/k1, with F(0,k2) = -E'(k2).
inline cplx grating_F(double k1, double k2, double L) {
    return L * L * exp_dd(0.0, cplx{0.0, -k2 * L}, cplx{0.0, -(k1 + k2) * L});
}

// int_a^b e^{-i kappa x} dx
inline cplx window_transform(double kappa, double a, double b) {
    const double h = b - a;
    return std::exp(cplx{0.0, -kappa * a}) * h * phi1(cplx{0.0, -kappa * h});
}

// Exact int_a^b f(x) e^{-i kappa x} dx for f linear between f(a) = fa and f(b) = fb.
inline cplx linear_filon(double kappa, double a, double b, cplx fa, cplx fb) {
    const double h = b - a;
    const cplx z{0.0, -kappa * h};
    const cplx w0 = exp_dd(0.0, 0.0, z);
    const cplx w1 = exp_dd(0.0, z) - w0;
    return std::exp(cplx{0.0, -kappa * a}) * h * (fa * w0 + fb * w1);
}

// Ordered double integral over a ≤ x1 < x2 ≤ b of e^{-i(k1 x1 + k2 x2)}.
inline cplx window_double_transform(double k1, double k2, double a, double b) {
    return std::exp(cplx{0.0, -(k1 + k2) * a}) * grating_F(k1, k2, b - a);
}

inline cplx sinc(cplx z) {
    if (std::abs(z) < 1e-2) {
        const cplx z2 = z * z;
        return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0)));
    }
    return std::sin(z) / z;
}

// 20-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    static constexpr int order = 20;
    std::array<double, order> x{};
    std::array<double, order> w{};

    static const GaussRule& get() {
        static const GaussRule rule = [] {
            using G = boost::math::quadrature::gauss<double, order>;
            GaussRule r;
            const auto& ax = G::abscissa();
            const auto& wt = G::weights();
            for (int i = 0; i < order / 2; ++i) {
                r.x[2 * i] = -ax[i];
                r.x[2 * i + 1] = ax[i];
                r.w[2 * i] = r.w[2 * i + 1] = wt[i];
            }
            return r;
        }();
        return rule;
    }
};

struct QuadratureOptions {
    double rel_tol = 1e-11;
    double abs_tol = 1e-14;
    int max_panels = 1 << 15;
};

// Composite Gauss-Legendre over [a,b] with a fixed number of equal panels.
template <class F>
cplx composite_gauss(const F& f, double a, double b, int panels) {
    const auto& g = GaussRule::get();
    const double h = (b - a) / panels;
    cplx sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        cplx part = 0.0;
        for (int i = 0; i < GaussRule::order; ++i) part += g.w[i] * f(mid + 0.5 * h * g.x[i]);
        sum += part * (0.5 * h);
    }
    return sum;
}

// Integral of a smooth f(x) e^{-i kappa x} over a list of segments on which f is smooth.
// Panels are doubled until two successive estimates agree.
template <class F>
cplx oscillatory_integral(const F& f, double kappa, const std::vector<Interval>& segments,
                          const QuadratureOptions& opt = {}) {
    cplx total = 0.0;
    for (const auto& seg : segments) {
        if (seg.length() <= 0.0) continue;
        auto g = [&](double x) { return f(x) * std::exp(cplx{0.0, -kappa * x}); };
        int panels = std::max(1, int(std::ceil(std::abs(kappa) * seg.length() / pi)));
        cplx prev = composite_gauss(g, seg.lo, seg.hi, panels);
        for (;;) {
            panels *= 2;
            if (panels > opt.max_panels)
                throw convergence_error("oscillatory quadrature did not converge");
            const cplx cur = composite_gauss(g, seg.lo, seg.hi, panels);
            const double diff = std::abs(cur - prev);
            prev = cur;
            if (diff <= std::max(opt.abs_tol * seg.length(), opt.rel_tol * std::abs(cur))) break;
        }
        total += prev;
    }
    return total;
}

}  // namespace scatter1d::numerics
