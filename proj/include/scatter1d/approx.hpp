#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "potential.hpp"
#include "transfer.hpp"
#include "wave.hpp"

namespace scatter1d {

enum class ApproxMethod { born, dyson };

struct ApproxReport {
    int order = 1;
    ApproxMethod method = ApproxMethod::dyson;
    ScatteringData amplitudes;
    TransferMatrix matrix;
};

// R^l ~ v(-2k)/2ik, R^r ~ v(2k)/2ik, T ~ 1 + v(0)/2ik, with v the Fourier transform.
inline ScatteringData born_first(const Potential& p, double k, const numerics::QuadratureOptions& opt = {}) {
    require_positive_k(k);
    const cplx two_ik{0.0, 2.0 * k};
    return {fourier_transform(p, -2.0 * k, opt) / two_ik, fourier_transform(p, 2.0 * k, opt) / two_ik,
            1.0 + fourier_transform(p, 0.0, opt) / two_ik, k};
}

namespace detail {

inline ApproxReport finish_report(int order, const Mat2& m, double k) {
    ApproxReport r;
    r.order = order;
    r.method = ApproxMethod::dyson;
    r.matrix = {m, k};
    try {
        r.amplitudes = amplitudes_from_matrix(r.matrix);
    } catch (const spectral_singularity_error&) {
        throw spectral_singularity_error("Dyson truncation has a vanishing M22 denominator", k);
    }
    return r;
}

inline Mat2 dyson_first_matrix(const Potential& p, double k, const numerics::QuadratureOptions& opt) {
    const cplx f0 = fourier_transform(p, 0.0, opt);
    const cplx fp = fourier_transform(p, 2.0 * k, opt);
    const cplx fm = fourier_transform(p, -2.0 * k, opt);
    const cplx c = cplx{0.0, -1.0} / (2.0 * k);
    return Mat2::identity() + c * Mat2{f0, fp, -fm, -f0};
}

}  // namespace detail

// M ~ I - i int H: exact for a single delta.
inline ApproxReport dyson_order1(const Potential& p, double k, const numerics::QuadratureOptions& opt = {}) {
    require_positive_k(k);
    return detail::finish_report(1, detail::dyson_first_matrix(p, k, opt), k);
}

// Adds -int int_{x1<x2} H(x2) H(x1); exact for two deltas. Amplitudes follow from
// the truncated matrix through R^l = -M21/M22, R^r = M12/M22, T = 1/M22.
inline ApproxReport dyson_order2(const Potential& p, double k, const numerics::QuadratureOptions& opt = {}) {
    require_positive_k(k);
    const double q = 2.0 * k;
    auto dd = [&](double k1, double k2) { return double_fourier(p, k1, k2, opt); };
    const Mat2 second{dd(0.0, 0.0) - dd(-q, q), dd(q, 0.0) - dd(0.0, q), dd(-q, 0.0) - dd(0.0, -q),
                      dd(0.0, 0.0) - dd(q, -q)};
    const Mat2 m = detail::dyson_first_matrix(p, k, opt) - cplx{1.0 / (4.0 * k * k)} * second;
    return detail::finish_report(2, m, k);
}

struct BornInverseOptions {
    double k_max = 0.0;       // required
    int k_points = 4096;      // midpoint grid on [-k_max, k_max], never touching k = 0
    double center = 0.0;
    double half_width = 0.0;  // 0 selects 32 / k_max
    int x_points = 4096;
    double noise_tol = 0.1;   // relative disagreement that marks the x grid as too coarse
};

struct grid_too_coarse : error {
    using error::error;
};

// Inverts first-Born reflection data: v(x) = 2 d/dx F^{-1}[R^r](2x) for right data and
// v(x) = -2 d/dx F^{-1}[R^l](-2x) for left data, where F^{-1}[f](y) = (1/2pi) int f(k) e^{iky} dk.
// The inverse transform is a midpoint sum over k and the x-derivative a centered
// difference. The difference is checked against the spectrally differentiated sum.
inline Sampled born_inverse(const std::function<cplx(double)>& reflection, Side side,
                            const BornInverseOptions& opt) {
    if (!(opt.k_max > 0.0)) throw invalid_input("born_inverse needs k_max > 0");
    if (opt.k_points < 2 || opt.x_points < 3) throw invalid_input("born_inverse grids are too small");
    const double half = opt.half_width > 0.0 ? opt.half_width : 32.0 / opt.k_max;
    const double sgn = side == Side::right ? 1.0 : -1.0;
    const double dk = 2.0 * opt.k_max / opt.k_points;

    std::vector<double> ks(opt.k_points);
    std::vector<cplx> rs(opt.k_points);
    for (int j = 0; j < opt.k_points; ++j) {
        ks[j] = -opt.k_max + (j + 0.5) * dk;
        rs[j] = reflection(ks[j]);
    }

    const int nx = opt.x_points;
    const double x0 = opt.center - half, h = 2.0 * half / (nx - 1);
    // g(x) = (1/pi) sum R(k) e^{2 i sgn k x} dk, the antiderivative of sgn * v, on the
    // x grid padded by one point each side; gp is its exact derivative on the same k grid.
    std::vector<cplx> g(nx + 2, 0.0), gp(nx + 2, 0.0);
    for (int j = 0; j < opt.k_points; ++j) {
        const double w = 2.0 * sgn * ks[j];
        cplx phase = std::exp(cplx{0.0, w * (x0 - h)}) * rs[j];
        const cplx step = std::exp(cplx{0.0, w * h});
        for (int i = 0; i < nx + 2; ++i) {
            if (i % 256 == 0) phase = std::exp(cplx{0.0, w * (x0 + (i - 1) * h)}) * rs[j];
            g[i] += phase;
            gp[i] += cplx{0.0, w} * phase;
            phase *= step;
        }
    }
    for (auto& v : g) v *= dk / pi;
    for (auto& v : gp) v *= dk / pi;

    Sampled out;
    out.x0 = x0;
    out.dx = h;
    out.values.resize(nx);
    double scale = 0.0, worst = 0.0;
    for (int i = 0; i < nx; ++i) {
        const cplx fd = (g[i + 2] - g[i]) / (2.0 * h);
        out.values[i] = sgn * fd;
        scale = std::max(scale, std::abs(gp[i + 1]));
        worst = std::max(worst, std::abs(fd - gp[i + 1]));
    }
    if (scale > 0.0 && worst > opt.noise_tol * scale)
        throw grid_too_coarse("x grid is too coarse for the k range: centered differences disagree with the "
                              "spectral derivative by " + std::to_string(worst / scale));
    return out;
}

// Second-order predictions for the grating strength e^{2 pi i n x / L} on [0, L] at
// k = m pi / L, with zhat = strength L^2 / (2 pi n). The grating is left-reflectionless
// through this order; the right reflection carries the Bragg peak at m = n and a
// second-order term at m = 2n.
inline ScatteringData exp_grating_reference(cplx strength, int n, double length, int m) {
    if (n < 1 || m < 1) throw invalid_input("harmonic indices must be positive");
    if (!(length > 0.0)) throw invalid_input("grating length must be positive");
    const cplx zhat = strength * length * length / (2.0 * pi * n);
    const double d_mn = m == n ? 1.0 : 0.0, d_m2n = m == 2 * n ? 1.0 : 0.0;
    const double ratio = double(n) / m;
    const cplx r_right = cplx{0.0, -ratio} * (d_mn * zhat + (d_m2n - d_mn) * zhat * zhat / (pi * m));
    const double t_coef = double(n) * n * d_mn / (2.0 * pi * m * m * (m + n));
    const cplx t = 1.0 + I_unit * t_coef * zhat * zhat;
    return {0.0, r_right, t, m * pi / length};
}

}  // namespace scatter1d
