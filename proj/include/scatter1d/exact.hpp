#pragma once

#include <cmath>
#include <vector>

#include "potential.hpp"
#include "transfer.hpp"

namespace scatter1d {

// Delta at the origin.
inline Mat2 delta_core(cplx strength, double k) {
    const cplx h = I_unit * strength / (2.0 * k);
    return {1.0 - h, -h, h, 1.0 + h};
}

inline TransferMatrix delta_matrix(cplx strength, double location, double k) {
    require_positive_k(k);
    const cplx h = I_unit * strength / (2.0 * k);
    const cplx ph = std::exp(cplx{0.0, 2.0 * k * location});
    return {{1.0 - h, -h / ph, h * ph, 1.0 + h}, k};
}

// Composition of delta matrices in spatial order.
inline TransferMatrix multi_delta_matrix(const DeltaComb& comb, double k) {
    require_positive_k(k);
    TransferMatrix acc = identity_matrix(k);
    for (std::size_t i = 0; i < comb.terms.size(); ++i) {
        if (i > 0 && !(comb.terms[i].location > comb.terms[i - 1].location))
            throw invalid_input("delta comb locations must be strictly increasing");
        acc = compose(delta_matrix(comb.terms[i].strength, comb.terms[i].location, k), acc);
    }
    return acc;
}

// exp(-i k h (zhat K - sigma3)) for constant height over a slice of width h:
// the Schroedinger-picture propagator of a barrier.
inline Mat2 barrier_core(cplx height, double width, double k) {
    const cplx zhat = height / (2.0 * k * k);
    const cplx n = std::sqrt(1.0 - 2.0 * zhat);
    const cplx theta = k * width * n;
    const cplx c = std::cos(theta);
    cplx s;
    if (std::abs(theta) < 1e-6) {
        const cplx t2 = theta * theta;
        s = k * width * (1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0);
    } else {
        s = std::sin(theta) / n;
    }
    return {c - I_unit * (zhat - 1.0) * s, -I_unit * zhat * s, I_unit * zhat * s,
            c + I_unit * (zhat - 1.0) * s};
}

// Interaction-picture matrix e^{-i k a+ sigma3} U e^{i k a- sigma3}.
inline Mat2 from_schroedinger_picture(const Mat2& U, double lo, double hi, double k) {
    return propagation(k, -hi) * U * propagation(k, lo);
}

inline TransferMatrix barrier_matrix(cplx height, double lo, double hi, double k) {
    require_positive_k(k);
    if (!(hi > lo)) throw invalid_input("barrier needs lo < hi");
    return {from_schroedinger_picture(barrier_core(height, hi - lo, k), lo, hi, k), k};
}

inline TransferMatrix piecewise_matrix(const PiecewiseConstant& p, double k) {
    require_positive_k(k);
    Mat2 U = Mat2::identity();
    for (std::size_t j = 0; j < p.values.size(); ++j)
        U = barrier_core(p.values[j], p.breakpoints[j + 1] - p.breakpoints[j], k) * U;
    return {from_schroedinger_picture(U, p.breakpoints.front(), p.breakpoints.back(), k), k};
}

// sin(n g)/sin(g) for integer n >= 0, evaluated through sinc ratios so that the
// degenerate points g = 0, pi (tr = +-2, the Jordan case) are regular.
inline cplx sin_ratio(long n, cplx g) {
    if (n == 0) return 0.0;
    const cplx eta = pi - g;
    if (std::abs(g) <= std::abs(eta)) {
        return double(n) * numerics::sinc(double(n) * g) / numerics::sinc(g);
    }
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^{n+1}
    return sign * double(n) * numerics::sinc(double(n) * eta) / numerics::sinc(eta);
}

// L^n = U_{n+1} L - U_n I with U_m(g) = sin((m-1) g)/sin g, cos g = tr L / 2.
inline Mat2 unimodular_power(const Mat2& L, long n) {
    if (n < 0) throw invalid_input("unimodular_power needs n >= 0");
    if (n == 0) return Mat2::identity();
    const cplx half_trace = 0.5 * L.trace();
    cplx g = std::acos(half_trace);
    if (g.real() < 0.0) g = -g;
    const cplx u_next = sin_ratio(n, g);
    const cplx u_curr = sin_ratio(n - 1, g);
    return u_next * L - u_curr * Mat2::identity();
}

// Locally periodic potential: copies of a cell (matrix M1) at spacing ell.
inline TransferMatrix locally_periodic_matrix(const TransferMatrix& cell, double ell, long copies) {
    if (copies < 1) throw invalid_input("locally periodic needs at least one copy");
    const double k = cell.k;
    const Mat2 L = cell.m * propagation(k, ell);
    const cplx half_trace = 0.5 * L.trace();
    cplx g = std::acos(half_trace);
    if (g.real() < 0.0) g = -g;
    const cplx u_next = sin_ratio(copies, g);
    const cplx u_curr = sin_ratio(copies - 1, g);
    const Mat2 m = u_next * (propagation(k, (1.0 - double(copies)) * ell) * cell.m) -
                   u_curr * propagation(k, -double(copies) * ell);
    return {m, k};
}

// Closed-form transfer matrix. Throws invalid_input for potentials without one.
inline TransferMatrix exact_transfer_matrix(const Potential& p, double k) {
    require_positive_k(k);
    using namespace detail;
    return visit(p, overloaded{
        [k](const DeltaComb& v) { return multi_delta_matrix(v, k); },
        [k](const PiecewiseConstant& v) { return piecewise_matrix(v, k); },
        [k](const Sum& v) {
            if (has_overlapping_terms(v))
                throw invalid_input("composition requires pairwise-disjoint supports");
            std::vector<std::pair<Interval, TransferMatrix>> parts;
            for (const auto& t : v.terms)
                if (auto s = support(t)) parts.push_back({*s, exact_transfer_matrix(t, k)});
            std::stable_sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) {
                return a.first.lo < b.first.lo || (a.first.lo == b.first.lo && a.first.hi < b.first.hi);
            });
            TransferMatrix acc = identity_matrix(k);
            for (const auto& [pos, m] : parts) acc = compose(m, acc);
            return acc;
        },
        [k](const Translated& v) { return translate_matrix(exact_transfer_matrix(v.inner, k), v.shift); },
        [k](const TimeReversed& v) { return time_reverse_matrix(exact_transfer_matrix(v.inner, k)); },
        [k](const LocallyPeriodic& v) {
            return locally_periodic_matrix(exact_transfer_matrix(v.cell, k), v.period, v.copies);
        },
        [](const auto&) -> TransferMatrix {
            throw invalid_input("potential has no closed-form transfer matrix");
        },
    });
}

}  // namespace scatter1d
