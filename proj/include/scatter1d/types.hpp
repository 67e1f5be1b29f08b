#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace scatter1d {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I_unit{0.0, 1.0};

// 2x2 complex matrix, row-major: a = m11, b = m12, c = m21, d = m22.
struct Mat2 {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static constexpr Mat2 identity() { return {}; }
    static constexpr Mat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }

    cplx det() const { return a * d - b * c; }
    cplx trace() const { return a + d; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    friend Mat2 operator+(const Mat2& x, const Mat2& y) {
        return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
    }
    friend Mat2 operator-(const Mat2& x, const Mat2& y) {
        return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
    }
    friend Mat2 operator*(cplx s, const Mat2& x) {
        return {s * x.a, s * x.b, s * x.c, s * x.d};
    }
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

inline double max_norm(const Mat2& m) {
    return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
}

inline double max_diff(const Mat2& x, const Mat2& y) { return max_norm(x - y); }

// Inverse of a unimodular matrix.
inline Mat2 unimodular_inverse(const Mat2& m) { return {m.d, -m.b, -m.c, m.a}; }

namespace pauli {
inline constexpr Mat2 identity{1.0, 0.0, 0.0, 1.0};
inline constexpr Mat2 sigma1{0.0, 1.0, 1.0, 0.0};
inline constexpr Mat2 sigma2{0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0};
inline constexpr Mat2 sigma3{1.0, 0.0, 0.0, -1.0};
// K = sigma3 + i sigma2, nilpotent.
inline constexpr Mat2 K{1.0, 1.0, -1.0, -1.0};
}  // namespace pauli

// Free propagation e^{i k x sigma3}.
inline Mat2 propagation(double k, double x) {
    const cplx ph = std::exp(cplx{0.0, k * x});
    return {ph, 0.0, 0.0, 1.0 / ph};
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace scatter1d
