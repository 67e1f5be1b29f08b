#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace scatter1d {

inline constexpr double default_zero_tol = 1e-8;

inline void require_positive_k(double k) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw invalid_input("wavenumber must be positive and finite (negative k is not supported)");
}

// Maps the left asymptotic coefficients (A-, B-) to the right ones (A+, B+).
struct TransferMatrix {
    Mat2 m;
    double k = 1.0;

    cplx m11() const { return m.a; }
    cplx m12() const { return m.b; }
    cplx m21() const { return m.c; }
    cplx m22() const { return m.d; }
    double det_residual() const { return std::abs(m.det() - 1.0); }
};

struct ScatteringData {
    cplx reflection_left{0.0};
    cplx reflection_right{0.0};
    cplx transmission{1.0};
    double k = 1.0;
};

inline TransferMatrix identity_matrix(double k) { return {Mat2::identity(), k}; }

inline ScatteringData amplitudes_from_matrix(const TransferMatrix& M, double zero_tol = default_zero_tol) {
    if (std::abs(M.m22()) <= zero_tol * max_norm(M.m))
        throw spectral_singularity_error("M22 vanishes: amplitudes diverge (spectral singularity)", M.k);
    return {-M.m21() / M.m22(), M.m12() / M.m22(), 1.0 / M.m22(), M.k};
}

inline TransferMatrix matrix_from_amplitudes(const ScatteringData& d) {
    if (d.transmission == cplx{0.0}) throw invalid_input("zero transmission is unrealizable");
    const cplx t = d.transmission;
    return {{t - d.reflection_left * d.reflection_right / t, d.reflection_right / t,
             -d.reflection_left / t, 1.0 / t},
            d.k};
}

inline void require_same_k(double k1, double k2) {
    if (std::abs(k1 - k2) > 1e-14 * std::max(std::abs(k1), std::abs(k2)))
        throw wavenumber_mismatch("transfer matrices at different wavenumbers cannot be combined");
}

// right * left: the left piece acts first.
inline TransferMatrix compose(const TransferMatrix& right, const TransferMatrix& left) {
    require_same_k(right.k, left.k);
    return {right.m * left.m, right.k};
}

// Product of pieces listed in spatial order, left-most first.
inline TransferMatrix compose_in_order(const std::vector<TransferMatrix>& pieces, double k) {
    TransferMatrix acc = identity_matrix(k);
    for (const auto& p : pieces) acc = compose(p, acc);
    return acc;
}

// T(a)^{-1} M T(a): the matrix of the potential shifted by a.
inline TransferMatrix translate_matrix(const TransferMatrix& M, double a) {
    const cplx ph = std::exp(cplx{0.0, 2.0 * M.k * a});
    return {{M.m.a, M.m.b / ph, M.m.c * ph, M.m.d}, M.k};
}

inline TransferMatrix time_reverse_matrix(const TransferMatrix& M) {
    return {{std::conj(M.m.d), std::conj(M.m.c), std::conj(M.m.b), std::conj(M.m.a)}, M.k};
}

inline ScatteringData translate_amplitudes(const ScatteringData& d, double a) {
    const cplx ph = std::exp(cplx{0.0, 2.0 * d.k * a});
    return {d.reflection_left * ph, d.reflection_right / ph, d.transmission, d.k};
}

inline ScatteringData time_reverse_amplitudes(const ScatteringData& d) {
    const cplx D = std::conj(d.transmission * d.transmission - d.reflection_left * d.reflection_right);
    return {-std::conj(d.reflection_right) / D, -std::conj(d.reflection_left) / D,
            std::conj(d.transmission) / D, d.k};
}

struct Classification {
    bool spectral_singularity = false;
    bool time_reversed_ss = false;
    bool self_dual = false;
    bool left_reflectionless = false;
    bool right_reflectionless = false;
    bool left_invisible = false;
    bool right_invisible = false;
    std::optional<cplx> cpa_ratio;  // B+/A- when M11 vanishes

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        if (spectral_singularity) out.push_back("spectral_singularity");
        if (time_reversed_ss) out.push_back("time_reversed_ss");
        if (self_dual) out.push_back("self_dual");
        if (left_reflectionless) out.push_back("left_reflectionless");
        if (right_reflectionless) out.push_back("right_reflectionless");
        if (left_invisible) out.push_back("left_invisible");
        if (right_invisible) out.push_back("right_invisible");
        return out;
    }
};

// Zero tests are relative to the max-norm of M; |T - 1| is tested absolutely.
inline Classification classify(const TransferMatrix& M, double zero_tol = default_zero_tol) {
    const double thr = zero_tol * max_norm(M.m);
    Classification c;
    c.spectral_singularity = std::abs(M.m22()) < thr;
    c.time_reversed_ss = std::abs(M.m11()) < thr;
    c.self_dual = c.spectral_singularity && c.time_reversed_ss;
    c.left_reflectionless = std::abs(M.m21()) < thr;
    c.right_reflectionless = std::abs(M.m12()) < thr;
    if (!c.spectral_singularity) {
        const bool unit_t = std::abs(1.0 / M.m22() - 1.0) < zero_tol;
        c.left_invisible = c.left_reflectionless && unit_t;
        c.right_invisible = c.right_reflectionless && unit_t;
    }
    if (c.time_reversed_ss) c.cpa_ratio = M.m21();
    return c;
}

}  // namespace scatter1d
