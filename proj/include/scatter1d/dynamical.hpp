#pragma once

#include <cmath>
#include <vector>

#include "exact.hpp"
#include "potential.hpp"
#include "transfer.hpp"

namespace scatter1d {

// Interaction-picture generator H(x) = (v(x)/2k) e^{-ikx sigma3} K e^{ikx sigma3}; the
// transfer matrix solves i dM/dx = H(x) M with M = I at the left end of the support.
struct EffectiveHamiltonian {
    Potential potential;
    double k;

    Mat2 operator()(double x) const {
        const cplx w = evaluate(potential, x) / (2.0 * k);
        const cplx ph = std::exp(cplx{0.0, 2.0 * k * x});
        return {w, w / ph, -w * ph, -w};
    }
};

struct DynamicalOptions {
    double tol = 1e-10;
    long max_slices = 1L << 20;
    long min_slices = 64;
};

namespace detail {

// One pass of exponential-midpoint slicing with the given per-segment slice counts.
struct SlicePlan {
    struct Piece {
        Interval span;
        bool smooth;
        long base_slices;
        std::vector<cplx> deltas_after;  // delta strengths sitting at span.hi
    };
    double lo = 0.0, hi = 0.0;
    std::vector<cplx> deltas_at_start;
    std::vector<Piece> pieces;
    bool has_smooth = false;
};

inline SlicePlan make_slice_plan(const Potential& p, double k, long min_slices) {
    SlicePlan plan;
    auto sup = support(p);
    if (!sup) return plan;
    plan.lo = sup->lo;
    plan.hi = sup->hi;
    const auto segs = smooth_segments(p);
    const auto deltas = delta_terms(p);

    std::vector<double> cuts{sup->lo, sup->hi};
    for (auto& s : segs) {
        cuts.push_back(s.lo);
        cuts.push_back(s.hi);
    }
    for (auto& d : deltas) cuts.push_back(d.location);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double smooth_len = 0.0;
    for (auto& s : segs) smooth_len += s.length();
    const long total = std::max(min_slices, long(std::ceil(8.0 * k * smooth_len / pi)));

    std::size_t di = 0;
    while (di < deltas.size() && deltas[di].location <= cuts.front())
        plan.deltas_at_start.push_back(deltas[di++].strength);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        SlicePlan::Piece piece;
        piece.span = {cuts[i], cuts[i + 1]};
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        piece.smooth = std::any_of(segs.begin(), segs.end(),
                                   [mid](const Interval& s) { return s.lo < mid && mid < s.hi; });
        piece.base_slices =
            piece.smooth ? std::max(1L, long(std::ceil(total * piece.span.length() / smooth_len))) : 1;
        while (di < deltas.size() && deltas[di].location <= cuts[i + 1])
            piece.deltas_after.push_back(deltas[di++].strength);
        plan.has_smooth = plan.has_smooth || piece.smooth;
        plan.pieces.push_back(std::move(piece));
    }
    return plan;
}

inline long plan_slices(const SlicePlan& plan, int level) {
    long n = 0;
    for (auto& piece : plan.pieces) n += piece.smooth ? (piece.base_slices << level) : 1;
    return n;
}

inline Mat2 run_slice_plan(const Potential& p, const SlicePlan& plan, double k, int level) {
    Mat2 U = Mat2::identity();
    for (auto z : plan.deltas_at_start) U = delta_core(z, k) * U;
    for (const auto& piece : plan.pieces) {
        if (piece.smooth) {
            const long n = piece.base_slices << level;
            const double h = piece.span.length() / double(n);
            for (long j = 0; j < n; ++j) {
                const double mid = piece.span.lo + (double(j) + 0.5) * h;
                U = barrier_core(evaluate(p, mid), h, k) * U;
            }
        } else {
            U = propagation(k, piece.span.length()) * U;
        }
        for (auto z : piece.deltas_after) U = delta_core(z, k) * U;
    }
    return from_schroedinger_picture(U, plan.lo, plan.hi, k);
}

}  // namespace detail

// Exponential-midpoint slicing (exact barrier propagator per slice) with delta terms
// spliced exactly. The scheme is symmetric, so its error expands in even powers of the
// slice width; successive halvings are combined by Richardson extrapolation and the
// result is accepted when consecutive extrapolants agree to tol.
inline TransferMatrix transfer_matrix_dynamical(const Potential& p, double k, const DynamicalOptions& opt = {}) {
    require_positive_k(k);
    const auto plan = detail::make_slice_plan(p, k, opt.min_slices);
    if (plan.pieces.empty() && plan.deltas_at_start.empty()) return identity_matrix(k);
    if (!plan.has_smooth) return {detail::run_slice_plan(p, plan, k, 0), k};

    std::vector<std::vector<Mat2>> table;
    for (int level = 0;; ++level) {
        if (detail::plan_slices(plan, level) > opt.max_slices)
            throw convergence_error("dynamical slicing did not reach the requested tolerance");
        std::vector<Mat2> row{detail::run_slice_plan(p, plan, k, level)};
        double factor = 1.0;
        for (int i = 1; i <= level; ++i) {
            factor *= 4.0;
            row.push_back(row[i - 1] + (1.0 / (factor - 1.0)) * (row[i - 1] - table[level - 1][i - 1]));
        }
        table.push_back(std::move(row));
        if (level >= 2) {
            const Mat2& best = table[level][level];
            const double err = max_diff(best, table[level - 1][level - 1]);
            if (err < opt.tol * std::max(1.0, max_norm(best))) return {best, k};
        }
    }
}

inline TransferMatrix transfer_matrix_dynamical(const Potential& p, double k, double tol) {
    DynamicalOptions opt;
    opt.tol = tol;
    return transfer_matrix_dynamical(p, k, opt);
}

enum class Solver { automatic, exact, dynamical };

// Closed form when available (or requested), slicing otherwise.
inline TransferMatrix transfer_matrix(const Potential& p, double k, Solver solver = Solver::automatic,
                                      double tol = 1e-10) {
    if (solver == Solver::exact || (solver == Solver::automatic && is_closed_form(p)))
        return exact_transfer_matrix(p, k);
    return transfer_matrix_dynamical(p, k, tol);
}

}  // namespace scatter1d
