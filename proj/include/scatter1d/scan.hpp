#pragma once

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dynamical.hpp"
#include "potential.hpp"
#include "transfer.hpp"

namespace scatter1d {

enum class Entry { m11, m12, m21, m22 };

inline cplx entry_of(const Mat2& m, Entry e) {
    switch (e) {
        case Entry::m11: return m.a;
        case Entry::m12: return m.b;
        case Entry::m21: return m.c;
        case Entry::m22: return m.d;
    }
    return m.d;
}

inline const char* entry_name(Entry e) {
    switch (e) {
        case Entry::m11: return "M11";
        case Entry::m12: return "M12";
        case Entry::m21: return "M21";
        case Entry::m22: return "M22";
    }
    return "M22";
}

// Phenomenon signalled by a real zero of each entry.
inline const char* zero_meaning(Entry e) {
    switch (e) {
        case Entry::m11: return "time_reversed_ss";
        case Entry::m12: return "right_reflectionless";
        case Entry::m21: return "left_reflectionless";
        case Entry::m22: return "spectral_singularity";
    }
    return "";
}

struct RefineOptions {
    Solver solver = Solver::automatic;
    double zero_tol = default_zero_tol;  // accept when |entry| < zero_tol * ||M||
    double solver_tol = 1e-12;
};

struct RefinedZero {
    Entry entry = Entry::m22;
    double k = 0.0;
    double residual = 0.0;              // |entry| / ||M|| at k
    TransferMatrix matrix;
    Classification classification;
    std::optional<cplx> cpa_ratio;      // B+/A- = M21 for M11 zeros
    double verification_residual = 0.0; // same quantity from an independent evaluation
    std::vector<std::pair<double, double>> history;  // (k, relative |entry|) per evaluation
};

namespace detail {

inline double relative_entry(const TransferMatrix& M, Entry e) {
    const double n = max_norm(M.m);
    return n > 0.0 ? std::abs(entry_of(M.m, e)) / n : 0.0;
}

// An evaluation route that does not share code paths with the given solver: closed forms
// are checked by slicing, slicing is checked by slicing from a doubled starting grid.
inline TransferMatrix independent_matrix(const Potential& p, double k, Solver used, double tol) {
    DynamicalOptions opt;
    opt.tol = std::min(tol, 1e-12);
    const bool closed = used == Solver::exact || (used == Solver::automatic && is_closed_form(p));
    if (!closed) opt.min_slices *= 2;
    return transfer_matrix_dynamical(p, k, opt);
}

}  // namespace detail

// Minimizes |entry(k)| over the bracket (Brent), then polishes with real-projected Newton
// steps on the complex entry. Throws no_zero_found when the minimum is not a zero.
inline RefinedZero refine_zero(const Potential& p, Entry entry, double k_lo, double k_hi,
                               const RefineOptions& opt = {}) {
    if (!(k_lo > 0.0) || !(k_hi > k_lo)) throw invalid_input("refine_zero needs 0 < k_lo < k_hi");
    RefinedZero out;
    out.entry = entry;
    auto eval = [&](double k) {
        const auto M = transfer_matrix(p, k, opt.solver, opt.solver_tol);
        out.history.emplace_back(k, detail::relative_entry(M, entry));
        return M;
    };
    auto objective = [&](double k) { return detail::relative_entry(eval(k), entry); };
    std::uintmax_t iters = 200;
    auto [k_best, r_best] = boost::math::tools::brent_find_minima(objective, k_lo, k_hi,
                                                                  std::numeric_limits<double>::digits, iters);

    for (int step = 0; step < 8 && r_best > 0.0; ++step) {
        const double h = 1e-6 * std::max(1.0, k_best);
        const cplx f = entry_of(eval(k_best).m, entry);
        const cplx df = (entry_of(eval(k_best + h).m, entry) - entry_of(eval(k_best - h).m, entry)) / (2.0 * h);
        if (df == cplx{0.0}) break;
        const double k_next = std::clamp(k_best - (f / df).real(), k_lo, k_hi);
        const double r_next = detail::relative_entry(eval(k_next), entry);
        if (!(r_next < r_best)) break;
        k_best = k_next;
        r_best = r_next;
    }

    if (!(r_best < opt.zero_tol))
        throw no_zero_found(std::string("no real zero of ") + entry_name(entry) + " in the bracket", k_best, r_best);
    out.k = k_best;
    out.residual = r_best;
    out.matrix = transfer_matrix(p, k_best, opt.solver, opt.solver_tol);
    out.classification = classify(out.matrix, opt.zero_tol);
    if (entry == Entry::m11) out.cpa_ratio = out.matrix.m21();
    out.verification_residual =
        detail::relative_entry(detail::independent_matrix(p, k_best, opt.solver, opt.solver_tol), entry);
    return out;
}

struct ScanOptions {
    Solver solver = Solver::automatic;
    double tol = 1e-10;
    double zero_tol = default_zero_tol;
    unsigned threads = 0;  // 0: hardware concurrency
    bool refine = true;
    double prefilter = 0.25;  // only grid minima with relative |entry| below this are refined
};

struct ScanPoint {
    double k = 0.0;
    std::optional<TransferMatrix> matrix;
    std::optional<ScatteringData> amplitudes;
    Classification classification;
    std::string error;
};

struct SingularPoint {
    RefinedZero zero;
    bool self_dual = false;
};

struct ScanResult {
    std::vector<double> grid;
    std::vector<ScanPoint> points;
    std::vector<SingularPoint> singular_points;
    std::vector<Entry> identically_zero;  // entries below threshold on the whole grid
};

// 512 grid points per unit of k times support length.
inline int default_scan_points(const Potential& p, double k_min, double k_max) {
    const auto s = support(p);
    const double len = s ? std::max(s->length(), 1e-3) : 1.0;
    return std::max(2, int(std::ceil(512.0 * (k_max - k_min) * len)));
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

inline ScanResult scan(const Potential& p, double k_min, double k_max, int points, const ScanOptions& opt = {}) {
    if (!(k_min > 0.0) || !(k_max > k_min)) throw invalid_input("scan needs 0 < k_min < k_max");
    if (points < 2) throw invalid_input("scan needs at least two points");
    ScanResult res;
    res.grid.resize(points);
    for (int i = 0; i < points; ++i) res.grid[i] = k_min + (k_max - k_min) * double(i) / (points - 1);
    res.points.resize(points);

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next++; i < points; i = next++) {
            ScanPoint& pt = res.points[i];
            pt.k = res.grid[i];
            try {
                pt.matrix = transfer_matrix(p, pt.k, opt.solver, opt.tol);
                pt.classification = classify(*pt.matrix, opt.zero_tol);
                if (!pt.classification.spectral_singularity)
                    pt.amplitudes = amplitudes_from_matrix(*pt.matrix, opt.zero_tol);
            } catch (const error& e) {
                pt.error = e.what();
            }
        }
    };
    const unsigned n_threads = std::min<unsigned>(resolve_threads(opt.threads), unsigned(points));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    if (!opt.refine) return res;
    RefineOptions ropt;
    ropt.solver = opt.solver;
    ropt.zero_tol = opt.zero_tol;
    for (Entry e : {Entry::m11, Entry::m12, Entry::m21, Entry::m22}) {
        std::vector<double> r(points, -1.0);
        bool all_zero = true;
        for (int i = 0; i < points; ++i) {
            if (!res.points[i].matrix) continue;
            r[i] = detail::relative_entry(*res.points[i].matrix, e);
            all_zero = all_zero && r[i] < opt.zero_tol;
        }
        if (all_zero) {
            res.identically_zero.push_back(e);
            continue;
        }
        for (int i = 0; i < points; ++i) {
            if (r[i] < 0.0 || r[i] > opt.prefilter) continue;
            const double left = i > 0 ? r[i - 1] : -1.0, right = i + 1 < points ? r[i + 1] : -1.0;
            if (left < 0.0 || right < 0.0) continue;  // ends and failed neighbours
            if (r[i] > left || r[i] > right || (r[i] == left && r[i] == right)) continue;
            try {
                res.singular_points.push_back({refine_zero(p, e, res.grid[i - 1], res.grid[i + 1], ropt), false});
            } catch (const no_zero_found&) {
            } catch (const error& ex) {
                res.points[i].error = ex.what();
            }
        }
    }

    // M11 and M22 zeros within one grid step are the same self-dual point.
    const double step = (k_max - k_min) / (points - 1);
    for (auto& a : res.singular_points)
        for (auto& b : res.singular_points)
            if (a.zero.entry == Entry::m11 && b.zero.entry == Entry::m22 && std::abs(a.zero.k - b.zero.k) <= step)
                a.self_dual = b.self_dual = true;
    std::stable_sort(res.singular_points.begin(), res.singular_points.end(),
                     [](const SingularPoint& a, const SingularPoint& b) { return a.zero.k < b.zero.k; });
    return res;
}

struct RealIdentityReport {
    double m11_vs_conj_m22 = 0.0;
    double m12_vs_conj_m21 = 0.0;
    double reflection_reciprocity = 0.0;  // | |R^l| - |R^r| |
    double unitarity = 0.0;               // | |R|^2 + |T|^2 - 1 |, with R^l
    double max_violation() const {
        return std::max({m11_vs_conj_m22, m12_vs_conj_m21, reflection_reciprocity, unitarity});
    }
    bool holds(double tol) const { return max_violation() <= tol; }
};

// Identities satisfied by real potentials. Complex input is accepted; the report then
// measures how far the potential is from behaving like a real one.
inline RealIdentityReport check_real_potential_identities(const Potential& p, double k,
                                                          Solver solver = Solver::automatic, double tol = 1e-12) {
    const auto M = transfer_matrix(p, k, solver, tol);
    RealIdentityReport r;
    r.m11_vs_conj_m22 = std::abs(M.m11() - std::conj(M.m22()));
    r.m12_vs_conj_m21 = std::abs(M.m12() - std::conj(M.m21()));
    const auto a = amplitudes_from_matrix(M);
    r.reflection_reciprocity = std::abs(std::abs(a.reflection_left) - std::abs(a.reflection_right));
    r.unitarity = std::abs(std::norm(a.reflection_left) + std::norm(a.transmission) - 1.0);
    return r;
}

}  // namespace scatter1d
