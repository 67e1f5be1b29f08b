#pragma once

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dynamical.hpp"
#include "potential.hpp"
#include "transfer.hpp"

namespace scatter1d {

// ---- tunable unidirectionally invisible blocks ----

// Left reflection of the unshifted SMIS profile at its design wavenumber:
// R^l = -8 pi i n alpha / (1 + alpha)^3 (residue of 1/S^2 at z = 0, n clockwise loops).
inline cplx smis_left_reflection(double shape, int winding) {
    return cplx{0.0, -8.0 * pi * winding * shape / std::pow(1.0 + shape, 3)};
}

// Largest |R^l| reachable with a given winding: the maximum of 8 pi n a/(1+a)^3, at a = 1/2.
inline double smis_max_reflection(int winding) { return 32.0 * pi * winding / 27.0; }

// The shape parameter in (0, 1/2] with |smis_left_reflection| = magnitude.
inline double smis_shape_for(double magnitude, int winding) {
    if (!(magnitude > 0.0)) throw invalid_input("target reflection must be nonzero");
    if (winding < 1) throw invalid_input("winding must be positive");
    const double c = 4.0 * pi * winding / magnitude;
    if (c < 27.0 / 8.0)
        throw invalid_input("|R| = " + std::to_string(magnitude) + " is out of reach for winding " +
                            std::to_string(winding) + " (needs 4 pi n/|R| >= 27/8); raise the winding number");
    auto f = [&](double a) { return 8.0 * pi * winding * a / std::pow(1.0 + a, 3) - magnitude; };
    if (f(0.5) == 0.0) return 0.5;
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, 0.5, -magnitude, f(0.5),
                                                      boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (lo + hi);
}

// Smallest winding whose shape parameter does not exceed max_shape.
inline int default_winding(double magnitude, double max_shape = 1e-2) {
    int n = std::max(1, int(std::floor(magnitude / (8.0 * pi * max_shape))));
    while (4.0 * pi * n / magnitude < 27.0 / 8.0 || smis_shape_for(magnitude, n) > max_shape) ++n;
    return n;
}

enum class Orientation { right_invisible, left_invisible };

struct BlockCheck {
    double suppressed_reflection = 0.0;  // |R^r| for right-invisible blocks, |R^l| otherwise
    double transmission_error = 0.0;     // |T - 1|
    double reflection_error = 0.0;       // |R - target|
    double matrix_error = 0.0;           // max-norm distance to the target factor
};

struct InvisibleBlock {
    Orientation orientation = Orientation::right_invisible;
    cplx reflection{0.0};  // R^l for right-invisible blocks, R^r for left-invisible ones
    SmisProfile profile;
    Interval support_interval;
    Potential potential;
    TransferMatrix matrix;  // forward-solved at the design wavenumber
    BlockCheck check;

    Mat2 target_matrix() const {
        return orientation == Orientation::right_invisible ? Mat2{1.0, 0.0, -reflection, 1.0}
                                                           : Mat2{1.0, reflection, 0.0, 1.0};
    }
};

struct DesignOptions {
    double verify_tol = 1e-6;
    double solver_tol = 1e-12;
    double max_shape = 1e-2;  // default-winding policy
    int winding = 0;          // 0: default policy
};

namespace detail {

inline void verify_block(InvisibleBlock& b, double k0, const DesignOptions& opt) {
    DynamicalOptions dopt;
    dopt.tol = opt.solver_tol;
    b.matrix = transfer_matrix_dynamical(b.potential, k0, dopt);
    const auto amp = amplitudes_from_matrix(b.matrix);
    const bool right = b.orientation == Orientation::right_invisible;
    b.check.suppressed_reflection = std::abs(right ? amp.reflection_right : amp.reflection_left);
    b.check.transmission_error = std::abs(amp.transmission - 1.0);
    b.check.reflection_error = std::abs((right ? amp.reflection_left : amp.reflection_right) - b.reflection);
    b.check.matrix_error = max_diff(b.matrix.m, b.target_matrix());
    const double tol = opt.verify_tol;
    if (b.check.suppressed_reflection > tol || b.check.transmission_error > tol ||
        b.check.reflection_error > tol * std::max(1.0, std::abs(b.reflection))) {
        std::ostringstream os;
        os.precision(3);
        os << "invisible block failed forward verification: suppressed reflection "
           << b.check.suppressed_reflection << ", |T-1| " << b.check.transmission_error << ", reflection error "
           << b.check.reflection_error;
        throw verification_failure(os.str());
    }
}


// Unverified block. A left-invisible block is the conjugate of the right-invisible
// block with R^l = -conj(target).
inline InvisibleBlock make_block(Orientation o, double k0, cplx target, int winding, int offset,
                                 const DesignOptions& opt) {
    require_positive_k(k0);
    if (target == cplx{0.0}) throw invalid_input("target reflection must be nonzero");
    const cplx left_target = o == Orientation::right_invisible ? target : -std::conj(target);
    const double mag = std::abs(target);
    const int n = winding > 0 ? winding : default_winding(mag, opt.max_shape);
    InvisibleBlock b;
    b.orientation = o;
    b.reflection = target;
    b.profile.design_k = k0;
    b.profile.shape = smis_shape_for(mag, n);
    b.profile.winding = n;
    b.profile.shift = (std::arg(left_target) + 0.5 * pi + 2.0 * pi * offset) / (2.0 * k0);
    b.profile.conjugated = o == Orientation::left_invisible;
    b.potential = b.profile;
    b.support_interval = {b.profile.shift, b.profile.shift + smis_length(b.profile)};
    return b;
}

inline InvisibleBlock flipped(const InvisibleBlock& b) {
    InvisibleBlock r = b;
    r.orientation = b.orientation == Orientation::right_invisible ? Orientation::left_invisible
                                                                  : Orientation::right_invisible;
    r.reflection = -std::conj(b.reflection);
    r.profile.conjugated = !b.profile.conjugated;
    r.potential = r.profile;
    return r;
}

}  // namespace detail

// Right-invisible block with R^l(k0) = target: the SMIS profile with the tuned shape,
// shifted by a = (arg target + pi/2 + 2 pi offset) / (2 k0).
inline InvisibleBlock build_right_invisible(double k0, cplx target, int winding, int offset,
                                            const DesignOptions& opt = {}) {
    auto b = detail::make_block(Orientation::right_invisible, k0, target, winding, offset, opt);
    detail::verify_block(b, k0, opt);
    return b;
}

// Left-invisible block with R^r(k0) = target.
inline InvisibleBlock build_left_invisible(double k0, cplx target, int winding, int offset,
                                           const DesignOptions& opt = {}) {
    auto b = detail::make_block(Orientation::left_invisible, k0, target, winding, offset, opt);
    detail::verify_block(b, k0, opt);
    return b;
}

// The block with the complex-conjugated profile; its roles of left and right swap.
inline InvisibleBlock time_reversed_block(const InvisibleBlock& b, double k0, const DesignOptions& opt = {}) {
    auto r = detail::flipped(b);
    detail::verify_block(r, k0, opt);
    return r;
}

// ---- single-mode inverse scattering ----

struct DesignSpec {
    double k0 = 1.0;
    cplx reflection_left{0.0};
    cplx reflection_right{0.0};
    cplx transmission{1.0};

    TransferMatrix target_matrix() const {
        return matrix_from_amplitudes({reflection_left, reflection_right, transmission, k0});
    }
};

// Triangular factors with unit diagonal, in the order they are multiplied.
inline Mat2 design_factor(int index, cplx rho, cplx t0, cplx r_left) {
    switch (index) {
        case 1: return {1.0, 0.0, rho * t0 - r_left, 1.0};
        case 2: return {1.0, (t0 - 1.0) / (rho * t0), 0.0, 1.0};
        case 3: return {1.0, 0.0, -rho, 1.0};
        case 4: return {1.0, (1.0 - t0) / rho, 0.0, 1.0};
    }
    throw invalid_input("factor index must be 1..4");
}

struct FactorPlan {
    int case_id = 1;            // 1: R^r != 0, 2: R^r = 0 != R^l, 3: both zero
    bool time_reversed = false; // case 2 factors the time-reversed target
    cplx rho{0.0};
    std::vector<std::pair<int, Mat2>> factors;  // spatial order, left-most first

    Mat2 product() const {
        Mat2 m = Mat2::identity();
        for (const auto& f : factors) m = f.second * m;
        return m;
    }
};

inline FactorPlan factor_plan(const DesignSpec& spec) {
    if (spec.transmission == cplx{0.0}) throw invalid_input("zero transmission unrealizable");
    FactorPlan plan;
    DesignSpec s = spec;
    if (spec.reflection_right != cplx{0.0}) {
        plan.case_id = 1;
    } else if (spec.reflection_left != cplx{0.0}) {
        plan.case_id = 2;
        plan.time_reversed = true;
        const auto tr = time_reverse_amplitudes({spec.reflection_left, 0.0, spec.transmission, spec.k0});
        s.reflection_left = tr.reflection_left;
        s.reflection_right = tr.reflection_right;
        s.transmission = tr.transmission;
    } else {
        plan.case_id = 3;
    }
    const cplx t0 = s.transmission;
    if (plan.case_id == 3) {
        plan.rho = 1.0 / t0;
        if (t0 == cplx{1.0}) return plan;  // the identity: nothing to build
        for (int j = 1; j <= 4; ++j) plan.factors.emplace_back(j, design_factor(j, plan.rho, t0, s.reflection_left));
        return plan;
    }
    plan.rho = (t0 - 1.0) / s.reflection_right;
    plan.factors.emplace_back(1, design_factor(1, plan.rho, t0, s.reflection_left));
    // (T0 - 1)/(rho T0) at rho = (T0 - 1)/R^r, written so that T0 = 1 (rho = 0) stays finite
    plan.factors.emplace_back(2, Mat2{1.0, s.reflection_right / t0, 0.0, 1.0});
    plan.factors.emplace_back(3, design_factor(3, plan.rho, t0, s.reflection_left));
    return plan;
}

struct Placement {
    double origin = 0.0;     // left-most block starts at or after this point
    double min_gap = 1.0;    // in units of the design period pi/k0; must be positive
    double max_length = 0.0; // 0: unbounded; otherwise the whole design must fit in [origin, origin + max_length]
};

struct DesignResult {
    DesignSpec spec;
    FactorPlan plan;
    std::vector<InvisibleBlock> blocks;  // spatial order
    Potential potential;
    TransferMatrix target;
    TransferMatrix realized;
    double residual = 0.0;  // max-norm of realized - target
};

inline DesignResult solve_single_mode(const DesignSpec& spec, const Placement& place = {},
                                      const DesignOptions& opt = {}) {
    require_positive_k(spec.k0);
    if (!(place.min_gap > 0.0)) throw placement_conflict("gap between blocks must be positive");
    DesignResult res;
    res.spec = spec;
    res.plan = factor_plan(spec);
    res.target = spec.target_matrix();
    const double k0 = spec.k0, period = pi / k0;

    // Blocks are shifted by whole design periods only, which leaves their amplitudes at k0 unchanged.
    double cursor = place.origin;
    bool first = true;
    for (const auto& [index, m] : res.plan.factors) {
        const bool lower = m.b == cplx{0.0};
        const cplx off = lower ? m.c : m.b;
        if (std::abs(off) == 0.0) continue;
        const cplx target = lower ? -off : off;
        const auto o = lower ? Orientation::right_invisible : Orientation::left_invisible;
        auto block = detail::make_block(o, k0, target, opt.winding, 0, opt);
        const double start_min = first ? cursor : cursor + place.min_gap * period;
        const int offset = int(std::ceil((start_min - block.support_interval.lo) / period - 1e-9));
        block = detail::make_block(o, k0, target, opt.winding, offset, opt);
        if (res.plan.time_reversed) block = detail::flipped(block);
        detail::verify_block(block, k0, opt);
        res.blocks.push_back(std::move(block));
        cursor = res.blocks.back().support_interval.hi;
        first = false;
    }
    if (place.max_length > 0.0 && cursor - place.origin > place.max_length)
        throw placement_conflict("blocks do not fit in the allowed length");

    std::vector<Potential> parts;
    for (const auto& b : res.blocks) parts.push_back(b.potential);
    res.potential = parts.empty() ? Potential{} : sum_of(parts);

    DynamicalOptions dopt;
    dopt.tol = opt.solver_tol;
    res.realized = transfer_matrix_dynamical(res.potential, k0, dopt);
    res.residual = max_diff(res.realized.m, res.target.m);
    if (res.residual > 5.0 * opt.verify_tol) {
        std::ostringstream os;
        os.precision(3);
        os << "composed design misses the target matrix by " << res.residual << "; block matrix errors:";
        for (const auto& b : res.blocks) os << ' ' << b.check.matrix_error;
        throw verification_failure(os.str());
    }
    return res;
}

}  // namespace scatter1d
