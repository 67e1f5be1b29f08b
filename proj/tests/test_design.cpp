#include <gtest/gtest.h>

#include "common.hpp"

using namespace scatter1d;
using namespace testing_support;

TEST(SmisTuning, ResidueFormula) {
    EXPECT_LT(std::abs(smis_left_reflection(1.0, 1) - cplx(0.0, -pi)), 1e-15);
    EXPECT_LT(std::abs(smis_left_reflection(0.5, 1) - cplx(0.0, -smis_max_reflection(1))), 1e-14);
}

TEST(SmisTuning, ShapeInvertsMagnitude) {
    for (int n : {1, 3, 26}) {
        for (double frac : {0.01, 0.3, 0.99}) {
            const double mag = frac * smis_max_reflection(n);
            const double a = smis_shape_for(mag, n);
            EXPECT_GT(a, 0.0);
            EXPECT_LE(a, 0.5);
            EXPECT_NEAR(std::abs(smis_left_reflection(a, n)), mag, 1e-12 * mag);
        }
    }
}

TEST(SmisTuning, UnreachableMagnitudeRejected) {
    EXPECT_THROW(smis_shape_for(2.0 * pi, 1), invalid_input);
    EXPECT_THROW(smis_shape_for(0.0, 1), invalid_input);
}

TEST(SmisTuning, DefaultWindingPolicy) {
    const int n = default_winding(2.0 * pi);
    EXPECT_EQ(n, 26);
    EXPECT_LE(smis_shape_for(2.0 * pi, n), 1e-2);
    EXPECT_GT(smis_shape_for(2.0 * pi, n - 1), 1e-2);
}

TEST(SmisTuning, LargeWindingShrinksProfile) {
    const double mag = 1.0, k0 = 1.0;
    double prev_peak = 1e300;
    for (int n : {2, 8, 32}) {
        const SmisProfile s{k0, smis_shape_for(mag, n), n, 0.0, false};
        double peak = 0.0;
        for (double x = 0.0; x < pi / k0; x += 0.01) peak = std::max(peak, std::abs(evaluate(s, x)));
        EXPECT_LT(peak, prev_peak);
        prev_peak = peak;
        EXPECT_NEAR(support(s)->length(), pi * n / k0, 1e-12);
    }
}

TEST(Blocks, RightInvisibleTargets) {
    const double k0 = 1.5;
    for (cplx target : {cplx(0.0, -2.0 * pi), cplx(2.0 * pi, 0.0), cplx(1.0, 1.0) * (pi / std::sqrt(2.0)), cplx(0.3, -0.1)}) {
        const auto b = build_right_invisible(k0, target, 0, 0);
        const auto d = amplitudes_from_matrix(b.matrix);
        EXPECT_LT(std::abs(d.reflection_right), 1e-6);
        EXPECT_LT(std::abs(d.transmission - 1.0), 1e-6);
        EXPECT_LT(std::abs(d.reflection_left - target), 1e-4 * std::abs(target));
    }
}

TEST(Blocks, OffsetShiftsByWholePeriods) {
    const double k0 = 2.0;
    const auto a = build_right_invisible(k0, cplx(0.5, 0.5), 4, 0);
    const auto b = build_right_invisible(k0, cplx(0.5, 0.5), 4, 3);
    EXPECT_NEAR(b.support_interval.lo - a.support_interval.lo, 3.0 * pi / k0, 1e-12);
    EXPECT_LT(max_diff(a.matrix.m, b.matrix.m), 1e-8);
}

TEST(Blocks, LeftInvisible) {
    const double k0 = 1.0;
    const cplx target{2.0 * pi, 0.0};
    const auto b = build_left_invisible(k0, target, 0, 0);
    const auto d = amplitudes_from_matrix(b.matrix);
    EXPECT_LT(std::abs(d.reflection_left), 1e-6);
    EXPECT_LT(std::abs(d.transmission - 1.0), 1e-6);
    EXPECT_LT(std::abs(d.reflection_right - target), 1e-4 * std::abs(target));
    EXPECT_TRUE(b.profile.conjugated);
}

TEST(Blocks, DoubleTimeReversal) {
    const double k0 = 1.2;
    const auto b = build_right_invisible(k0, cplx(0.4, 0.9), 3, 0);
    const auto l = time_reversed_block(b, k0);
    EXPECT_EQ(l.orientation, Orientation::left_invisible);
    EXPECT_LT(std::abs(l.reflection + std::conj(b.reflection)), 1e-15);
    const auto back = time_reversed_block(l, k0);
    EXPECT_EQ(back.orientation, Orientation::right_invisible);
    EXPECT_LT(max_diff(back.matrix.m, b.matrix.m), 1e-12);
}

TEST(Blocks, ZeroTargetRejected) { EXPECT_THROW(build_right_invisible(1.0, 0.0, 0, 0), invalid_input); }

TEST(Factors, ThreeFactorIdentity) {
    for (int i = 0; i < 40; ++i) {
        const DesignSpec s{uniform(0.5, 3.0), random_complex(2.0), random_complex(2.0), random_complex(2.0) + 0.1};
        const auto plan = factor_plan(s);
        ASSERT_EQ(plan.case_id, 1);
        EXPECT_LT(max_diff(plan.product(), s.target_matrix().m), 1e-12 * std::max(1.0, max_norm(s.target_matrix().m)));
    }
}

TEST(Factors, FourFactorIdentity) {
    for (int i = 0; i < 40; ++i) {
        const cplx t0 = random_complex(2.0) + 0.1;
        const cplx rho = 1.0 / t0;
        const Mat2 prod = design_factor(4, rho, t0, 0.0) * design_factor(3, rho, t0, 0.0) * design_factor(2, rho, t0, 0.0) *
                          design_factor(1, rho, t0, 0.0);
        EXPECT_LT(max_diff(prod, Mat2{t0, 0.0, 0.0, 1.0 / t0}), 1e-12 * std::max(1.0, std::norm(std::abs(t0) + 1.0 / std::abs(t0))));
    }
}

TEST(Factors, CaseSelection) {
    EXPECT_EQ(factor_plan({1.0, 0.0, 0.5, 1.0}).case_id, 1);
    EXPECT_EQ(factor_plan({1.0, 0.5, 0.0, 1.0}).case_id, 2);
    EXPECT_EQ(factor_plan({1.0, 0.0, 0.0, cplx(0.0, 2.0)}).case_id, 3);
    EXPECT_TRUE(factor_plan({1.0, 0.0, 0.0, 1.0}).factors.empty());
    EXPECT_THROW(factor_plan({1.0, 0.1, 0.1, 0.0}), invalid_input);
}

TEST(SingleMode, TrivialSpecIsEmpty) {
    const auto r = solve_single_mode({1.0, 0.0, 0.0, 1.0});
    EXPECT_TRUE(r.blocks.empty());
    EXPECT_TRUE(r.potential.is_zero());
    EXPECT_LT(r.residual, 1e-15);
}

TEST(SingleMode, AmplifierCase) {
    const DesignSpec s{2.0, std::sqrt(3.0) * std::exp(cplx(0.0, -pi / 4.0)), 0.0, cplx(0.0, std::sqrt(2.0))};
    const auto r = solve_single_mode(s);
    EXPECT_EQ(r.plan.case_id, 2);
    EXPECT_LT(r.residual, 1e-5);
    const auto d = amplitudes_from_matrix(r.realized);
    EXPECT_LT(std::abs(d.reflection_left - s.reflection_left), 1e-5);
    EXPECT_LT(std::abs(d.reflection_right), 1e-5);
    EXPECT_LT(std::abs(d.transmission - s.transmission), 1e-5);
}

TEST(SingleMode, SupportsDisjointAndOrdered) {
    const DesignSpec s{1.0, cplx(0.3, -0.2), cplx(-0.5, 0.4), cplx(1.2, 0.1)};
    const auto r = solve_single_mode(s);
    ASSERT_EQ(r.blocks.size(), 3u);
    const double period = pi / s.k0;
    for (std::size_t i = 1; i < r.blocks.size(); ++i) {
        const double gap = r.blocks[i].support_interval.lo - r.blocks[i - 1].support_interval.hi;
        EXPECT_GE(gap, period * (1.0 - 1e-9));
    }
    for (const auto& b : r.blocks) EXPECT_LT(b.check.matrix_error, 1e-6);
}

TEST(SingleMode, FourBlockCase) {
    const DesignSpec s{1.0, 0.0, 0.0, cplx(0.5, 0.8)};
    const auto r = solve_single_mode(s);
    EXPECT_EQ(r.plan.case_id, 3);
    EXPECT_EQ(r.blocks.size(), 4u);
    EXPECT_LT(r.residual, 5e-6);
}

TEST(SingleMode, PlacementConflict) {
    Placement tight;
    tight.max_length = 1.0;
    EXPECT_THROW(solve_single_mode({1.0, cplx(0.3, 0.0), cplx(0.2, 0.0), 1.1}, tight), placement_conflict);
    Placement bad;
    bad.min_gap = 0.0;
    EXPECT_THROW(solve_single_mode({1.0, cplx(0.3, 0.0), cplx(0.2, 0.0), 1.1}, bad), placement_conflict);
}

TEST(SingleMode, UnreachableToleranceFails) {
    DesignOptions opt;
    opt.verify_tol = 1e-16;
    EXPECT_THROW(solve_single_mode({1.0, cplx(0.3, 0.0), cplx(0.2, 0.0), 1.1}, {}, opt), verification_failure);
}
