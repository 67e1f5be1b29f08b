#include <gtest/gtest.h>

#include "common.hpp"

using namespace scatter1d;
using namespace testing_support;

TEST(RefineZero, DeltaSpectralSingularity) {
    for (double s : {0.5, 1.0, 2.0}) {
        const auto z = refine_zero(delta(cplx{0.0, s}, 0.0), Entry::m22, 0.4 * s, 0.65 * s);
        EXPECT_NEAR(z.k, s / 2.0, 1e-10);
        EXPECT_LT(std::abs(z.matrix.m12() * z.matrix.m21() + 1.0), 1e-8);
        EXPECT_TRUE(z.classification.spectral_singularity);
        EXPECT_LT(z.verification_residual, 1e-7);
        EXPECT_FALSE(z.history.empty());
    }
}

TEST(RefineZero, TimeReversedViaM11) {
    const auto z = refine_zero(delta(cplx{0.0, -1.0}, 0.0), Entry::m11, 0.3, 0.7);
    EXPECT_NEAR(z.k, 0.5, 1e-10);
    ASSERT_TRUE(z.cpa_ratio);
    EXPECT_LT(std::abs(*z.cpa_ratio - z.matrix.m21()), 1e-15);
    EXPECT_TRUE(z.classification.time_reversed_ss);
}

TEST(RefineZero, RealDeltaHasNone) {
    EXPECT_THROW(refine_zero(delta(1.0, 0.0), Entry::m22, 0.2, 2.0), no_zero_found);
}

TEST(RefineZero, BadBracket) { EXPECT_THROW(refine_zero(delta(1.0, 0.0), Entry::m22, 1.0, 0.5), invalid_input); }

TEST(RefineZero, SmisRightReflectionless) {
    const double k0 = 1.5;
    const Potential p = SmisProfile{k0, 0.05, 1, 0.0, false};
    const auto z = refine_zero(p, Entry::m12, 1.4, 1.6);
    EXPECT_NEAR(z.k, k0, 1e-6);
    EXPECT_LT(std::abs(1.0 / z.matrix.m22() - 1.0), 1e-6);
}

TEST(RefineZero, ComplexBarrierSingularity) {
    // choose the height so that M22 vanishes at k = 1: scan a one-parameter family for the crossing
    const double k = 1.0, L = 1.0;
    auto m22 = [&](cplx h) { return barrier_matrix(h, 0.0, L, k).m22(); };
    cplx h{3.0, -4.0};
    for (int it = 0; it < 50; ++it) {
        const cplx f = m22(h), d = (m22(h + 1e-7) - m22(h - 1e-7)) / 2e-7;
        h -= f / d;
    }
    ASSERT_LT(std::abs(m22(h)), 1e-12);
    const auto z = refine_zero(barrier(h, 0.0, L), Entry::m22, 0.9, 1.1);
    EXPECT_NEAR(z.k, k, 1e-8);
    EXPECT_LT(std::abs(z.matrix.m12() * z.matrix.m21() + 1.0), 1e-7);
}

TEST(Scan, DeltaMinimumAtSingularity) {
    const auto r = scan(delta(cplx{0.0, 2.0}, 0.0), 0.5, 1.5, 101);
    int found = 0;
    for (const auto& sp : r.singular_points)
        if (sp.zero.entry == Entry::m22) {
            ++found;
            EXPECT_NEAR(sp.zero.k, 1.0, 1e-10);
        }
    EXPECT_EQ(found, 1);
    EXPECT_TRUE(r.points[50].classification.spectral_singularity);
    EXPECT_FALSE(r.points[50].amplitudes);
}

TEST(Scan, RealBarrierIsUnitary) {
    const auto r = scan(barrier(3.0, 0.0, 1.0), 0.5, 6.0, 300);
    for (const auto& pt : r.points) {
        ASSERT_TRUE(pt.amplitudes);
        EXPECT_NEAR(std::norm(pt.amplitudes->reflection_left) + std::norm(pt.amplitudes->transmission), 1.0, 1e-10);
    }
    for (const auto& sp : r.singular_points) EXPECT_NE(sp.zero.entry, Entry::m22);
}

TEST(Scan, RealBarrierReflectionlessPoint) {
    // sqrt(k^2 - 3) L = pi gives full transmission
    const auto r = scan(barrier(3.0, 0.0, 1.0), 2.0, 4.0, 200);
    bool found = false;
    for (const auto& sp : r.singular_points)
        if (sp.zero.entry == Entry::m21 && std::abs(sp.zero.k - std::sqrt(pi * pi + 3.0)) < 1e-8) found = true;
    EXPECT_TRUE(found);
}

TEST(Scan, ZeroPotentialIsIdentity) {
    const auto r = scan(Potential{}, 0.1, 2.0, 20);
    for (const auto& pt : r.points) EXPECT_EQ(pt.matrix->m, Mat2::identity());
    EXPECT_TRUE(r.singular_points.empty());
    EXPECT_EQ(r.identically_zero.size(), 2u);
}

TEST(Scan, GridStrictlyIncreasing) {
    const auto r = scan(barrier(1.0, 0.0, 1.0), 0.3, 0.9, 17, ScanOptions{Solver::automatic, 1e-10, 1e-8, 1, false});
    for (std::size_t i = 1; i < r.grid.size(); ++i) EXPECT_GT(r.grid[i], r.grid[i - 1]);
}

TEST(Scan, ThreadCountDoesNotChangeResults) {
    const Potential p = SmisProfile{1.0, 0.1, 1, 0.0, false};
    ScanOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const auto a = scan(p, 0.5, 1.5, 64, one), b = scan(p, 0.5, 1.5, 64, four);
    for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].matrix->m, b.points[i].matrix->m);
    ASSERT_EQ(a.singular_points.size(), b.singular_points.size());
}

TEST(Scan, PTSymmetricSelfDual) {
    // v(x)^* = v(-x): a balanced gain/loss bilayer centered at the origin
    const auto p = bilayer(cplx{1.0, -2.5}, cplx{1.0, 2.5}, 1.0, 1.0);
    const auto pt = translated(p, -1.0);
    for (double k = 0.3; k < 4.0; k += 0.37) {
        const auto M = exact_transfer_matrix(pt, k);
        EXPECT_LT(std::abs(M.m11() - std::conj(M.m22())), 1e-10 * max_norm(M.m));
    }
}

TEST(Scan, SelfDualDetectedForCoincidentZeros) {
    // PT-symmetric delta pair conj(w) at -a, w at a; solve M22(k = 1) = 0 for w by 2D Newton
    const double a = 0.5, k = 1.0;
    auto comb = [&](cplx w) { return DeltaComb{{{std::conj(w), -a}, {w, a}}}; };
    auto m22 = [&](cplx w) { return multi_delta_matrix(comb(w), k).m22(); };
    cplx w{1.0, 1.5};
    for (int it = 0; it < 60; ++it) {
        const cplx f = m22(w);
        if (std::abs(f) < 1e-15) break;
        const double h = 1e-7;
        const cplx dr = (m22(w + h) - m22(w - h)) / (2 * h), di = (m22(w + I_unit * h) - m22(w - I_unit * h)) / (2 * h);
        const double det = dr.real() * di.imag() - di.real() * dr.imag();
        w -= cplx{(di.imag() * f.real() - di.real() * f.imag()) / det, (-dr.imag() * f.real() + dr.real() * f.imag()) / det};
    }
    const Potential p = comb(w);
    const auto M = exact_transfer_matrix(p, k);
    ASSERT_LT(std::abs(M.m22()), 1e-12 * max_norm(M.m));
    EXPECT_LT(std::abs(M.m11()), 1e-10 * max_norm(M.m));
    const auto r = scan(p, 0.8, 1.2, 81);
    bool dual = false;
    for (const auto& sp : r.singular_points) dual = dual || sp.self_dual;
    EXPECT_TRUE(dual);
}

TEST(RealIdentities, BarrierHolds) {
    EXPECT_TRUE(check_real_potential_identities(barrier(1.0, 0.0, 1.0), 1.0).holds(1e-9));
}

TEST(RealIdentities, ZeroPotentialExact) {
    EXPECT_EQ(check_real_potential_identities(Potential{}, 1.0).max_violation(), 0.0);
}

TEST(RealIdentities, ComplexBarrierFlagged) {
    const auto r = check_real_potential_identities(barrier(cplx{1.0, 0.5}, 0.0, 1.0), 1.0);
    EXPECT_GT(r.unitarity, 1e-3);
    EXPECT_FALSE(r.holds(1e-8));
}

TEST(DefaultGrid, DensityScalesWithSupport) {
    EXPECT_EQ(default_scan_points(barrier(1.0, 0.0, 2.0), 1.0, 2.0), 1024);
}
