#include <gtest/gtest.h>

#include "common.hpp"

using namespace scatter1d;
using namespace testing_support;

namespace {

std::vector<std::pair<std::string, Potential>> smooth_corpus() {
    std::vector<std::pair<std::string, Potential>> out;
    for (auto& [name, p] : corpus())
        if (delta_terms(p).empty()) out.emplace_back(name, p);
    return out;
}

}  // namespace

TEST(Dynamical, ZeroPotential) {
    EXPECT_EQ(transfer_matrix_dynamical(Potential{}, 1.0, 1e-10).m, Mat2::identity());
}

TEST(Dynamical, BarrierMatchesClosedForm) {
    for (double k : {0.3, 1.0, 4.0}) {
        const auto dyn = transfer_matrix_dynamical(barrier(cplx{2.0, -0.7}, -0.5, 1.0), k, 1e-11);
        EXPECT_LT(max_diff(dyn.m, barrier_matrix(cplx{2.0, -0.7}, -0.5, 1.0, k).m), 1e-9) << k;
    }
}

TEST(Dynamical, DeltaCombSpliced) {
    const DeltaComb comb{{{cplx{0.7, -0.2}, -0.4}, {cplx{-0.3, 0.9}, 0.5}, {2.0, 1.1}}};
    EXPECT_LT(max_diff(transfer_matrix_dynamical(comb, 1.3, 1e-11).m, multi_delta_matrix(comb, 1.3).m), 1e-12);
}

TEST(Dynamical, MixedDeltaAndBarrier) {
    const auto p = sum_of({barrier(cplx{1.0, 0.4}, 0.0, 1.0), delta(cplx{0.5, -0.5}, 1.5)});
    const double k = 1.1;
    const auto expected = compose(delta_matrix(cplx{0.5, -0.5}, 1.5, k), barrier_matrix(cplx{1.0, 0.4}, 0.0, 1.0, k));
    EXPECT_LT(max_diff(transfer_matrix_dynamical(p, k, 1e-11).m, expected.m), 1e-9);
}

TEST(Dynamical, Unimodular) {
    for (const auto& [name, p] : corpus())
        EXPECT_LT(transfer_matrix_dynamical(p, 1.4, 1e-8).det_residual(), 1e-7) << name;
}

TEST(Dynamical, SplitIntegrationComposes) {
    auto gauss = [](double x) { return cplx{std::exp(-4.0 * (x - 1.0) * (x - 1.0)), 0.3 * std::sin(3.0 * x)}; };
    const Potential whole = Sampled::from_function(gauss, 0.0, 2.0, 2048);
    const Potential left = Sampled::from_function(gauss, 0.0, 1.0, 1024);
    const Potential right = Sampled::from_function(gauss, 1.0, 2.0, 1024);
    const double k = 1.7, tol = 1e-10;
    const auto joined = compose(transfer_matrix_dynamical(right, k, tol), transfer_matrix_dynamical(left, k, tol));
    EXPECT_LT(max_diff(joined.m, transfer_matrix_dynamical(whole, k, tol).m), 10 * tol);
}

TEST(Dynamical, GratingCloseToSecondOrderDyson) {
    const Potential g = ExpGrating{cplx{0.01, 0.0}, 1, 2.0, 0.0};
    const double k = 1.2;
    const auto exact = transfer_matrix_dynamical(g, k, 1e-12);
    EXPECT_LT(max_diff(exact.m, dyson_order2(g, k).matrix.m), 1e-5);
}

TEST(Dynamical, ToleranceUnreachable) {
    DynamicalOptions opt;
    opt.tol = 1e-15;
    opt.max_slices = 128;
    EXPECT_THROW(transfer_matrix_dynamical(SmisProfile{2.0, 0.2, 3, 0.0, false}, 2.0, opt), convergence_error);
}

TEST(ScatteringSolution, ZeroPotentialIsPlaneWave) {
    const auto w = scattering_solution(Potential{}, 1.3, Side::left);
    EXPECT_LT(std::abs(w.reflection()), 1e-14);
    EXPECT_LT(std::abs(w.transmission() - 1.0), 1e-14);
}

TEST(ScatteringSolution, DeltaStrengthTwo) {
    const auto w = scattering_solution(delta(2.0, 0.0), 1.0, Side::left, 1e-12);
    EXPECT_LT(std::abs(w.reflection() - cplx(-0.5, -0.5)), 1e-12);
    EXPECT_LT(std::abs(w.transmission() - cplx(0.5, -0.5)), 1e-12);
}

TEST(ScatteringSolution, TransmissionReciprocity) {
    for (const auto& [name, p] : corpus()) {
        const auto l = scattering_solution(p, 1.25, Side::left, 1e-11);
        const auto r = scattering_solution(p, 1.25, Side::right, 1e-11);
        EXPECT_LT(std::abs(l.transmission() - r.transmission()), 1e-8) << name;
    }
}

TEST(LippmannSchwinger, ZeroPotential) {
    EXPECT_LT(amp_err(ls_amplitudes(Potential{}, 2.0), ScatteringData{0.0, 0.0, 1.0, 2.0}), 1e-15);
}

TEST(LippmannSchwinger, BarrierAndComb) {
    const auto b = barrier(cplx{1.3, 0.2}, 0.0, 1.5);
    EXPECT_LT(amp_err(ls_amplitudes(b, 1.1, 1e-11), amplitudes_from_matrix(exact_transfer_matrix(b, 1.1))), 1e-8);
    const DeltaComb comb{{{cplx{0.7, -0.2}, -0.4}, {cplx{-0.3, 0.9}, 0.5}}};
    EXPECT_LT(amp_err(ls_amplitudes(comb, 0.9, 1e-11), amplitudes_from_matrix(multi_delta_matrix(comb, 0.9))), 1e-8);
}

TEST(SCurve, ZeroPotential) {
    const auto r = s_curve_solve(Potential{}, 1.0);
    EXPECT_EQ(r.amplitudes.reflection_left, cplx(0.0));
    EXPECT_EQ(r.amplitudes.reflection_right, cplx(0.0));
    EXPECT_EQ(r.amplitudes.transmission, cplx(1.0));
}

TEST(SCurve, RejectsDeltas) { EXPECT_THROW(s_curve_solve(delta(1.0, 0.0), 1.0), invalid_input); }

TEST(SCurve, ShortBarrier) {
    const auto b = barrier(cplx{0.8, 0.3}, 0.0, 1.0);
    const double k = 2.0;  // kL < pi: no complete loop
    const auto r = s_curve_solve(b, k, 1e-11);
    EXPECT_EQ(r.trace.winding, 0);
    EXPECT_LT(amp_err(r.amplitudes, amplitudes_from_matrix(barrier_matrix(cplx{0.8, 0.3}, 0.0, 1.0, k))), 1e-8);
}

TEST(SCurve, SmisResidue) {
    const double a = 0.05, k0 = 1.0;
    const auto r = s_curve_solve(SmisProfile{k0, a, 1, 0.0, false}, k0, 1e-11);
    const cplx expected{0.0, -8.0 * pi * a / std::pow(1.0 + a, 3)};
    EXPECT_LT(std::abs(r.amplitudes.reflection_left - expected), 1e-7);
    EXPECT_LT(std::abs(r.amplitudes.reflection_right), 1e-7);
    EXPECT_LT(std::abs(r.amplitudes.transmission - 1.0), 1e-7);
    ASSERT_EQ(r.trace.loop_integrals.size(), 1u);
}

TEST(SCurve, LoopContributionsAddUp) {
    const auto r = s_curve_solve(SmisProfile{1.0, 0.02, 3, 0.0, false}, 1.0, 1e-11);
    EXPECT_EQ(r.trace.winding, 3);
    ASSERT_EQ(r.trace.loop_integrals.size(), 3u);
    // every loop encloses the same pole, so each contributes the same residue
    for (const auto& w : r.trace.loop_integrals) EXPECT_LT(std::abs(w - r.trace.loop_integrals.front()), 1e-8);
}

TEST(SCurve, WrapperKeepsContourResultWhenRegular) {
    const auto p = barrier(cplx{0.8, 0.3}, 0.0, 1.0);
    const auto w = s_curve_amplitudes(p, 2.0, 1e-11);
    EXPECT_FALSE(w.fell_back);
    EXPECT_LT(amp_err(w.amplitudes, s_curve_solve(p, 2.0, 1e-11).amplitudes), 1e-15);
}

TEST(ThreeRoutes, AgreeOnSmoothPotentials) {
    const double tol = 1e-10;
    for (const auto& [name, p] : smooth_corpus()) {
        for (double k : {0.7, 1.6}) {
            const auto dyn = amplitudes_from_matrix(transfer_matrix_dynamical(p, k, tol));
            EXPECT_LT(amp_err(ls_amplitudes(p, k, tol), dyn), 1e-7) << name << " k=" << k;
            EXPECT_LT(amp_err(s_curve_solve(p, k, tol).amplitudes, dyn), 1e-7) << name << " k=" << k;
        }
    }
}

TEST(RealPotentials, ReciprocityAndUnitarity) {
    for (int i = 0; i < 10; ++i) {
        const double lo = uniform(-1.0, 1.0);
        const auto p = barrier(uniform(-5.0, 5.0), lo, lo + uniform(0.1, 2.0));
        const auto d = ls_amplitudes(p, uniform(0.3, 3.0), 1e-11);
        EXPECT_NEAR(std::abs(d.reflection_left), std::abs(d.reflection_right), 1e-8);
        EXPECT_NEAR(std::norm(d.reflection_left) + std::norm(d.transmission), 1.0, 1e-8);
    }
}
