#include <gtest/gtest.h>

#include "common.hpp"

using namespace scatter1d;
using namespace testing_support;

TEST(PauliConstants, Identities) {
    EXPECT_EQ(pauli::K * pauli::K, Mat2::zero());
    EXPECT_EQ(pauli::sigma3 * pauli::sigma3, Mat2::identity());
    EXPECT_EQ(pauli::sigma3 + I_unit * pauli::sigma2, pauli::K);
}

TEST(Amplitudes, IdentityIsTransparent) {
    const auto d = amplitudes_from_matrix(identity_matrix(1.0));
    EXPECT_EQ(d.reflection_left, cplx(0.0));
    EXPECT_EQ(d.reflection_right, cplx(0.0));
    EXPECT_EQ(d.transmission, cplx(1.0));
}

TEST(Amplitudes, DeltaStrengthTwo) {
    const auto d = amplitudes_from_matrix(delta_matrix(2.0, 0.0, 1.0));
    EXPECT_LT(std::abs(d.reflection_left - cplx(-0.5, -0.5)), 1e-15);
    EXPECT_LT(std::abs(d.reflection_right - cplx(-0.5, -0.5)), 1e-15);
    EXPECT_LT(std::abs(d.transmission - cplx(0.5, -0.5)), 1e-15);
    EXPECT_NEAR(std::norm(d.reflection_left) + std::norm(d.transmission), 1.0, 1e-15);
}

TEST(Amplitudes, SingularMatrixThrows) {
    EXPECT_THROW(amplitudes_from_matrix(delta_matrix(cplx{0.0, 2.0}, 0.0, 1.0)), spectral_singularity_error);
}

TEST(Amplitudes, RoundTrip) {
    for (int i = 0; i < 50; ++i) {
        const TransferMatrix M{random_unimodular(2.0), 1.3};
        if (std::abs(M.m22()) < 1e-3) continue;
        EXPECT_LT(max_diff(matrix_from_amplitudes(amplitudes_from_matrix(M)).m, M.m), 1e-12);
    }
}

TEST(Amplitudes, UnidirectionalTarget) {
    const cplx r{0.3, -1.1};
    const auto M = matrix_from_amplitudes({r, 0.0, 1.0, 1.0});
    EXPECT_EQ(M.m, (Mat2{1.0, 0.0, -r, 1.0}));
    const auto c = classify(M);
    EXPECT_TRUE(c.right_invisible);
    EXPECT_FALSE(c.left_invisible);
}

TEST(Amplitudes, ZeroTransmissionRejected) {
    EXPECT_THROW(matrix_from_amplitudes({0.1, 0.2, 0.0, 1.0}), invalid_input);
}

TEST(Amplitudes, M11FromOtherEntries) {
    for (const auto& [name, p] : corpus()) {
        const auto M = transfer_matrix(p, 1.1);
        EXPECT_LT(std::abs(M.m11() - (1.0 + M.m12() * M.m21()) / M.m22()), 1e-9 * max_norm(M.m)) << name;
    }
}

TEST(Compose, IdentityIsNeutral) {
    const auto M = barrier_matrix(cplx{1.0, 0.3}, 0.0, 1.0, 2.0);
    EXPECT_EQ(compose(M, identity_matrix(2.0)).m, M.m);
    EXPECT_EQ(compose(identity_matrix(2.0), M).m, M.m);
}

TEST(Compose, WavenumberMismatch) {
    EXPECT_THROW(compose(identity_matrix(1.0), identity_matrix(2.0)), wavenumber_mismatch);
}

TEST(Compose, TwoDeltasEqualComb) {
    const cplx z1{1.0, -0.5}, z2{0.3, 0.6};
    const double k = 1.7;
    const auto composed = compose(delta_matrix(z2, 0.9, k), delta_matrix(z1, -0.2, k));
    EXPECT_LT(max_diff(composed.m, multi_delta_matrix(DeltaComb{{{z1, -0.2}, {z2, 0.9}}}, k).m), 1e-14);
}

TEST(Compose, AdjacentBarriersJoin) {
    const cplx z{1.2, 0.4};
    const double k = 0.9;
    const auto joined = compose(barrier_matrix(z, 1.0, 2.0, k), barrier_matrix(z, 0.0, 1.0, k));
    EXPECT_LT(max_diff(joined.m, barrier_matrix(z, 0.0, 2.0, k).m), 1e-13);
}

TEST(Compose, DeterminantStaysOne) {
    for (int i = 0; i < 30; ++i) {
        const TransferMatrix a{random_unimodular(1.5), 1.0}, b{random_unimodular(1.5), 1.0};
        EXPECT_LT(compose(a, b).det_residual(), 1e-10 * std::max(1.0, max_norm(a.m) * max_norm(b.m)));
    }
}

TEST(Translate, ZeroShiftIsIdentity) {
    const auto M = barrier_matrix(cplx{1.0, 0.3}, 0.0, 1.0, 2.0);
    EXPECT_EQ(translate_matrix(M, 0.0).m, M.m);
}

TEST(Translate, DeltaMovesWithPhase) {
    const cplx z{0.7, 0.2};
    for (double a : {-1.3, 0.4, 2.9})
        EXPECT_LT(max_diff(translate_matrix(delta_matrix(z, 0.0, 1.4), a).m, delta_matrix(z, a, 1.4).m), 1e-15);
}

TEST(Translate, ComposesAdditively) {
    const TransferMatrix M{random_unimodular(1.0), 0.8};
    const double a = 0.37, b = -1.21;
    EXPECT_LT(max_diff(translate_matrix(M, a + b).m, translate_matrix(translate_matrix(M, a), b).m), 1e-15);
}

TEST(Translate, AmplitudeRule) {
    const auto M = barrier_matrix(cplx{1.0, 0.3}, 0.0, 1.0, 2.0);
    const double a = 0.61, k = 2.0;
    const auto d = amplitudes_from_matrix(M), t = amplitudes_from_matrix(translate_matrix(M, a));
    EXPECT_LT(std::abs(t.reflection_left - std::exp(cplx{0.0, 2.0 * k * a}) * d.reflection_left), 1e-14);
    EXPECT_LT(std::abs(t.reflection_right - std::exp(cplx{0.0, -2.0 * k * a}) * d.reflection_right), 1e-14);
    EXPECT_LT(std::abs(t.transmission - d.transmission), 1e-15);
    EXPECT_LT(amp_err(translate_amplitudes(d, a), t), 1e-14);
}

TEST(TimeReverse, Involution) {
    EXPECT_EQ(time_reverse_matrix(identity_matrix(1.0)).m, Mat2::identity());
    for (int i = 0; i < 20; ++i) {
        const TransferMatrix M{random_unimodular(2.0), 1.0};
        EXPECT_EQ(time_reverse_matrix(time_reverse_matrix(M)).m, M.m);
    }
}

TEST(TimeReverse, MatchesTimeReversedPotential) {
    for (const auto& [name, p] : corpus()) {
        const double k = 1.3;
        const auto direct = transfer_matrix(time_reversed(p), k, Solver::automatic, 1e-11);
        const auto rule = time_reverse_matrix(transfer_matrix(p, k, Solver::automatic, 1e-11));
        EXPECT_LT(max_diff(direct.m, rule.m), 1e-8 * std::max(1.0, max_norm(rule.m))) << name;
    }
}

TEST(TimeReverse, AmplitudeRule) {
    const auto M = barrier_matrix(cplx{1.5, -0.7}, 0.0, 1.0, 1.2);
    const auto d = amplitudes_from_matrix(M);
    const cplx D = d.transmission * d.transmission - d.reflection_left * d.reflection_right;
    const auto t = amplitudes_from_matrix(time_reverse_matrix(M));
    EXPECT_LT(std::abs(t.reflection_left + std::conj(d.reflection_right) / std::conj(D)), 1e-13);
    EXPECT_LT(std::abs(t.reflection_right + std::conj(d.reflection_left) / std::conj(D)), 1e-13);
    EXPECT_LT(std::abs(t.transmission - std::conj(d.transmission) / std::conj(D)), 1e-13);
    EXPECT_LT(amp_err(time_reverse_amplitudes(d), t), 1e-13);
}

TEST(Classify, DeltaSpectralSingularity) {
    const auto c = classify(delta_matrix(cplx{0.0, 2.0}, 0.0, 1.0));
    EXPECT_TRUE(c.spectral_singularity);
    EXPECT_FALSE(c.time_reversed_ss);
}

TEST(Classify, DeltaTimeReversedSingularity) {
    const auto M = delta_matrix(cplx{0.0, -2.0}, 0.0, 1.0);
    const auto c = classify(M);
    EXPECT_TRUE(c.time_reversed_ss);
    EXPECT_FALSE(c.spectral_singularity);
    ASSERT_TRUE(c.cpa_ratio);
    EXPECT_EQ(*c.cpa_ratio, M.m21());
}

TEST(Classify, RegularHasNoFlags) {
    EXPECT_TRUE(classify(barrier_matrix(1.0, 0.0, 1.0, 1.0)).names().empty());
}
