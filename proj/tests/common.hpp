#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include <scatter1d/scatter1d.hpp>

namespace testing_support {

using namespace scatter1d;

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline cplx random_complex(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

inline double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

inline double amp_err(const ScatteringData& a, const ScatteringData& b) {
    return std::max({std::abs(a.reflection_left - b.reflection_left), std::abs(a.reflection_right - b.reflection_right),
                     std::abs(a.transmission - b.transmission)});
}

// Exact amplitudes of a single delta term.
inline ScatteringData delta_amplitudes(cplx z, double location, double k) {
    const cplx den = 2.0 * k + I_unit * z;
    const cplx r = -I_unit * z / den;
    return {r * std::exp(cplx{0.0, 2.0 * k * location}), r * std::exp(cplx{0.0, -2.0 * k * location}),
            2.0 * k / den, k};
}

inline Mat2 random_unimodular(double scale) {
    for (;;) {
        const cplx a = random_complex(scale), b = random_complex(scale), c = random_complex(scale);
        if (std::abs(a) < 0.2) continue;
        return {a, b, c, (1.0 + b * c) / a};
    }
}

inline Potential bilayer(cplx z1, cplx z2, double l1, double l2) {
    return PiecewiseConstant{{0.0, l1, l1 + l2}, {z1, z2}};
}

// Named potentials used across test files: deltas, barriers, bilayers, gratings, SMIS.
inline std::vector<std::pair<std::string, Potential>> corpus() {
    std::vector<std::pair<std::string, Potential>> out;
    out.emplace_back("delta", delta(cplx{1.5, 0.5}, 0.3));
    out.emplace_back("delta_comb", Potential(DeltaComb{{{cplx{0.7, -0.2}, -0.4}, {cplx{-0.3, 0.9}, 0.5}, {2.0, 1.1}}}));
    out.emplace_back("barrier_real", barrier(3.0, 0.0, 1.0));
    out.emplace_back("barrier_complex", barrier(cplx{1.0, 0.5}, -0.5, 1.5));
    out.emplace_back("barrier_gain", barrier(cplx{-2.0, -1.0}, 0.2, 0.9));
    out.emplace_back("bilayer", bilayer(cplx{2.0, 0.3}, cplx{-1.0, -0.3}, 0.6, 0.8));
    out.emplace_back("grating", Potential(ExpGrating{cplx{0.4, 0.1}, 1, 2.0, 0.0}));
    out.emplace_back("grating_n2", Potential(ExpGrating{cplx{0.2, 0.0}, 2, 3.0, -1.0}));
    out.emplace_back("fourier_cell", Potential(FourierCell{1.5, {{-1, cplx{0.3, 0.0}}, {0, cplx{0.5, 0.2}}, {2, cplx{0.0, -0.4}}}}));
    out.emplace_back("smis", Potential(SmisProfile{2.0, 0.05, 2, 0.1, false}));
    out.emplace_back("smis_conj", Potential(SmisProfile{1.0, 0.02, 3, -0.5, true}));
    return out;
}

}  // namespace testing_support
