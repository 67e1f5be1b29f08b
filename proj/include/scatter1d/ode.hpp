#pragma once

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace scatter1d::ode {

// Adaptive Dormand-Prince integration of a complex system y' = f(x, y) from x0 to x1
// (x1 < x0 allowed). The state is carried as interleaved real/imaginary parts.
template <std::size_t N, class Rhs, class Observer>
std::array<cplx, N> integrate(const Rhs& rhs, std::array<cplx, N> y, double x0, double x1, double tol,
                              Observer&& observe) {
    using state = std::vector<double>;
    namespace odeint = boost::numeric::odeint;
    if (x0 == x1) return y;
    state s(2 * N);
    for (std::size_t i = 0; i < N; ++i) {
        s[2 * i] = y[i].real();
        s[2 * i + 1] = y[i].imag();
    }
    auto system = [&rhs](const state& in, state& out, double x) {
        std::array<cplx, N> yy, dy;
        for (std::size_t i = 0; i < N; ++i) yy[i] = {in[2 * i], in[2 * i + 1]};
        rhs(x, yy, dy);
        for (std::size_t i = 0; i < N; ++i) {
            out[2 * i] = dy[i].real();
            out[2 * i + 1] = dy[i].imag();
        }
    };
    auto obs = [&observe](const state& in, double x) {
        std::array<cplx, N> yy;
        for (std::size_t i = 0; i < N; ++i) yy[i] = {in[2 * i], in[2 * i + 1]};
        observe(x, yy);
    };
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<state>());
    const double span = x1 - x0;
    const double dx0 = span / 64.0;
    try {
        odeint::integrate_adaptive(stepper, system, s, x0, x1, dx0, obs);
    } catch (const odeint::step_adjustment_error& e) {
        throw convergence_error(std::string("ODE integration failed: ") + e.what());
    } catch (const odeint::no_progress_error& e) {
        throw convergence_error(std::string("ODE integration failed: ") + e.what());
    }
    for (std::size_t i = 0; i < N; ++i) y[i] = {s[2 * i], s[2 * i + 1]};
    for (auto& v : y)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw convergence_error("ODE integration produced non-finite values");
    return y;
}

}  // namespace scatter1d::ode
