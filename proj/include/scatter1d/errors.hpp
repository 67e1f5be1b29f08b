#pragma once

#include <stdexcept>
#include <string>

namespace scatter1d {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed potentials, specs, or arguments.
struct invalid_input : error {
    using error::error;
};

struct wavenumber_mismatch : error {
    using error::error;
};

// Amplitudes are undefined because M22 vanishes.
struct spectral_singularity_error : error {
    double k;
    spectral_singularity_error(const std::string& what, double k_) : error(what), k(k_) {}
};

// Quadrature, slicing, or ODE integration could not reach the requested tolerance.
struct convergence_error : error {
    using error::error;
};

struct inconsistent_transmission : error {
    using error::error;
};

// S or S' came within tolerance of zero on the contour.
struct contour_pole_error : error {
    using error::error;
};

struct no_zero_found : error {
    double best_k;
    double residual;
    no_zero_found(const std::string& what, double k_, double r)
        : error(what), best_k(k_), residual(r) {}
};

struct verification_failure : error {
    using error::error;
};

struct placement_conflict : error {
    using error::error;
};

}  // namespace scatter1d
