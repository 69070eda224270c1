#pragma once

#include "outwave/grid.hpp"

namespace outwave {

/// Field on the half-line [0, r_max]; v == 0 for r < 0 by convention.
using HalfLineField = RadialField;

/// T(u)(r) = (1/2pi) (r u(r))'. The r=0 value comes from the one-sided stencil
/// of r*u, which converges to the analytic limit u(0)/(2pi) and vanishes
/// exactly for data supported away from the origin.
inline HalfLineField forward_T(const RadialField& u) {
    const auto& g = u.grid;
    if (g.n < 3) throw std::runtime_error("insufficient resolution");
    RadialField ru(g);
    for (int i = 0; i < g.n; ++i) ru[i] = g.r(i) * u[i];
    RadialField v = differentiate(ru);
    for (int i = 0; i < g.n; ++i) v[i] /= (2.0 * pi);
    return v;
}

/// Inverse of T: u(r) = (2pi/r) int_0^r v(s) ds; the r=0 limit u(0) = 2pi v(0)
/// is realized by quadratic extrapolation of the reconstructed samples, which
/// is exact for the output of forward_T up to O(h^3) and keeps the round trip
/// inverse_T(forward_T(u)) == u at roundoff away from r = 0.
inline RadialField inverse_T(const HalfLineField& v) {
    const auto& g = v.grid;
    RadialField G = cumulative_integral(v);
    RadialField u(g);
    for (int i = 1; i < g.n; ++i) u[i] = 2.0 * pi * G[i] / g.r(i);
    u[0] = g.n >= 4 ? 3.0 * u[1] - 3.0 * u[2] + u[3] : 2.0 * pi * v[0];
    return u;
}

/// L^2([0,inf), dr) norm of the samples (plain trapezoid).
inline double l2_halfline(const HalfLineField& v) {
    double acc = 0.0;
    for (int i = 0; i < v.grid.n; ++i) {
        double w = (i == 0 || i == v.grid.n - 1) ? 0.5 : 1.0;
        acc += w * v[i] * v[i];
    }
    return std::sqrt(v.grid.h * acc);
}

/// ||(r u(r))'||_{L^2([0,inf), dr)}, the equivalent norm on H^1_rad.
/// For decaying u this equals ||u||_{H^1} / (2 sqrt(pi)) exactly in the
/// continuum (integration by parts kills the cross term).
inline double equivalent_h1_seminorm(const RadialField& u) {
    HalfLineField v = forward_T(u);
    for (int i = 0; i < v.grid.n; ++i) v[i] *= 2.0 * pi;
    return l2_halfline(v);
}

}  // namespace outwave
