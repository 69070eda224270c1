#pragma once

#include <limits>
#include <utility>

#include "outwave/grid.hpp"
#include "outwave/reduction.hpp"

namespace outwave {

namespace detail {

/// (r u0)'/r, the discrete realization of (u0)_r + u0/r. At r=0 the limit is
/// 2 u0'(0) when u0(0) = 0; otherwise the node is singular and gets a finite
/// surrogate value plus a flag (the radial L^2 weight ignores it anyway).
inline std::pair<RadialField, bool> radial_gradient_term(const RadialField& u0) {
    const auto& g = u0.grid;
    RadialField ru(g);
    for (int i = 0; i < g.n; ++i) ru[i] = g.r(i) * u0[i];
    RadialField d = differentiate(ru);
    RadialField out(g);
    bool singular = false;
    for (int i = 1; i < g.n; ++i) out[i] = d[i] / g.r(i);
    if (std::abs(u0[0]) <= 1e-8 * u0.max_abs()) {
        RadialField du = differentiate(u0);
        out[0] = 2.0 * du[0];
    } else {
        singular = true;
        out[0] = d[0] / g.h;
    }
    return {out, singular};
}

}  // namespace detail

/// Result of splitting a state into outgoing + incoming parts.
struct ProjectionResult {
    StatePair out_part;
    StatePair in_part;
    double residual = 0.0;  // relative norm of (P+ + P- - I) applied to input
    bool singular_origin = false;
};

/// The nonlocal term (1/r) int_0^r s u1(s) ds; 0 at r=0.
inline RadialField antiderivative_weighted(const RadialField& u1) {
    const auto& g = u1.grid;
    RadialField su(g);
    for (int i = 0; i < g.n; ++i) su[i] = g.r(i) * u1[i];
    RadialField G = cumulative_integral(su);
    RadialField out(g);
    out[0] = 0.0;
    for (int i = 1; i < g.n; ++i) out[i] = G[i] / g.r(i);
    return out;
}

/// Pair norm (||(r u0)'||^2_{L^2 dr} + ||r u1||^2_{L^2 dr})^{1/2}, the norm in
/// which P+/P- are orthogonal.
inline double pair_norm(const StatePair& s) {
    double a = equivalent_h1_seminorm(s.pos);
    RadialField rv(s.grid());
    for (int i = 0; i < rv.grid.n; ++i) rv[i] = rv.grid.r(i) * s.vel[i];
    double b = l2_halfline(rv);
    return std::sqrt(a * a + b * b);
}

/// P+(u0, u1) = ( (u0 - (1/r) int_0^r s u1)/2 , (u1 - (r u0)'/r)/2 ).
inline StatePair project_out(const StatePair& s) {
    ensure(s.grid().n >= 3, "insufficient resolution");
    RadialField A = antiderivative_weighted(s.vel);
    auto [grad, singular] = detail::radial_gradient_term(s.pos);
    (void)singular;
    RadialField p(s.grid()), v(s.grid());
    for (int i = 0; i < s.grid().n; ++i) {
        p[i] = 0.5 * (s.pos[i] - A[i]);
        v[i] = 0.5 * (s.vel[i] - grad[i]);
    }
    return {std::move(p), std::move(v)};
}

/// P-(u0, u1), the mirror of project_out with flipped signs.
inline StatePair project_in(const StatePair& s) {
    ensure(s.grid().n >= 3, "insufficient resolution");
    RadialField A = antiderivative_weighted(s.vel);
    auto [grad, singular] = detail::radial_gradient_term(s.pos);
    (void)singular;
    RadialField p(s.grid()), v(s.grid());
    for (int i = 0; i < s.grid().n; ++i) {
        p[i] = 0.5 * (s.pos[i] + A[i]);
        v[i] = 0.5 * (s.vel[i] + grad[i]);
    }
    return {std::move(p), std::move(v)};
}

/// Both projections plus the completeness residual.
inline ProjectionResult decompose(const StatePair& s) {
    ProjectionResult res;
    res.singular_origin = std::abs(s.pos[0]) > 1e-8 * s.pos.max_abs();
    res.out_part = project_out(s);
    res.in_part = project_in(s);
    StatePair sum = res.out_part + res.in_part;
    double denom = pair_norm(s);
    res.residual = denom > 0 ? pair_norm(sum - s) / denom : 0.0;
    return res;
}

/// Radial L^2 norm, 4pi int u^2 r^2 dr (the r=0 sample carries zero weight).
inline double l2_radial(const RadialField& u) {
    RadialField sq(u.grid);
    for (int i = 0; i < u.grid.n; ++i) sq[i] = u[i] * u[i];
    return std::sqrt(integrate_radial(sq));
}

/// Outgoing test of Definition 1.1: residual = ||u1 + (r u0)'/r||_{L^2} scaled
/// by max(||u1||_{L^2}, eps). True iff residual <= tol.
inline std::pair<bool, double> is_outgoing(const StatePair& s, double tol) {
    auto [grad, singular] = detail::radial_gradient_term(s.pos);
    (void)singular;
    RadialField mismatch(s.grid());
    for (int i = 0; i < s.grid().n; ++i) mismatch[i] = s.vel[i] + grad[i];
    double denom = std::max(l2_radial(s.vel),
                            std::numeric_limits<double>::epsilon());
    double residual = l2_radial(mismatch) / denom;
    return {residual <= tol, residual};
}

/// Attach the outgoing velocity u1 = -(r u0)'/r to a profile.
inline StatePair make_outgoing(const RadialField& u0) {
    auto [grad, singular] = detail::radial_gradient_term(u0);
    (void)singular;
    RadialField v(u0.grid);
    for (int i = 0; i < u0.grid.n; ++i) v[i] = -grad[i];
    return {u0, std::move(v)};
}

/// Incoming velocity u1 = +(r u0)'/r.
inline StatePair make_incoming(const RadialField& u0) {
    auto [grad, singular] = detail::radial_gradient_term(u0);
    (void)singular;
    RadialField v(u0.grid);
    for (int i = 0; i < u0.grid.n; ++i) v[i] = grad[i];
    return {u0, std::move(v)};
}

}  // namespace outwave
