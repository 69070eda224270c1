#pragma once

#include "outwave/grid.hpp"
#include "outwave/projections.hpp"
#include "outwave/reduction.hpp"

namespace outwave {

enum class PropagationMethod { reduction, closed_form, kernel };

/// Plan for a free-flow run. The invariant r_max >= support + T (propagation
/// speed 1) makes the outer boundary exact, so no absorbing layer exists.
struct PropagatorPlan {
    RadialGrid grid;
    double horizon = 0.0;
    PropagationMethod method = PropagationMethod::reduction;

    void validate(double support_radius) const {
        ensure(support_radius + horizon <= grid.r_max + 1e-9,
               "domain too small");
    }
};

namespace detail {

/// Interpolate the even extension of half-line samples; 0 beyond r_max.
inline double even_interp(const HalfLineField& v, double x) {
    return v.interp(std::abs(x));
}

/// Interpolate the odd extension of half-line samples; 0 beyond r_max.
inline double odd_interp(const HalfLineField& v, double x) {
    double y = v.interp(std::abs(x));
    return x >= 0 ? y : -y;
}

/// Odd extension of a cumulative integral, saturating past r_max (valid for
/// integrands supported inside the grid).
inline double odd_interp_saturating(const HalfLineField& G, double x) {
    double a = std::abs(x);
    double y = (a >= G.grid.r_max) ? G[G.grid.n - 1] : G.interp(a);
    return x >= 0 ? y : -y;
}

}  // namespace detail

/// Half-line Neumann d'Alembert evolution of (v0, v1), prepared once so many
/// times t can be evaluated cheaply. The Neumann condition at r=0 is the even
/// extension of the data.
class HalfLinePropagator {
  public:
    HalfLinePropagator(const HalfLineField& v0, const HalfLineField& v1)
        : v0_(v0), v1_(v1), V1_(cumulative_integral(v1)), w0_(differentiate(v0)) {
        ensure(v0.grid == v1.grid, "HalfLinePropagator: grid mismatch");
    }

    HalfLineField value(double t) const {
        const auto& g = v0_.grid;
        HalfLineField out(g);
        for (int i = 0; i < g.n; ++i) {
            double r = g.r(i);
            out[i] = 0.5 * (detail::even_interp(v0_, r - t) +
                            detail::even_interp(v0_, r + t)) +
                     0.5 * (detail::odd_interp_saturating(V1_, r + t) -
                            detail::odd_interp_saturating(V1_, r - t));
        }
        return out;
    }

    /// Time derivative from the traveling-wave terms, not time differencing.
    HalfLineField velocity(double t) const {
        const auto& g = v0_.grid;
        HalfLineField out(g);
        for (int i = 0; i < g.n; ++i) {
            double r = g.r(i);
            out[i] = 0.5 * (detail::odd_interp(w0_, r + t) -
                            detail::odd_interp(w0_, r - t)) +
                     0.5 * (detail::even_interp(v1_, r + t) +
                            detail::even_interp(v1_, r - t));
        }
        return out;
    }

  private:
    HalfLineField v0_, v1_, V1_, w0_;
};

/// d'Alembert solution on the half-line with Neumann reflection at r=0.
inline HalfLineField dalembert_halfline(const HalfLineField& v0,
                                        const HalfLineField& v1, double t) {
    ensure(t >= 0, "dalembert_halfline: t must be nonnegative");
    double support = std::max(v0.support_radius(), v1.support_radius());
    ensure(support + t <= v0.grid.r_max + 1e-9, "domain too small");
    return HalfLinePropagator(v0, v1).value(t);
}

/// Free 3D radial flow through the 1D reduction, prepared once per data pair.
class FreeFlow {
  public:
    explicit FreeFlow(const StatePair& s)
        : prop_(forward_T(s.pos), forward_T(s.vel)),
          support_(std::max(s.pos.support_radius(), s.vel.support_radius())),
          grid_(s.grid()) {}

    StatePair at(double t) const {
        ensure(support_ + std::abs(t) <= grid_.r_max + 1e-9, "domain too small");
        return {inverse_T(prop_.value(t)), inverse_T(prop_.velocity(t))};
    }

    RadialField position(double t) const { return at(t).pos; }

    double support_radius() const { return support_; }

  private:
    HalfLinePropagator prop_;
    double support_;
    RadialGrid grid_;
};

/// Phi(t)(u0, u1): position and velocity of the free wave at time t.
inline StatePair propagate_free(const StatePair& s, double t) {
    return FreeFlow(s).at(t);
}

/// Closed-form outgoing propagation u(r,t) = ((r-t)/r) u0(r-t), zero on r <= t.
inline RadialField outgoing_closed_form(const RadialField& u0, double t) {
    ensure(t >= 0, "outgoing_closed_form: t must be nonnegative");
    const auto& g = u0.grid;
    RadialField out(g);
    if (t == 0.0) return u0;
    for (int i = 0; i < g.n; ++i) {
        double r = g.r(i);
        out[i] = (r <= t) ? 0.0 : ((r - t) / r) * u0.interp(r - t);
    }
    return out;
}

/// sin(t sqrt(-Lap))/sqrt(-Lap) f, realized as (1/2r) int_{|r-t|}^{r+t} s f ds.
/// At r=0 the limit is t*f(t). With strict=false the grid-coverage check is
/// skipped and mass past r_max is truncated (used by scattering integrals).
inline RadialField sine_propagator(const RadialField& f, double t,
                                   bool strict = true) {
    ensure(t >= 0, "sine_propagator: t must be nonnegative");
    const auto& g = f.grid;
    if (strict)
        ensure(f.support_radius() + t <= g.r_max + 1e-9, "domain too small");
    RadialField sf(g);
    for (int i = 0; i < g.n; ++i) sf[i] = g.r(i) * f[i];
    RadialField C = cumulative_trapezoid(sf);
    auto C_at = [&](double x) {
        if (x <= 0.0) return 0.0;
        if (x >= g.r_max) return C[g.n - 1];
        return C.interp(x);
    };
    RadialField out(g);
    out[0] = t * f.interp(t);
    for (int i = 1; i < g.n; ++i) {
        double r = g.r(i);
        out[i] = (C_at(r + t) - C_at(std::abs(r - t))) / (2.0 * r);
    }
    return out;
}

/// cos(t sqrt(-Lap)) f through the reduction path: the position of the free
/// flow of (f, 0). Waves leaving the grid are truncated.
inline RadialField cosine_propagator(const RadialField& f, double t) {
    ensure(t >= 0, "cosine_propagator: t must be nonnegative");
    HalfLineField v0 = forward_T(f);
    const auto& g = f.grid;
    HalfLineField v(g);
    for (int i = 0; i < g.n; ++i) {
        double r = g.r(i);
        v[i] = 0.5 * (detail::even_interp(v0, r - t) +
                      detail::even_interp(v0, r + t));
    }
    return inverse_T(v);
}

/// Duhamel integral int_0^{t_j} sin((t_j - s) sqrt(-Lap))/sqrt(-Lap) F(s) ds,
/// trapezoid on the time lattice of F. The s = t_j endpoint vanishes.
inline RadialField duhamel(const SpaceTimeField& F, int t_index) {
    ensure(t_index >= 0 && t_index < F.nt(), "duhamel: t_index out of range");
    const auto& g = F.grid;
    RadialField acc(g);
    if (t_index == 0) return acc;
    double t = F.times[t_index];
    for (int m = 0; m <= t_index; ++m) {
        double tau = t - F.times[m];
        if (tau <= 0.0) continue;
        RadialField term = sine_propagator(F.slice(m), tau);
        double dtm = (m == 0 ? F.times[1] - F.times[0]
                             : F.times[m] - F.times[m - 1]);
        double dtp = (m == t_index ? 0.0 : F.times[m + 1] - F.times[m]);
        double w = 0.5 * ((m == 0 ? 0.0 : dtm) + dtp);
        for (int i = 0; i < g.n; ++i) acc[i] += w * term[i];
    }
    return acc;
}

/// Duhamel at every lattice time; one cumulative integral per source slice.
inline SpaceTimeField duhamel_all(const SpaceTimeField& F) {
    const auto& g = F.grid;
    SpaceTimeField out(g, F.times);
    int M = F.nt() - 1;
    RadialField Fm(g), sf(g);
    for (int m = 0; m < M; ++m) {  // m == M contributes with zero kernel
        for (int i = 0; i < g.n; ++i) {
            Fm[i] = F.at(i, m);
            sf[i] = g.r(i) * Fm[i];
        }
        RadialField Cm = cumulative_trapezoid(sf);
        double Cend = Cm[g.n - 1];
        auto C_at = [&](double x) {
            if (x <= 0.0) return 0.0;
            if (x >= g.r_max) return Cend;
            return Cm.interp(x);
        };
        double dtm = (m == 0 ? 0.0 : F.times[m] - F.times[m - 1]);
        double dtp = F.times[m + 1] - F.times[m];
        double w = (m == 0) ? 0.5 * dtp : 0.5 * (dtm + dtp);
        for (int j = m + 1; j <= M; ++j) {
            double tau = F.times[j] - F.times[m];
            out.at(0, j) += w * tau * Fm.interp(tau);
            double* row = &out.data[static_cast<size_t>(j) * g.n];
            for (int i = 1; i < g.n; ++i) {
                double r = g.r(i);
                row[i] += w * (C_at(r + tau) - C_at(std::abs(r - tau))) / (2.0 * r);
            }
        }
    }
    return out;
}

}  // namespace outwave
