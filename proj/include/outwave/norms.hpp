#pragma once

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "outwave/grid.hpp"
#include "outwave/reduction.hpp"

namespace outwave {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class NonlinearSign { focusing, defocusing };

inline double critical_sobolev_index(int N) { return 1.5 - 2.0 / N; }
inline double critical_lebesgue_exponent(int N) { return 1.5 * N; }

/// L^p norm against the radial measure 4 pi r^2 dr; sup norm for p = inf.
inline double lp_norm(const RadialField& u, double p) {
    if (std::isinf(p)) return u.max_abs();
    ensure(p >= 1.0, "lp_norm: p must be >= 1");
    RadialField w(u.grid);
    for (int i = 0; i < u.grid.n; ++i) w[i] = std::pow(std::abs(u[i]), p);
    return std::pow(integrate_radial(w), 1.0 / p);
}

namespace detail {

/// Exact shell volume owned by node i in the piecewise-constant cell model.
inline double cell_measure(const RadialGrid& g, int i) {
    double lo = std::max(0.0, g.r(i) - 0.5 * g.h);
    double hi = std::min(g.r_max, g.r(i) + 0.5 * g.h);
    return 4.0 * pi / 3.0 * (hi * hi * hi - lo * lo * lo);
}

/// Lorentz quasinorm of a step function given as (value, measure) cells.
inline double lorentz_from_cells(std::vector<std::pair<double, double>> cells,
                                 double p, double q) {
    std::sort(cells.begin(), cells.end(),
              [](auto& a, auto& b) { return a.first > b.first; });
    double t = 0.0;
    if (std::isinf(q)) {
        double best = 0.0;
        for (auto& [v, m] : cells) {
            if (v <= 0.0) break;
            t += m;
            best = std::max(best, v * std::pow(t, 1.0 / p));
        }
        return best;
    }
    double acc = 0.0;
    double qp = q / p;
    for (auto& [v, m] : cells) {
        if (v <= 0.0) break;
        double t1 = t + m;
        acc += std::pow(v, q) * (std::pow(t1, qp) - std::pow(t, qp)) / qp;
        t = t1;
    }
    return std::pow(acc, 1.0 / q);
}

}  // namespace detail

/// Lorentz norm via the exact step-function rearrangement of grid cells.
inline double lorentz_norm(const RadialField& u, double p, double q) {
    ensure(p >= 1.0 && !std::isinf(p), "lorentz_norm: need 1 <= p < inf");
    ensure(q >= 1.0, "lorentz_norm: need q >= 1");
    std::vector<std::pair<double, double>> cells(u.grid.n);
    for (int i = 0; i < u.grid.n; ++i)
        cells[i] = {std::abs(u[i]), detail::cell_measure(u.grid, i)};
    return detail::lorentz_from_cells(std::move(cells), p, q);
}

/// Homogeneous Sobolev norm via the radial sine transform
/// u^(rho) = (4 pi / rho) int r u(r) sin(rho r) dr,
/// ||u||^2_{H^s} = (2 pi^2)^{-1} int rho^{2+2s} |u^|^2 drho.
inline double sobolev_norm(const RadialField& u, double s) {
    ensure(s >= 0.0 && s < 1.5, "sobolev_norm: s must be in [0, 3/2)");
    const auto& g = u.grid;
    if (u.max_abs() == 0.0) return 0.0;
    ensure(std::abs(u[g.n - 1]) <= 1e-8 * u.max_abs(), "not in Sobolev domain");
    int N = g.n - 1;  // sine-transform length
    std::vector<double> gr(g.n);
    for (int i = 0; i < g.n; ++i) gr[i] = g.r(i) * u[i];
    // sin(pi k i / N) via a table over the period 2N
    std::vector<double> sintab(2 * N);
    for (int m = 0; m < 2 * N; ++m) sintab[m] = std::sin(pi * m / N);
    double drho = pi / g.r_max;
    double acc = 0.0;
    for (int k = 1; k <= N - 1; ++k) {
        double S = 0.0;
        size_t idx = 0;
        for (int i = 1; i <= N - 1; ++i) {
            idx += k;
            if (idx >= static_cast<size_t>(2 * N)) idx -= 2 * N;
            S += gr[i] * sintab[idx];
        }
        S *= g.h;
        double rho = k * drho;
        double uhat = 4.0 * pi * S / rho;
        acc += std::pow(rho, 2.0 + 2.0 * s) * uhat * uhat;
    }
    return std::sqrt(acc * drho / (2.0 * pi * pi));
}

namespace detail {

inline double time_weight(const std::vector<double>& ts, int j) {
    double wl = j > 0 ? ts[j] - ts[j - 1] : 0.0;
    double wr = j + 1 < static_cast<int>(ts.size()) ? ts[j + 1] - ts[j] : 0.0;
    return 0.5 * (wl + wr);
}

}  // namespace detail

/// Mixed norm L^p_t L^q_x (time outside).
inline double mixed_norm(const SpaceTimeField& u, double p_t, double q_x) {
    std::vector<double> X(u.nt());
    for (int j = 0; j < u.nt(); ++j) X[j] = lp_norm(u.slice(j), q_x);
    if (std::isinf(p_t)) return *std::max_element(X.begin(), X.end());
    double acc = 0.0;
    for (int j = 0; j < u.nt(); ++j)
        acc += detail::time_weight(u.times, j) * std::pow(X[j], p_t);
    return std::pow(acc, 1.0 / p_t);
}

/// Reversed mixed norm L^q_x L^p_t (space outside).
inline double reversed_norm(const SpaceTimeField& u, double q_x, double p_t) {
    const auto& g = u.grid;
    RadialField Y(g);
    for (int i = 0; i < g.n; ++i) {
        if (std::isinf(p_t)) {
            double m = 0.0;
            for (int j = 0; j < u.nt(); ++j) m = std::max(m, std::abs(u.at(i, j)));
            Y[i] = m;
        } else {
            double acc = 0.0;
            for (int j = 0; j < u.nt(); ++j)
                acc += detail::time_weight(u.times, j) *
                       std::pow(std::abs(u.at(i, j)), p_t);
            Y[i] = std::pow(acc, 1.0 / p_t);
        }
    }
    return lp_norm(Y, q_x);
}

/// Reversed Lorentz norm L^{q,2}_x L^p_t style: Lorentz in x of the L^p_t trace.
inline double reversed_lorentz_norm(const SpaceTimeField& u, double q_x,
                                    double q_second, double p_t) {
    const auto& g = u.grid;
    RadialField Y(g);
    for (int i = 0; i < g.n; ++i) {
        if (std::isinf(p_t)) {
            double m = 0.0;
            for (int j = 0; j < u.nt(); ++j) m = std::max(m, std::abs(u.at(i, j)));
            Y[i] = m;
        } else {
            double acc = 0.0;
            for (int j = 0; j < u.nt(); ++j)
                acc += detail::time_weight(u.times, j) *
                       std::pow(std::abs(u.at(i, j)), p_t);
            Y[i] = std::pow(acc, 1.0 / p_t);
        }
    }
    return lorentz_norm(Y, q_x, q_second);
}

inline double japanese_bracket(double r) { return std::sqrt(1.0 + r * r); }

/// sup over (r, t) of <r> |u(r,t)|.
inline double weighted_sup(const SpaceTimeField& u) {
    double best = 0.0;
    for (int j = 0; j < u.nt(); ++j)
        for (int i = 0; i < u.grid.n; ++i)
            best = std::max(best,
                            japanese_bracket(u.grid.r(i)) * std::abs(u.at(i, j)));
    return best;
}

/// sup over r of <r> int |u(r, .)| dt.
inline double weighted_l1t(const SpaceTimeField& u) {
    double best = 0.0;
    for (int i = 0; i < u.grid.n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < u.nt(); ++j)
            acc += detail::time_weight(u.times, j) * std::abs(u.at(i, j));
        best = std::max(best, japanese_bracket(u.grid.r(i)) * acc);
    }
    return best;
}

/// Energy of the linear flow, 1/2 ||u1||^2 + 1/2 ||grad u0||^2.
inline double linear_energy(const StatePair& s) {
    ensure(s.grid().n >= 3, "insufficient resolution");
    RadialField du = differentiate(s.pos);
    RadialField dens(s.grid());
    for (int i = 0; i < s.grid().n; ++i)
        dens[i] = 0.5 * s.vel[i] * s.vel[i] + 0.5 * du[i] * du[i];
    return integrate_radial(dens);
}

/// Conserved energy  int 1/2 u1^2 + 1/2 |grad u0|^2 +- |u0|^{N+2}/(N+2).
inline double energy(const StatePair& s, int N, NonlinearSign sign) {
    ensure(s.grid().n >= 3, "insufficient resolution");
    RadialField du = differentiate(s.pos);
    RadialField dens(s.grid());
    double sg = sign == NonlinearSign::defocusing ? 1.0 : -1.0;
    for (int i = 0; i < s.grid().n; ++i) {
        dens[i] = 0.5 * s.vel[i] * s.vel[i] + 0.5 * du[i] * du[i] +
                  sg * std::pow(std::abs(s.pos[i]), N + 2) / (N + 2);
    }
    return integrate_radial(dens);
}

/// Morawetz functional  int int |u|^{N+2} / |x| dx dt = int int |u|^{N+2} 4 pi r dr dt.
inline double morawetz(const SpaceTimeField& u, int N) {
    double acc = 0.0;
    for (int j = 0; j < u.nt(); ++j) {
        double inner = 0.0;
        for (int i = 0; i < u.grid.n; ++i) {
            double w = (i == 0 || i == u.grid.n - 1) ? 0.5 : 1.0;
            inner += w * std::pow(std::abs(u.at(i, j)), N + 2) * u.grid.r(i);
        }
        acc += detail::time_weight(u.times, j) * inner * u.grid.h;
    }
    return 4.0 * pi * acc;
}

enum class StrichartzFlavor { crit, free_strichartz, reversed_inf, crit2_endpoint };

inline StrichartzFlavor strichartz_flavor_from_string(const std::string& s) {
    if (s == "crit") return StrichartzFlavor::crit;
    if (s == "free") return StrichartzFlavor::free_strichartz;
    if (s == "reversed_inf") return StrichartzFlavor::reversed_inf;
    if (s == "crit2_endpoint") return StrichartzFlavor::crit2_endpoint;
    throw std::runtime_error("unknown Strichartz flavor: " + s);
}

/// Bounded-ratio diagnostic LHS-norm / RHS-expression for the selected
/// estimate. u must be the free evolution of s0.
inline double strichartz_ratio(const SpaceTimeField& u, const StatePair& s0,
                               int N, StrichartzFlavor flavor) {
    double sc = critical_sobolev_index(N);
    switch (flavor) {
        case StrichartzFlavor::crit: {
            double rhs = std::pow(sobolev_norm(s0.pos, 1.0), 4.0 / N) *
                         std::pow(lp_norm(s0.pos, infinity), 1.0 - 4.0 / N);
            double lhs = mixed_norm(u, N / 2.0, infinity);
            return rhs > 0 ? lhs / rhs : 0.0;
        }
        case StrichartzFlavor::free_strichartz: {
            double rhs = sobolev_norm(s0.pos, sc) + sobolev_norm(s0.vel, sc - 1.0);
            double lhs = mixed_norm(u, N / 2.0, infinity);
            return rhs > 0 ? lhs / rhs : 0.0;
        }
        case StrichartzFlavor::reversed_inf: {
            double rhs = sobolev_norm(s0.pos, sc) + sobolev_norm(s0.vel, sc - 1.0);
            double lhs = reversed_lorentz_norm(u, 1.5 * N, 2.0, infinity);
            return rhs > 0 ? lhs / rhs : 0.0;
        }
        case StrichartzFlavor::crit2_endpoint: {
            // ||u|^N u||_{L^1_t L^2_x} <= C ||u0||_{H^1}^5 ||u0||_inf^{N-4}
            double rhs = std::pow(sobolev_norm(s0.pos, 1.0), 5.0) *
                         std::pow(lp_norm(s0.pos, infinity), N - 4.0);
            double lhs = 0.0;
            for (int j = 0; j < u.nt(); ++j) {
                RadialField f = u.slice(j);
                RadialField nl(f.grid);
                for (int i = 0; i < f.grid.n; ++i)
                    nl[i] = std::pow(std::abs(f[i]), N) * f[i];
                lhs += detail::time_weight(u.times, j) * lp_norm(nl, 2.0);
            }
            return rhs > 0 ? lhs / rhs : 0.0;
        }
    }
    throw std::runtime_error("unknown Strichartz flavor");
}

/// Structured record of norm values. Infinite entries are kept as a labeled
/// sentinel rather than a floating overflow.
struct NormReport {
    std::map<std::string, double> values;
    std::vector<std::string> infinite;
    std::map<std::string, std::string> metadata;

    void set(const std::string& label, double v) {
        if (std::isinf(v))
            infinite.push_back(label);
        else
            values[label] = v;
    }
};

inline std::string format_param(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    if (v == static_cast<long>(v)) {
        std::snprintf(buf, sizeof(buf), "%ld", static_cast<long>(v));
    } else {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
    }
    return buf;
}

inline std::string lp_label(double p) { return "Lp(p=" + format_param(p) + ")"; }
inline std::string hdot_label(double s) { return "Hdot(s=" + format_param(s) + ")"; }
inline std::string mixed_label(double p, double q) {
    return "Lpt_Lqx(p=" + format_param(p) + ",q=" + format_param(q) + ")";
}
inline std::string reversed_label(double q, double p) {
    return "Lqx_Lpt(q=" + format_param(q) + ",p=" + format_param(p) + ")";
}
inline std::string lorentz_label(double p, double q) {
    return "Lorentz(p=" + format_param(p) + ",q=" + format_param(q) + ")";
}

}  // namespace outwave
