#pragma once

#include <sstream>

#include "outwave/freeflow.hpp"
#include "outwave/norms.hpp"
#include "outwave/projections.hpp"

namespace outwave {

enum class NonlinearityKind {
    odd_power,   // |u|^N u, valid for all integer N
    plain_power  // u^{N+1}, the even-N convention of the thin-shell theorem
};

struct SolverConfig {
    int N = 6;
    NonlinearSign sign = NonlinearSign::defocusing;
    double T = 1.0;
    double dt = 0.0;
    int max_iter = 25;
    double tol = 1e-10;  // contraction tolerance, relative to the data scale
    RadialGrid grid;
    NonlinearityKind kind = NonlinearityKind::odd_power;
    bool linear_only = false;  // disable the nonlinearity (coefficient 0)

    void validate() const {
        ensure(N >= 2, "SolverConfig: N must be >= 2");
        ensure(T > 0 && dt > 0, "SolverConfig: need T, dt > 0");
        ensure(max_iter >= 1, "SolverConfig: max_iter >= 1");
    }
};

struct PicardTrace {
    std::vector<double> deltas;  // ||w_{k+1} - w_k|| in L^inf_t L^2_x
    bool converged = false;
    double dispersion_norm = 0.0;  // L^{N/2}_t L^inf_x of the solution

    std::vector<double> ratios() const {
        std::vector<double> out;
        for (size_t k = 1; k < deltas.size(); ++k)
            out.push_back(deltas[k - 1] > 0 ? deltas[k] / deltas[k - 1] : 0.0);
        return out;
    }
};

namespace detail {

inline double nonlin_value(double u, int N, NonlinearityKind kind) {
    if (kind == NonlinearityKind::plain_power) {
        double p = 1.0;
        for (int k = 0; k <= N; ++k) p *= u;
        return p;
    }
    double a = std::abs(u), p = u;
    for (int k = 0; k < N; ++k) p *= a;
    return p;
}

/// Sign of the Duhamel source: u = Phi(data) + sigma * int sin((t-s))/sqrt F,
/// sigma = -1 defocusing, +1 focusing.
inline double duhamel_sign(NonlinearSign s) {
    return s == NonlinearSign::defocusing ? -1.0 : 1.0;
}

}  // namespace detail

/// Finite-difference reference solver: leapfrog on z = r u, which obeys
/// z_tt = z_rr -+ r |z/r|^N (z/r) with z(0,t) = 0. Second order in space and
/// time; dt <= h is the CFL bound (dt = h propagates the linear part exactly).
inline SpaceTimeField reference_solve(const StatePair& s, const SolverConfig& cfg) {
    cfg.validate();
    const RadialGrid& g = s.grid();
    ensure(cfg.dt <= g.h * (1.0 + 1e-12), "CFL violation: dt must be <= h");
    double support = std::max(s.pos.support_radius(), s.vel.support_radius());
    ensure(support + cfg.T <= g.r_max + 1e-9, "domain too small");

    auto times = uniform_times(cfg.T, cfg.dt);
    SpaceTimeField out(g, times);
    int n = g.n;
    double dt = cfg.dt, h = g.h;
    double lam = (dt * dt) / (h * h);
    double nl_coeff = cfg.linear_only ? 0.0 : 1.0;
    double sg = detail::duhamel_sign(cfg.sign);  // z_tt = z_rr + sg * r f(u)

    std::vector<double> zm(n), z(n), zp(n);
    for (int i = 0; i < n; ++i) zm[i] = g.r(i) * s.pos[i];

    auto record = [&](const std::vector<double>& zz, int j) {
        RadialField u(g);
        for (int i = 1; i < n; ++i) u[i] = zz[i] / g.r(i);
        u[0] = (4.0 * zz[1] - zz[2]) / (2.0 * h);  // u(0) = z_r(0)
        out.set_slice(j, u);
    };
    record(zm, 0);
    double sup0 = out.slice(0).max_abs() + 1e-300;

    // first step by Taylor expansion, z(0) = 0 held at the origin
    z[0] = 0.0;
    for (int i = 1; i < n - 1; ++i) {
        double u = zm[i] / g.r(i);
        double zrr = zm[i + 1] - 2.0 * zm[i] + zm[i - 1];
        double f = nl_coeff * sg * g.r(i) * detail::nonlin_value(u, cfg.N, cfg.kind);
        z[i] = zm[i] + dt * g.r(i) * s.vel[i] + 0.5 * lam * zrr + 0.5 * dt * dt * f;
    }
    z[n - 1] = 0.0;
    if (out.nt() > 1) record(z, 1);

    for (int j = 2; j < out.nt(); ++j) {
        zp[0] = 0.0;
        for (int i = 1; i < n - 1; ++i) {
            double u = z[i] / g.r(i);
            double zrr = z[i + 1] - 2.0 * z[i] + z[i - 1];
            double f = nl_coeff * sg * g.r(i) * detail::nonlin_value(u, cfg.N, cfg.kind);
            zp[i] = 2.0 * z[i] - zm[i] + lam * zrr + dt * dt * f;
        }
        zp[n - 1] = 0.0;
        std::swap(zm, z);
        std::swap(z, zp);
        record(z, j);
        if (j % 16 == 0 || j == out.nt() - 1) {
            double m = out.slice(j).max_abs();
            if (!std::isfinite(m) || m > 1e8 * sup0) {
                std::ostringstream msg;
                msg << "solution blew up at t=" << times[j];
                throw std::runtime_error(msg.str());
            }
        }
    }
    return out;
}

/// Pair (u, u_t) at the final time of a reference solve, the velocity by a
/// one-sided second-order difference of the stored slices.
inline StatePair final_state(const SpaceTimeField& u) {
    int M = u.nt() - 1;
    ensure(M >= 2, "final_state: need at least 3 time slices");
    double dt = u.times[M] - u.times[M - 1];
    RadialField vel(u.grid);
    for (int i = 0; i < u.grid.n; ++i)
        vel[i] = (3.0 * u.at(i, M) - 4.0 * u.at(i, M - 1) + u.at(i, M - 2)) /
                 (2.0 * dt);
    return {u.slice(M), vel};
}

struct PicardResult {
    SpaceTimeField u;
    PicardTrace trace;
};

/// Duhamel/Picard fixed-point scheme: v = free flow of v_data, and
/// w_{k+1} = Phi_0(w_data) + sigma * Duhamel(nonlin(v + w_k)), iterated until
/// the L^inf_t L^2_x update norm drops below tol * scale. Non-convergence
/// flags the trace and returns the last iterate.
inline PicardResult picard_solve(const StatePair& v_data, const StatePair& w_data,
                                 const SolverConfig& cfg) {
    cfg.validate();
    const RadialGrid& g = v_data.grid();
    ensure(w_data.grid() == g, "picard_solve: data on different grids");
    auto times = uniform_times(cfg.T, cfg.dt);
    int M = static_cast<int>(times.size());

    SpaceTimeField v(g, times), phi_w(g, times);
    {
        FreeFlow vflow(v_data);
        for (int j = 0; j < M; ++j) v.set_slice(j, vflow.position(times[j]));
        if (w_data.pos.max_abs() > 0 || w_data.vel.max_abs() > 0) {
            FreeFlow wflow(w_data);
            for (int j = 0; j < M; ++j) phi_w.set_slice(j, wflow.position(times[j]));
        }
    }

    double sigma = detail::duhamel_sign(cfg.sign);
    double nl_coeff = cfg.linear_only ? 0.0 : 1.0;
    double scale = 0.0;
    for (int j = 0; j < M; ++j)
        scale = std::max(scale, l2_radial(v.slice(j)) + l2_radial(phi_w.slice(j)));
    scale = std::max(scale, 1e-300);

    SpaceTimeField w = phi_w;
    PicardTrace trace;
    SpaceTimeField F(g, times);
    for (int it = 0; it < cfg.max_iter; ++it) {
        for (int j = 0; j < M; ++j)
            for (int i = 0; i < g.n; ++i)
                F.at(i, j) = nl_coeff * detail::nonlin_value(v.at(i, j) + w.at(i, j),
                                                             cfg.N, cfg.kind);
        SpaceTimeField duh = duhamel_all(F);
        SpaceTimeField w_next(g, times);
        for (int j = 0; j < M; ++j)
            for (int i = 0; i < g.n; ++i)
                w_next.at(i, j) = phi_w.at(i, j) + sigma * duh.at(i, j);

        double delta = 0.0;
        for (int j = 0; j < M; ++j) {
            RadialField diff = w_next.slice(j) - w.slice(j);
            delta = std::max(delta, l2_radial(diff));
        }
        trace.deltas.push_back(delta);
        w = std::move(w_next);
        if (!std::isfinite(delta) || delta > 1e8 * scale) break;  // diverging
        if (delta <= cfg.tol * scale) {
            trace.converged = true;
            break;
        }
    }

    SpaceTimeField u(g, times);
    for (int j = 0; j < M; ++j)
        for (int i = 0; i < g.n; ++i) u.at(i, j) = v.at(i, j) + w.at(i, j);
    trace.dispersion_norm = mixed_norm(u, cfg.N / 2.0, infinity);
    return {std::move(u), std::move(trace)};
}

struct ScatteringResult {
    StatePair state;   // (w0+, w1+)
    double tail_norm;  // ||nonlin(u)||_{L^1_t L^2_x} over the last 20% of [0,T]
};

/// Scattering-state extraction truncated at the run horizon:
/// w0+ = w0 - sigma int_0^T sin(s sqrt(-Lap))/sqrt(-Lap) F(s) ds,
/// w1+ = w1 + sigma int_0^T cos(s sqrt(-Lap)) F(s) ds, with F = nonlin(u)
/// and sigma the Duhamel sign of the equation.
inline ScatteringResult scattering_state(const SpaceTimeField& u,
                                         const StatePair& w_data,
                                         const SolverConfig& cfg) {
    const RadialGrid& g = u.grid;
    ensure(w_data.grid() == g, "scattering_state: grid mismatch");
    double sigma = detail::duhamel_sign(cfg.sign);
    double nl_coeff = cfg.linear_only ? 0.0 : 1.0;
    RadialField acc_sin(g), acc_cos(g);
    double tail = 0.0;
    double T = u.times.back();
    for (int j = 0; j < u.nt(); ++j) {
        RadialField f(g);
        for (int i = 0; i < g.n; ++i)
            f[i] = nl_coeff * detail::nonlin_value(u.at(i, j), cfg.N, cfg.kind);
        double w = detail::time_weight(u.times, j);
        double s = u.times[j];
        if (s > 0) {
            RadialField ks = sine_propagator(f, s, /*strict=*/false);
            RadialField kc = cosine_propagator(f, s);
            for (int i = 0; i < g.n; ++i) {
                acc_sin[i] += w * ks[i];
                acc_cos[i] += w * kc[i];
            }
        } else {
            for (int i = 0; i < g.n; ++i) acc_cos[i] += w * f[i];
        }
        if (s >= 0.8 * T) tail += w * l2_radial(f);
    }
    RadialField w0p(g), w1p(g);
    for (int i = 0; i < g.n; ++i) {
        w0p[i] = w_data.pos[i] - sigma * acc_sin[i];
        w1p[i] = w_data.vel[i] + sigma * acc_cos[i];
    }
    return {StatePair{std::move(w0p), std::move(w1p)}, tail};
}

struct ProbeRow {
    double amplitude;
    double horizon;
    bool converged;
    double final_ratio;
};

/// Local-existence probe: for each amplitude a, run Picard on [0, c a^{-N/2}]
/// and record convergence. The scaling law of Prop-type local existence makes
/// the verdict amplitude-uniform.
inline std::vector<ProbeRow> local_existence_probe(const StatePair& s, int N,
                                                   double c,
                                                   const std::vector<double>& amps,
                                                   NonlinearSign sign =
                                                       NonlinearSign::defocusing) {
    auto [outgoing, residual] = is_outgoing(s, 1e-6);
    ensure(outgoing, "local_existence_probe: data must be outgoing");
    std::vector<ProbeRow> rows;
    for (double a : amps) {
        double T = c * std::pow(a * s.pos.max_abs(), -0.5 * N);
        SolverConfig cfg;
        cfg.N = N;
        cfg.sign = sign;
        cfg.T = T;
        cfg.dt = T / 32.0;
        cfg.grid = s.grid();
        cfg.max_iter = 20;
        cfg.tol = 1e-9;
        StatePair data = a * s;
        auto res = picard_solve(data, StatePair{RadialField(s.grid()),
                                                RadialField(s.grid())},
                                cfg);
        auto ratios = res.trace.ratios();
        rows.push_back({a, T, res.trace.converged,
                        ratios.empty() ? 0.0 : ratios.back()});
    }
    return rows;
}

}  // namespace outwave
