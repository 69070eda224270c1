#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace outwave {

inline void ensure(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

inline constexpr double pi = 3.14159265358979323846;

/// Uniform radial grid on [0, r_max] with nodes r_i = i*h, h = r_max/(n-1).
struct RadialGrid {
    double r_max = 1.0;
    int n = 2;
    double h = 1.0;

    RadialGrid() = default;
    RadialGrid(double r_max_, int n_) : r_max(r_max_), n(n_) {
        ensure(n >= 2, "RadialGrid: need at least 2 nodes");
        ensure(r_max > 0, "RadialGrid: r_max must be positive");
        h = r_max / (n - 1);
    }

    double r(int i) const { return i * h; }

    bool operator==(const RadialGrid& o) const {
        return n == o.n && r_max == o.r_max;
    }
    bool operator!=(const RadialGrid& o) const { return !(*this == o); }
};

/// Samples of a radial function u(r) on a uniform grid. Out-of-domain values
/// read as 0 (compact-support convention).
struct RadialField {
    RadialGrid grid;
    std::vector<double> samples;

    RadialField() = default;
    explicit RadialField(const RadialGrid& g) : grid(g), samples(g.n, 0.0) {}
    RadialField(const RadialGrid& g, std::vector<double> s)
        : grid(g), samples(std::move(s)) {
        ensure(static_cast<int>(samples.size()) == grid.n,
               "RadialField: sample count does not match grid");
    }

    template <class F>
    static RadialField from_function(const RadialGrid& g, F&& f) {
        RadialField out(g);
        for (int i = 0; i < g.n; ++i) out.samples[i] = f(g.r(i));
        return out;
    }

    int size() const { return grid.n; }
    double operator[](int i) const { return samples[i]; }
    double& operator[](int i) { return samples[i]; }

    /// Linear interpolation; 0 outside [0, r_max].
    double interp(double r) const {
        if (r < 0.0 || r > grid.r_max) return 0.0;
        double x = r / grid.h;
        int i = static_cast<int>(x);
        if (i >= grid.n - 1) return samples[grid.n - 1];
        double frac = x - i;
        return samples[i] * (1.0 - frac) + samples[i + 1] * frac;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : samples) m = std::max(m, std::abs(v));
        return m;
    }

    /// Largest node radius where |u| exceeds rel_tol * max|u|.
    double support_radius(double rel_tol = 1e-12) const {
        double thr = rel_tol * max_abs();
        for (int i = grid.n - 1; i >= 0; --i)
            if (std::abs(samples[i]) > thr) return grid.r(i);
        return 0.0;
    }

    bool all_finite() const {
        for (double v : samples)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline RadialField operator+(const RadialField& a, const RadialField& b) {
    ensure(a.grid == b.grid, "field addition: grids differ");
    RadialField out(a.grid);
    for (int i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

inline RadialField operator-(const RadialField& a, const RadialField& b) {
    ensure(a.grid == b.grid, "field subtraction: grids differ");
    RadialField out(a.grid);
    for (int i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

inline RadialField operator*(double c, const RadialField& a) {
    RadialField out(a.grid);
    for (int i = 0; i < a.size(); ++i) out[i] = c * a[i];
    return out;
}

/// (u0, u1) position/velocity data on a shared grid.
struct StatePair {
    RadialField pos;
    RadialField vel;

    StatePair() = default;
    StatePair(RadialField p, RadialField v) : pos(std::move(p)), vel(std::move(v)) {
        ensure(pos.grid == vel.grid, "StatePair: components on different grids");
    }
    const RadialGrid& grid() const { return pos.grid; }
};

inline StatePair operator+(const StatePair& a, const StatePair& b) {
    return {a.pos + b.pos, a.vel + b.vel};
}
inline StatePair operator-(const StatePair& a, const StatePair& b) {
    return {a.pos - b.pos, a.vel - b.vel};
}
inline StatePair operator*(double c, const StatePair& a) {
    return {c * a.pos, c * a.vel};
}

/// u(r_i, t_j) on grid x strictly increasing time lattice starting at 0.
struct SpaceTimeField {
    RadialGrid grid;
    std::vector<double> times;
    std::vector<double> data;  // row-major in time: data[j*n + i]

    SpaceTimeField() = default;
    SpaceTimeField(const RadialGrid& g, std::vector<double> ts)
        : grid(g), times(std::move(ts)), data(grid.n * times.size(), 0.0) {
        ensure(!times.empty() && times.front() == 0.0,
               "SpaceTimeField: time lattice must start at 0");
        for (size_t j = 1; j < times.size(); ++j)
            ensure(times[j] > times[j - 1], "SpaceTimeField: times must increase");
    }

    int nt() const { return static_cast<int>(times.size()); }
    double at(int i, int j) const { return data[static_cast<size_t>(j) * grid.n + i]; }
    double& at(int i, int j) { return data[static_cast<size_t>(j) * grid.n + i]; }

    RadialField slice(int j) const {
        RadialField out(grid);
        for (int i = 0; i < grid.n; ++i) out[i] = at(i, j);
        return out;
    }
    void set_slice(int j, const RadialField& f) {
        ensure(f.grid == grid, "set_slice: grid mismatch");
        for (int i = 0; i < grid.n; ++i) at(i, j) = f[i];
    }
};

inline std::vector<double> uniform_times(double T, double dt) {
    ensure(T > 0 && dt > 0, "uniform_times: need T, dt > 0");
    int m = static_cast<int>(std::ceil(T / dt - 1e-9));
    std::vector<double> ts(m + 1);
    for (int j = 0; j <= m; ++j) ts[j] = j * dt;
    return ts;
}

/// Trapezoid approximation of the radial-measure integral 4*pi * int f r^2 dr.
inline double integrate_radial(const RadialField& f) {
    const auto& g = f.grid;
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double w = (i == 0 || i == g.n - 1) ? 0.5 : 1.0;
        double r = g.r(i);
        acc += w * f[i] * r * r;
    }
    return 4.0 * pi * g.h * acc;
}

/// Plain trapezoid of the samples against dr (half-line measure).
inline double integrate_halfline(const RadialField& f) {
    double acc = 0.0;
    for (int i = 0; i < f.grid.n; ++i) {
        double w = (i == 0 || i == f.grid.n - 1) ? 0.5 : 1.0;
        acc += w * f[i];
    }
    return f.grid.h * acc;
}

/// Second-order derivative: central differences inside, one-sided at the ends.
inline RadialField differentiate(const RadialField& f) {
    const auto& g = f.grid;
    if (g.n < 3) throw std::runtime_error("insufficient resolution");
    RadialField out(g);
    double inv2h = 1.0 / (2.0 * g.h);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
    for (int i = 1; i < g.n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv2h;
    out[g.n - 1] = (3.0 * f[g.n - 1] - 4.0 * f[g.n - 2] + f[g.n - 3]) * inv2h;
    return out;
}

/// Cumulative integral G(r_k) = int_0^{r_k} w ds built as the exact discrete
/// inverse of `differentiate` on sequences vanishing at r=0: the even and odd
/// node chains advance by the midpoint rule G_{i+1} = G_{i-1} + 2h*w_i, and the
/// odd chain is seeded from the r=0 one-sided stencil. Second-order accurate as
/// a standalone quadrature; differentiate(cumulative_integral(w)) == w and
/// cumulative_integral(differentiate(G)) == G - G_0 up to roundoff.
inline RadialField cumulative_integral(const RadialField& w) {
    const auto& g = w.grid;
    RadialField G(g);
    if (g.n < 3) {
        if (g.n == 2) G[1] = 0.5 * g.h * (w[0] + w[1]);
        return G;
    }
    G[0] = 0.0;
    G[1] = 0.5 * g.h * (w[0] + w[1]);  // == (2h*w_0 + G_2)/4
    for (int i = 1; i + 1 < g.n; ++i) G[i + 1] = G[i - 1] + 2.0 * g.h * w[i];
    return G;
}

/// Plain cumulative trapezoid; O(h^2) with locally confined error, preferred
/// for integrands that may be rough (cumulative_integral keeps parity errors
/// alive downstream on data with unresolved jumps).
inline RadialField cumulative_trapezoid(const RadialField& w) {
    const auto& g = w.grid;
    RadialField G(g);
    for (int i = 1; i < g.n; ++i)
        G[i] = G[i - 1] + 0.5 * g.h * (w[i - 1] + w[i]);
    return G;
}

/// Linear resample onto a target grid; values beyond the source extend as 0.
inline RadialField resample(const RadialField& f, const RadialGrid& target) {
    if (f.grid == target) return f;
    RadialField out(target);
    for (int i = 0; i < target.n; ++i) out[i] = f.interp(target.r(i));
    return out;
}

}  // namespace outwave
