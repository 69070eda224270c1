#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "outwave/grid.hpp"

namespace outwave {

inline void write_field_csv(const RadialField& f, const std::string& path) {
    std::ofstream out(path);
    ensure(out.good(), "cannot open for writing: " + path);
    out << "r,value\n";
    out.precision(17);
    for (int i = 0; i < f.grid.n; ++i) out << f.grid.r(i) << ',' << f[i] << '\n';
}

inline void write_pair_csv(const StatePair& s, const std::string& path) {
    std::ofstream out(path);
    ensure(out.good(), "cannot open for writing: " + path);
    out << "r,pos,vel\n";
    out.precision(17);
    for (int i = 0; i < s.grid().n; ++i)
        out << s.grid().r(i) << ',' << s.pos[i] << ',' << s.vel[i] << '\n';
}

/// Space-time CSV in row-major order with t outer.
inline void write_spacetime_csv(const SpaceTimeField& u, const std::string& path) {
    std::ofstream out(path);
    ensure(out.good(), "cannot open for writing: " + path);
    out << "r,t,value\n";
    out.precision(17);
    for (int j = 0; j < u.nt(); ++j)
        for (int i = 0; i < u.grid.n; ++i)
            out << u.grid.r(i) << ',' << u.times[j] << ',' << u.at(i, j) << '\n';
}

namespace iodetail {

inline std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                         const std::string& header) {
    std::ifstream in(path);
    ensure(in.good(), "cannot open: " + path);
    std::string line;
    ensure(static_cast<bool>(std::getline(in, line)), "empty CSV: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ensure(line == header, "unexpected CSV header in " + path + " (want '" +
                               header + "', got '" + line + "')");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline RadialGrid grid_from_radii(const std::vector<std::vector<double>>& rows) {
    ensure(rows.size() >= 2, "CSV needs at least 2 rows");
    int n = static_cast<int>(rows.size());
    double r_max = rows.back()[0];
    RadialGrid g(r_max, n);
    for (int i = 0; i < n; ++i)
        ensure(std::abs(rows[i][0] - g.r(i)) <= 1e-9 * (1.0 + r_max),
               "CSV radii are not a uniform grid from 0");
    return g;
}

}  // namespace iodetail

inline RadialField read_field_csv(const std::string& path) {
    auto rows = iodetail::read_numeric_csv(path, "r,value");
    RadialGrid g = iodetail::grid_from_radii(rows);
    RadialField f(g);
    for (int i = 0; i < g.n; ++i) f[i] = rows[i][1];
    return f;
}

inline StatePair read_pair_csv(const std::string& path) {
    auto rows = iodetail::read_numeric_csv(path, "r,pos,vel");
    RadialGrid g = iodetail::grid_from_radii(rows);
    RadialField p(g), v(g);
    for (int i = 0; i < g.n; ++i) {
        p[i] = rows[i][1];
        v[i] = rows[i][2];
    }
    return {std::move(p), std::move(v)};
}

inline SpaceTimeField read_spacetime_csv(const std::string& path) {
    auto rows = iodetail::read_numeric_csv(path, "r,t,value");
    ensure(!rows.empty(), "empty space-time CSV");
    // t outer: count the radii of the first time block
    int n = 0;
    double t0 = rows[0][1];
    while (n < static_cast<int>(rows.size()) && rows[n][1] == t0) ++n;
    ensure(n >= 2 && rows.size() % n == 0, "malformed space-time CSV");
    int nt = static_cast<int>(rows.size()) / n;
    RadialGrid g(rows[n - 1][0], n);
    std::vector<double> times(nt);
    for (int j = 0; j < nt; ++j) times[j] = rows[static_cast<size_t>(j) * n][1];
    SpaceTimeField u(g, times);
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < n; ++i)
            u.at(i, j) = rows[static_cast<size_t>(j) * n + i][2];
    return u;
}

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double half_width = 0.0;  // 95% half-width of the slope
};

/// Ordinary least squares on (log x, log y).
inline LogLogFit loglog_fit(const std::vector<double>& xs,
                            const std::vector<double>& ys) {
    size_t m = xs.size();
    ensure(m == ys.size() && m >= 2, "loglog_fit: need matched samples, >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(m), ly(m);
    for (size_t i = 0; i < m; ++i) {
        ensure(xs[i] > 0 && ys[i] > 0, "loglog_fit: needs positive samples");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double n = static_cast<double>(m);
    double denom = n * sxx - sx * sx;
    LogLogFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    if (m > 2) {
        double ss = 0.0;
        for (size_t i = 0; i < m; ++i) {
            double resid = ly[i] - fit.slope * lx[i] - fit.intercept;
            ss += resid * resid;
        }
        double se = std::sqrt(ss / (n - 2) / (sxx - sx * sx / n));
        fit.half_width = 1.96 * se;
    }
    return fit;
}

}  // namespace outwave
