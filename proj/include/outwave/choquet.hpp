#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "outwave/grid.hpp"
#include "outwave/norms.hpp"

namespace outwave {

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

struct Ball {
    Vec3 center;
    double radius = 1.0;
};

struct BallUnion {
    std::vector<Ball> balls;
};

/// Finite superposition of translated radial profiles:
/// f(x) = sum_j coeff_j * profile_j(|x - center_j|).
struct BumpFunction {
    struct Bump {
        Vec3 center;
        double coeff = 1.0;
        RadialField profile;
    };
    std::vector<Bump> bumps;

    double eval(const Vec3& x) const {
        double v = 0.0;
        for (const auto& b : bumps) v += b.coeff * b.profile.interp((x - b.center).norm());
        return v;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& b : bumps) m = std::max(m, std::abs(b.coeff) * b.profile.max_abs());
        return m;
    }
};

struct ChoquetParams {
    double alpha = 1.0;          // exponent of the Kato weight |x-y|^{-alpha}
    double lattice_spacing = 0;  // candidate lattice spacing; 0 = auto
    int refine_rounds = 2;       // local refinement rounds (spacing / 4 each)
    int levels = 40;             // dyadic levels below the observed maximum
    double quad_spacing = 0;     // 3D fallback quadrature spacing; 0 = auto

    void validate() const {
        ensure(alpha >= 0.0 && alpha < 3.0, "ChoquetParams: need 0 <= alpha < 3");
        ensure(levels >= 2, "ChoquetParams: need at least 2 levels");
    }
};

namespace katodetail {

// int (A + B*tau) tau^beta dtau on [t0, t1], t0,t1 >= 0
inline double power_piece(double A, double B, double beta, double t0, double t1) {
    double p1 = beta + 1.0, p2 = beta + 2.0;
    return A * (std::pow(t1, p1) - std::pow(t0, p1)) / p1 +
           B * (std::pow(t1, p2) - std::pow(t0, p2)) / p2;
}

// int (A + B*tau) |tau|^beta dtau on [t0, t1], interval may cross 0
inline double power_piece_signed(double A, double B, double beta, double t0,
                                 double t1) {
    if (t0 >= 0.0) return power_piece(A, B, beta, t0, t1);
    if (t1 <= 0.0) return power_piece(A, -B, beta, -t1, -t0);
    return power_piece(A, -B, beta, 0.0, -t0) + power_piece(A, B, beta, 0.0, t1);
}

// int (A + B*tau) ln|tau| dtau, antiderivative continuous at 0
inline double log_piece(double A, double B, double t0, double t1) {
    auto F = [&](double t) {
        if (t == 0.0) return 0.0;
        double l = std::log(std::abs(t));
        return A * (t * l - t) + B * (0.5 * t * t * l - 0.25 * t * t);
    };
    return F(t1) - F(t0);
}

/// Contribution of one cell [s0, s1] with g(s) = s f(s) linear between
/// (s0, g0) and (s1, g1) to the spherical Kato integral at offset d:
/// I = (2 pi / d) int g(s) [(s+d)^{2-a} - |s-d|^{2-a}]/(2-a) ds  (a != 2).
inline double cell_contribution(double g0, double g1, double s0, double s1,
                                double d, double alpha) {
    if (s1 <= s0) return 0.0;
    double B = (g1 - g0) / (s1 - s0);
    if (d < 1e-12 * (s1 + 1.0)) {
        // centered limit: I = 4 pi int g(s) s^{1-a} ds
        double A = g0 - B * s0;
        return 4.0 * pi * power_piece(A, B, 1.0 - alpha, s0, s1);
    }
    double beta = 2.0 - alpha;
    double plus, minus;
    if (std::abs(beta) < 1e-9) {  // a = 2: logarithmic kernel
        double Ap = g0 - B * (s0 + d);
        double Am = g0 - B * (s0 - d);
        plus = log_piece(Ap, B, s0 + d, s1 + d);
        minus = log_piece(Am, B, s0 - d, s1 - d);
        return 2.0 * pi / d * (plus - minus);
    }
    double Ap = g0 - B * (s0 + d);
    double Am = g0 - B * (s0 - d);
    plus = power_piece(Ap, B, beta, s0 + d, s1 + d);
    minus = power_piece_signed(Am, B, beta, s0 - d, s1 - d);
    return 2.0 * pi / (d * beta) * (plus - minus);
}

/// Exact integral of |x - y|^{-alpha} over the annulus r_in <= |x| <= r_out,
/// observed from distance d = |y|.
inline double annulus_kato(double r_in, double r_out, double d, double alpha) {
    if (r_out <= r_in) return 0.0;
    // g(s) = s exactly, one cell suffices (linear in s)
    return cell_contribution(r_in, r_out, r_in, r_out, d, alpha);
}

inline double ball_kato(double R, double d, double alpha) {
    return annulus_kato(0.0, R, d, alpha);
}

/// Kato integral of |profile|^{pow} against |x-y|^{-alpha}, modeling
/// s |profile(s)|^{pow} as piecewise linear on the profile grid.
inline double profile_kato(const RadialField& profile, double pow_exp, double d,
                           double alpha) {
    const auto& g = profile.grid;
    double acc = 0.0;
    double prev = 0.0;
    for (int i = 0; i + 1 < g.n; ++i) {
        double g0 = prev;
        double g1 = g.r(i + 1) * std::pow(std::abs(profile[i + 1]), pow_exp);
        if (profile[i + 1] == 0.0) g1 = 0.0;
        if (g0 != 0.0 || g1 != 0.0)
            acc += cell_contribution(g0, g1, g.r(i), g.r(i + 1), d, alpha);
        prev = g1;
    }
    return acc;
}

/// Interval set {s : |c| profile(s) >= t} from linear interpolation between
/// profile nodes. Profiles need not be monotone.
inline std::vector<std::pair<double, double>> super_level_intervals(
    const RadialField& profile, double c, double t) {
    std::vector<std::pair<double, double>> out;
    if (c <= 0.0 || t <= 0.0) return out;
    const auto& g = profile.grid;
    double thr = t / c;
    bool inside = std::abs(profile[0]) >= thr;
    double start = 0.0;
    for (int i = 0; i + 1 < g.n; ++i) {
        double a = std::abs(profile[i]), b = std::abs(profile[i + 1]);
        bool next_inside = b >= thr;
        if (next_inside != inside) {
            double frac = (thr - a) / (b - a);
            double cross = g.r(i) + frac * g.h;
            if (inside)
                out.emplace_back(start, cross);
            else
                start = cross;
            inside = next_inside;
        }
    }
    if (inside) out.emplace_back(start, g.r_max);
    return out;
}

/// Per-center collection of radial intervals; the internal representation of
/// level sets and atom supports.
struct RegionSet {
    struct Region {
        Vec3 center;
        std::vector<std::pair<double, double>> intervals;
    };
    std::vector<Region> regions;

    bool empty() const {
        for (const auto& r : regions)
            if (!r.intervals.empty()) return false;
        return true;
    }

    double kato_at(const Vec3& y, double alpha) const {
        double acc = 0.0;
        for (const auto& r : regions) {
            double d = (y - r.center).norm();
            for (auto& [a, b] : r.intervals) acc += annulus_kato(a, b, d, alpha);
        }
        return acc;
    }

    void bounding(Vec3& lo, Vec3& hi) const {
        lo = {1e300, 1e300, 1e300};
        hi = {-1e300, -1e300, -1e300};
        for (const auto& r : regions) {
            double R = 0.0;
            for (auto& [a, b] : r.intervals) R = std::max(R, b);
            lo.x = std::min(lo.x, r.center.x - R);
            lo.y = std::min(lo.y, r.center.y - R);
            lo.z = std::min(lo.z, r.center.z - R);
            hi.x = std::max(hi.x, r.center.x + R);
            hi.y = std::max(hi.y, r.center.y + R);
            hi.z = std::max(hi.z, r.center.z + R);
        }
    }
};

/// Candidate centers for the sup over y: all region centers, pairwise
/// midpoints, and a coarse lattice over the bounding box, then local
/// refinement around the best (spacing / 4 per round).
template <class Eval>
inline std::pair<double, Vec3> maximize_over_candidates(const RegionSet& set,
                                                        const ChoquetParams& params,
                                                        Eval&& eval) {
    std::vector<Vec3> cands;
    for (const auto& r : set.regions) cands.push_back(r.center);
    size_t ncenters = cands.size();
    for (size_t i = 0; i < ncenters; ++i)
        for (size_t j = i + 1; j < ncenters; ++j)
            cands.push_back((cands[i] + cands[j]) * 0.5);
    Vec3 lo, hi;
    set.bounding(lo, hi);
    double diag = (hi - lo).norm();
    double spacing = params.lattice_spacing > 0 ? params.lattice_spacing : diag / 6.0;
    if (spacing > 0 && diag > 0) {
        for (double x = lo.x; x <= hi.x + 1e-12; x += spacing)
            for (double y = lo.y; y <= hi.y + 1e-12; y += spacing)
                for (double z = lo.z; z <= hi.z + 1e-12; z += spacing)
                    cands.push_back({x, y, z});
    }
    double best = -1e300;
    Vec3 arg{};
    for (const auto& c : cands) {
        double v = eval(c);
        if (v > best) {
            best = v;
            arg = c;
        }
    }
    double step = spacing > 0 ? spacing / 4.0 : 0.25;
    for (int round = 0; round < params.refine_rounds; ++round) {
        Vec3 base = arg;
        for (int ix = -2; ix <= 2; ++ix)
            for (int iy = -2; iy <= 2; ++iy)
                for (int iz = -2; iz <= 2; ++iz) {
                    Vec3 c{base.x + ix * step, base.y + iy * step, base.z + iz * step};
                    double v = eval(c);
                    if (v > best) {
                        best = v;
                        arg = c;
                    }
                }
        step /= 4.0;
    }
    return {best, arg};
}

inline RegionSet ball_union_regions(const BallUnion& A) {
    RegionSet set;
    for (const auto& b : A.balls)
        set.regions.push_back({b.center, {{0.0, b.radius}}});
    return set;
}

inline bool pairwise_disjoint(const BallUnion& A) {
    for (size_t i = 0; i < A.balls.size(); ++i)
        for (size_t j = i + 1; j < A.balls.size(); ++j) {
            double d = (A.balls[i].center - A.balls[j].center).norm();
            if (d < A.balls[i].radius + A.balls[j].radius - 1e-12) return false;
        }
    return true;
}

/// Midpoint-lattice quadrature of int_A |x-y|^{-alpha} for overlapping unions.
/// The cell containing y is replaced by the exact integral over a volume-
/// matched ball.
inline double lattice_kato(const BallUnion& A, const Vec3& y, double alpha,
                           const ChoquetParams& params) {
    double rmin = 1e300;
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const auto& b : A.balls) {
        rmin = std::min(rmin, b.radius);
        lo.x = std::min(lo.x, b.center.x - b.radius);
        lo.y = std::min(lo.y, b.center.y - b.radius);
        lo.z = std::min(lo.z, b.center.z - b.radius);
        hi.x = std::max(hi.x, b.center.x + b.radius);
        hi.y = std::max(hi.y, b.center.y + b.radius);
        hi.z = std::max(hi.z, b.center.z + b.radius);
    }
    double delta = params.quad_spacing > 0 ? params.quad_spacing : rmin / 24.0;
    auto inside = [&](const Vec3& x) {
        for (const auto& b : A.balls)
            if ((x - b.center).norm() <= b.radius) return true;
        return false;
    };
    double cellv = delta * delta * delta;
    double rcell = std::cbrt(3.0 * cellv / (4.0 * pi));
    double acc = 0.0;
    int nx = static_cast<int>((hi.x - lo.x) / delta) + 1;
    int ny = static_cast<int>((hi.y - lo.y) / delta) + 1;
    int nz = static_cast<int>((hi.z - lo.z) / delta) + 1;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                Vec3 x{lo.x + (i + 0.5) * delta, lo.y + (j + 0.5) * delta,
                       lo.z + (k + 0.5) * delta};
                if (!inside(x)) continue;
                double d = (x - y).norm();
                if (d <= rcell) {
                    acc += 4.0 * pi * std::pow(rcell, 3.0 - alpha) / (3.0 - alpha);
                } else {
                    acc += cellv * std::pow(d, -alpha);
                }
            }
    return acc;
}

}  // namespace katodetail

/// int_A |x-y|^{-alpha} dx. Exact radial closed forms for disjoint unions,
/// lattice quadrature with a matched singular cell otherwise.
inline double kato_integral(const BallUnion& A, const Vec3& y, double alpha,
                            const ChoquetParams& params = {}) {
    ensure(alpha < 3.0, "kato_integral: need alpha < 3");
    if (A.balls.empty()) return 0.0;
    if (katodetail::pairwise_disjoint(A)) {
        double acc = 0.0;
        for (const auto& b : A.balls)
            acc += katodetail::ball_kato(b.radius, (y - b.center).norm(), alpha);
        return acc;
    }
    return katodetail::lattice_kato(A, y, alpha, params);
}

struct OuterMeasureResult {
    double value = 0.0;
    Vec3 argmax{};
};

/// mu_alpha(A) = sup_y int_A |x-y|^{-alpha} dx over the candidate lattice
/// with local refinement; returns the max and the attaining center.
inline OuterMeasureResult outer_measure(const BallUnion& A,
                                        const ChoquetParams& params) {
    params.validate();
    if (A.balls.empty()) return {};
    auto set = katodetail::ball_union_regions(A);
    bool disjoint = katodetail::pairwise_disjoint(A);
    auto eval = [&](const Vec3& y) {
        return disjoint ? set.kato_at(y, params.alpha)
                        : katodetail::lattice_kato(A, y, params.alpha, params);
    };
    auto [v, arg] = katodetail::maximize_over_candidates(set, params, eval);
    return {v, arg};
}

namespace katodetail {

inline OuterMeasureResult outer_measure_regions(const RegionSet& set,
                                                const ChoquetParams& params) {
    if (set.empty()) return {};
    auto eval = [&](const Vec3& y) { return set.kato_at(y, params.alpha); };
    auto [v, arg] = maximize_over_candidates(set, params, eval);
    return {v, arg};
}

/// Level set {|f| >= t} as per-bump super-level intervals. Bumps sharing a
/// center must have been merged beforehand.
inline RegionSet level_set(const BumpFunction& f, double t) {
    RegionSet set;
    for (const auto& b : f.bumps) {
        auto iv = super_level_intervals(b.profile, std::abs(b.coeff), t);
        if (!iv.empty()) set.regions.push_back({b.center, std::move(iv)});
    }
    return set;
}

/// Layer-cake integral over dyadic levels anchored at the observed maximum;
/// the anchoring makes dyadic rescalings of f exact.
inline double layer_cake(const BumpFunction& f, double pow_exp,
                         const ChoquetParams& params) {
    double fmax = 0.0;
    for (const auto& b : f.bumps)
        fmax = std::max(fmax, std::abs(b.coeff) * b.profile.max_abs());
    if (fmax <= 0.0) return 0.0;
    double gmax = std::pow(fmax, pow_exp);
    int k_max = static_cast<int>(std::ceil(std::log2(gmax)));
    double acc = 0.0;
    for (int k = k_max; k > k_max - params.levels; --k) {
        double t = std::ldexp(1.0, k);
        // {|f|^pow >= t} = {|f| >= t^{1/pow}}
        RegionSet set = level_set(f, std::pow(t, 1.0 / pow_exp));
        if (set.empty()) continue;
        double mu = outer_measure_regions(set, params).value;
        acc += mu * (t - std::ldexp(1.0, k - 1));
    }
    return acc;
}

}  // namespace katodetail

/// Choquet integral int_0^inf mu_alpha({f >= t}) dt of a nonnegative bump sum
/// with radially nonincreasing profiles, by dyadic layer cake.
inline double choquet_integral(const BumpFunction& f, const ChoquetParams& params) {
    params.validate();
    for (const auto& b : f.bumps) {
        ensure(b.coeff >= 0.0, "requires nonnegative integrand");
        double prev = b.profile[0];
        for (int i = 0; i < b.profile.grid.n; ++i) {
            ensure(b.profile[i] >= 0.0, "requires nonnegative integrand");
            ensure(b.profile[i] <= prev + 1e-12 * (1.0 + std::abs(prev)),
                   "profile must be radially nonincreasing");
            prev = b.profile[i];
        }
    }
    return katodetail::layer_cake(f, 1.0, params);
}

struct RearrangementStep {
    double height;   // function value u_k (dyadic)
    double measure;  // mu_alpha({|f| >= u_k})
};

/// mu_alpha-decreasing rearrangement sampled on the dyadic level grid:
/// f*(t) = height_k for t in [measure_{k-1}, measure_k).
inline std::vector<RearrangementStep> choquet_rearrangement(
    const BumpFunction& f, const ChoquetParams& params) {
    params.validate();
    std::vector<RearrangementStep> steps;
    double fmax = f.max_abs();
    if (fmax <= 0.0) return steps;
    int k_max = static_cast<int>(std::ceil(std::log2(fmax)));
    double mono = 0.0;
    for (int k = k_max; k > k_max - params.levels; --k) {
        double u = std::ldexp(1.0, k);
        auto set = katodetail::level_set(f, u);
        double mu = set.empty() ? 0.0 : katodetail::outer_measure_regions(set, params).value;
        mono = std::max(mono, mu);
        steps.push_back({u, mono});
    }
    return steps;
}

/// Lorentz-Choquet quasinorm from the rearrangement steps.
inline double lorentz_choquet_norm(const BumpFunction& f, double p, double q,
                                   const ChoquetParams& params) {
    ensure(p >= 1.0 && !std::isinf(p), "lorentz_choquet_norm: need 1 <= p < inf");
    auto steps = choquet_rearrangement(f, params);
    if (steps.empty()) return 0.0;
    if (std::isinf(q)) {
        double best = 0.0;
        for (const auto& s : steps)
            if (s.measure > 0) best = std::max(best, s.height * std::pow(s.measure, 1.0 / p));
        return best;
    }
    // f* = height_k on [measure_{k-1}, measure_k), heights descending
    double acc = 0.0, prev = 0.0;
    double qp = q / p;
    for (const auto& s : steps) {
        if (s.measure > prev) {
            acc += std::pow(s.height, q) *
                   (std::pow(s.measure, qp) - std::pow(prev, qp)) / qp;
            prev = s.measure;
        }
    }
    return std::pow(acc, 1.0 / q);
}

/// L^p(mu_alpha) quasinorm, the Choquet integral of |f|^p through the same
/// dyadic machinery (profiles need not be monotone here).
inline double lp_choquet_norm(const BumpFunction& f, double p,
                              const ChoquetParams& params) {
    ensure(p >= 1.0, "lp_choquet_norm: need p >= 1");
    return std::pow(katodetail::layer_cake(f, p, params), 1.0 / p);
}

/// Kato norm ||f||_{K_{a,p,q}} = sup_y || |x-y|^{-a} f ||_{L^{p,q}}.
/// Integrability requires a*p < 3; otherwise the result is infinite.
inline double kato_norm(const BumpFunction& f, double a, double p, double q,
                        const ChoquetParams& params) {
    params.validate();
    ensure(p >= 1.0 && !std::isinf(p), "kato_norm: need 1 <= p < inf");
    if (a * p >= 3.0) return infinity;
    if (f.bumps.empty() || f.max_abs() == 0.0) return 0.0;
    katodetail::RegionSet set;
    for (const auto& b : f.bumps) {
        double S = b.profile.support_radius();
        if (S > 0) set.regions.push_back({b.center, {{0.0, S}}});
    }
    if (q == p) {
        // || |x-y|^{-a} f ||_{L^p}^p = sum_j int |c_j phi_j|^p |x-y|^{-ap}
        auto eval = [&](const Vec3& y) {
            double acc = 0.0;
            for (const auto& b : f.bumps) {
                double d = (y - b.center).norm();
                acc += std::pow(std::abs(b.coeff), p) *
                       katodetail::profile_kato(b.profile, p, d, a * p);
            }
            return acc;
        };
        auto [v, arg] = katodetail::maximize_over_candidates(set, params, eval);
        return std::pow(v, 1.0 / p);
    }
    // general q: sampled distribution of |x-y|^{-a} |f| on a lattice, with the
    // singular cell subdivided into shells
    Vec3 lo, hi;
    set.bounding(lo, hi);
    double diag = std::max((hi - lo).norm(), 1e-9);
    double delta = params.quad_spacing > 0 ? params.quad_spacing : diag / 48.0;
    auto lorentz_at = [&](const Vec3& y) {
        std::vector<std::pair<double, double>> cells;
        double cellv = delta * delta * delta;
        double rcell = std::cbrt(3.0 * cellv / (4.0 * pi));
        int nx = static_cast<int>((hi.x - lo.x) / delta) + 2;
        int ny = static_cast<int>((hi.y - lo.y) / delta) + 2;
        int nz = static_cast<int>((hi.z - lo.z) / delta) + 2;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                for (int k = 0; k < nz; ++k) {
                    Vec3 x{lo.x + (i + 0.5) * delta, lo.y + (j + 0.5) * delta,
                           lo.z + (k + 0.5) * delta};
                    double fv = std::abs(f.eval(x));
                    if (fv == 0.0) continue;
                    double d = (x - y).norm();
                    if (d <= rcell) {
                        // shell subdivision of the singular cell
                        double r_hi = rcell;
                        for (int m = 0; m < 12; ++m) {
                            double r_lo = r_hi / 2.0;
                            double vol = 4.0 * pi / 3.0 *
                                         (r_hi * r_hi * r_hi - r_lo * r_lo * r_lo);
                            double rep = 0.5 * (r_hi + r_lo);
                            cells.emplace_back(fv * std::pow(rep, -a), vol);
                            r_hi = r_lo;
                        }
                    } else {
                        cells.emplace_back(fv * std::pow(d, -a), cellv);
                    }
                }
        return detail::lorentz_from_cells(std::move(cells), p, q);
    };
    auto [v, arg] = katodetail::maximize_over_candidates(set, params, lorentz_at);
    return v;
}

struct AtomTerm {
    int band = 0;        // dyadic band index: |f| in [2^{band-1}, 2^band)
    double coeff = 0.0;  // c_k
    BumpFunction atom;   // L^p(mu_alpha)-normalized piece
};

/// Dyadic height slices a_k = chi_{|f| in [2^{k-1}, 2^k)} f, normalized so
/// that ||a||_inf^p mu_alpha(supp a) = 1; sum_k c_k a_k reproduces f.
inline std::vector<AtomTerm> atomic_decompose(const BumpFunction& f, double p,
                                              const ChoquetParams& params) {
    params.validate();
    std::vector<AtomTerm> out;
    double fmax = f.max_abs();
    if (fmax <= 0.0) return out;
    // bands (2^{k-1}, 2^k]; the top band is the one containing the maximum
    int k_max = static_cast<int>(std::ceil(std::log2(fmax)));
    for (int k = k_max; k > k_max - params.levels; --k) {
        double hi = std::ldexp(1.0, k), lo = std::ldexp(1.0, k - 1);
        double lo_open = lo * (1.0 + 1e-13), hi_open = hi * (1.0 + 1e-13);
        katodetail::RegionSet support;
        BumpFunction slice;
        double sup_val = 0.0;
        for (const auto& b : f.bumps) {
            auto in_lo = katodetail::super_level_intervals(
                b.profile, std::abs(b.coeff), lo_open);
            if (in_lo.empty()) continue;
            auto in_hi = katodetail::super_level_intervals(
                b.profile, std::abs(b.coeff), hi_open);
            // band = {|c phi| > lo} minus {|c phi| > hi}
            std::vector<std::pair<double, double>> band;
            size_t ih = 0;
            for (auto [a0, b0] : in_lo) {
                double cur = a0;
                while (ih < in_hi.size() && in_hi[ih].second <= b0 + 1e-15) {
                    if (in_hi[ih].first > cur) band.emplace_back(cur, in_hi[ih].first);
                    cur = in_hi[ih].second;
                    ++ih;
                }
                if (cur < b0) band.emplace_back(cur, b0);
            }
            if (band.empty()) continue;
            support.regions.push_back({b.center, band});
            // banded profile: profile restricted to the band in value
            RadialField bp(b.profile.grid);
            for (int i = 0; i < bp.grid.n; ++i) {
                double v = std::abs(b.coeff) * std::abs(b.profile[i]);
                bp[i] = (v > lo && v <= hi) ? b.profile[i] : 0.0;
                if (bp[i] != 0.0)
                    sup_val = std::max(sup_val, std::abs(b.coeff * bp[i]));
            }
            slice.bumps.push_back({b.center, b.coeff, std::move(bp)});
        }
        if (slice.bumps.empty() || sup_val <= 0.0) continue;
        double mu = katodetail::outer_measure_regions(support, params).value;
        double c_k = sup_val * std::pow(mu, 1.0 / p);
        if (c_k <= 0.0) continue;
        BumpFunction atom = slice;
        for (auto& b : atom.bumps) b.coeff /= c_k;
        out.push_back({k, c_k, std::move(atom)});
    }
    return out;
}

namespace katodetail {

/// Merge bump lists sharing centers: same-center profiles are resampled onto
/// the finer grid and added with their coefficients folded in.
inline BumpFunction merge_bumps(const BumpFunction& f, const BumpFunction& g) {
    BumpFunction out;
    auto add = [&](const BumpFunction::Bump& b) {
        for (auto& ob : out.bumps) {
            if ((ob.center - b.center).norm() <= 1e-12) {
                const RadialGrid& ga = ob.profile.grid;
                const RadialGrid& gb = b.profile.grid;
                RadialGrid fine = (ga.h <= gb.h) ? ga : gb;
                if (fine.r_max < std::max(ga.r_max, gb.r_max))
                    fine = RadialGrid(std::max(ga.r_max, gb.r_max),
                                      static_cast<int>(std::max(ga.r_max, gb.r_max) /
                                                       std::min(ga.h, gb.h)) + 1);
                RadialField sum(fine);
                for (int i = 0; i < fine.n; ++i)
                    sum[i] = ob.coeff * ob.profile.interp(fine.r(i)) +
                             b.coeff * b.profile.interp(fine.r(i));
                ob.profile = std::move(sum);
                ob.coeff = 1.0;
                return;
            }
        }
        out.bumps.push_back(b);
    };
    for (const auto& b : f.bumps) add(b);
    for (const auto& b : g.bumps) add(b);
    return out;
}

}  // namespace katodetail

/// ||f + g||_{L^p(mu_alpha)} / (||f|| + ||g||); the quasinorm bound is
/// (p+1)^{1/p} for integer p.
inline double quasi_triangle_ratio(const BumpFunction& f, const BumpFunction& g,
                                   double p, const ChoquetParams& params) {
    ensure(p >= 1.0, "quasi_triangle_ratio: need p >= 1");
    double nf = lp_choquet_norm(f, p, params);
    double ng = lp_choquet_norm(g, p, params);
    if (nf + ng == 0.0) return 0.0;
    BumpFunction sum = katodetail::merge_bumps(f, g);
    double ns = lp_choquet_norm(sum, p, params);
    return ns / (nf + ng);
}

struct FractionalIntegralResult {
    BumpFunction field;          // same centers, convolved profiles
    std::vector<double> values;  // (f * |x|^{-beta})(x_e) at the eval centers
};

/// Riesz-type convolution f * |x|^{-beta} evaluated by the exact radial
/// kernel reduction per bump; the result keeps the bump structure.
inline FractionalIntegralResult fractional_integrate(
    const BumpFunction& f, double beta, const std::vector<Vec3>& eval_centers,
    const ChoquetParams& params, double out_extent = 0.0, int out_n = 1025) {
    ensure(beta > 0.0 && beta < 3.0, "fractional_integrate: need 0 < beta < 3");
    (void)params;
    FractionalIntegralResult res;
    for (const auto& b : f.bumps) {
        double S = std::max(b.profile.support_radius(), b.profile.grid.h);
        double ext = out_extent > 0 ? out_extent : 16.0 * S;
        RadialGrid og(ext, out_n);
        RadialField conv(og);
        for (int i = 0; i < og.n; ++i)
            conv[i] = katodetail::profile_kato(b.profile, 1.0, og.r(i), beta);
        res.field.bumps.push_back({b.center, b.coeff, std::move(conv)});
    }
    for (const auto& x : eval_centers) {
        double v = 0.0;
        for (const auto& b : res.field.bumps)
            v += b.coeff * b.profile.interp((x - b.center).norm());
        res.values.push_back(v);
    }
    return res;
}

namespace katodetail {

/// Pointwise power of a bump sum: exact per bump, valid when distinct centers
/// have disjoint supports.
inline BumpFunction bump_power(const BumpFunction& f, int m) {
    for (size_t i = 0; i < f.bumps.size(); ++i)
        for (size_t j = i + 1; j < f.bumps.size(); ++j) {
            double d = (f.bumps[i].center - f.bumps[j].center).norm();
            ensure(d >= f.bumps[i].profile.support_radius() +
                           f.bumps[j].profile.support_radius() - 1e-9,
                   "bump_power: overlapping bumps are unsupported");
        }
    BumpFunction out;
    for (const auto& b : f.bumps) {
        RadialField prof(b.profile.grid);
        for (int i = 0; i < prof.grid.n; ++i) {
            double v = 1.0;
            for (int k = 0; k < m; ++k) v *= b.profile[i];
            prof[i] = v;
        }
        double c = 1.0;
        for (int k = 0; k < m; ++k) c *= b.coeff;
        out.bumps.push_back({b.center, c, std::move(prof)});
    }
    return out;
}

}  // namespace katodetail

/// One application of the closed-loop map u -> u^{N+1} * |x|^{-1}.
inline BumpFunction closed_loop_map(const BumpFunction& u, int N,
                                    const ChoquetParams& params) {
    BumpFunction powed = katodetail::bump_power(u, N + 1);
    return fractional_integrate(powed, 1.0, {}, params).field;
}

/// ||M(u1) - M(u2)||_{L^{p,inf}(mu_alpha)} / ||u1 - u2||_{L^{p,inf}(mu_alpha)}
/// for the closed-loop map, with alpha = 3 - 2p/N enforced.
inline double contraction_ratio(const BumpFunction& u1, const BumpFunction& u2,
                                int N, double p, double alpha,
                                ChoquetParams params) {
    ensure(N + 1 < p && p < 1.5 * N, "contraction_ratio: need N+1 < p < 3N/2");
    ensure(std::abs(alpha - (3.0 - 2.0 * p / N)) < 1e-9,
           "contraction_ratio: alpha must equal 3 - 2p/N");
    params.alpha = alpha;
    BumpFunction m1 = closed_loop_map(u1, N, params);
    BumpFunction m2 = closed_loop_map(u2, N, params);
    BumpFunction dm;
    {
        BumpFunction neg = m2;
        for (auto& b : neg.bumps) b.coeff = -b.coeff;
        dm = katodetail::merge_bumps(m1, neg);
    }
    BumpFunction du;
    {
        BumpFunction neg = u2;
        for (auto& b : neg.bumps) b.coeff = -b.coeff;
        du = katodetail::merge_bumps(u1, neg);
    }
    double denom = lorentz_choquet_norm(du, p, infinity, params);
    double numer = lorentz_choquet_norm(dm, p, infinity, params);
    return denom > 0 ? numer / denom : 0.0;
}

struct MultibumpReport {
    double norm = 0.0;       // L^{p,inf}(mu_alpha) quasinorm of the bump sum
    double criterion = 0.0;  // S = sup_{j1} sum_{j2 != j1} <y_j2 - y_j1>^{-alpha}
};

/// Quasinorm of eps * sum_j bump(x - y_j) together with the separation
/// criterion S that controls it.
inline MultibumpReport multibump_smallness(const std::vector<Vec3>& centers,
                                           const RadialField& bump, double eps,
                                           double p, double alpha,
                                           ChoquetParams params) {
    ensure(!centers.empty(), "multibump_smallness: need at least one center");
    for (size_t i = 0; i < centers.size(); ++i)
        for (size_t j = i + 1; j < centers.size(); ++j)
            ensure((centers[i] - centers[j]).norm() > 1e-12,
                   "multibump_smallness: centers must be distinct");
    params.alpha = alpha;
    BumpFunction f;
    for (const auto& c : centers) f.bumps.push_back({c, eps, bump});
    MultibumpReport rep;
    rep.norm = lorentz_choquet_norm(f, p, infinity, params);
    for (size_t j1 = 0; j1 < centers.size(); ++j1) {
        double s = 0.0;
        for (size_t j2 = 0; j2 < centers.size(); ++j2) {
            if (j2 == j1) continue;
            double d = (centers[j2] - centers[j1]).norm();
            s += std::pow(1.0 + d * d, -0.5 * alpha);
        }
        rep.criterion = std::max(rep.criterion, s);
    }
    return rep;
}

/// Profiles for the CLI and scenario builders.
inline RadialField standard_profile(const std::string& kind, double scale,
                                    int n = 1025) {
    ensure(scale > 0, "standard_profile: scale must be positive");
    if (kind == "gaussian") {
        RadialGrid g(8.0 * scale, n);
        return RadialField::from_function(g, [=](double r) {
            double x = r / scale;
            return std::exp(-x * x);
        });
    }
    if (kind == "indicator") {
        RadialGrid g(2.0 * scale, n);
        return RadialField::from_function(
            g, [=](double r) { return r <= scale ? 1.0 : 0.0; });
    }
    if (kind == "shell") {
        RadialGrid g(4.0 * scale, n);
        return RadialField::from_function(g, [=](double r) {
            double w = 0.25 * scale;
            auto ramp = [](double x) {
                if (x <= 0) return 0.0;
                if (x >= 1) return 1.0;
                return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
            };
            return ramp((r - scale) / w) * ramp((2.0 * scale - r) / w);
        });
    }
    throw std::runtime_error("unknown profile kind: " + kind);
}

}  // namespace outwave
