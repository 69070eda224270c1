#pragma once

#include <array>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>

#include <json.hpp>

#include "outwave/choquet.hpp"
#include "outwave/config.hpp"
#include "outwave/freeflow.hpp"
#include "outwave/io.hpp"
#include "outwave/nonlinear.hpp"
#include "outwave/norms.hpp"
#include "outwave/projections.hpp"

namespace outwave {

using ordered_json = nlohmann::ordered_json;

/// Mollified indicator of [1, 1+eps] of height L eps^{-alpha} with C^2 ramps
/// of width ramp*eps, evaluated analytically.
inline double shell_profile_value(double r, double L, double eps, double alpha,
                                  double ramp) {
    double w = ramp * eps;
    auto rampf = [](double x) {
        if (x <= 0) return 0.0;
        if (x >= 1) return 1.0;
        return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    };
    double height = L * std::pow(eps, -alpha);
    return height * rampf((r - 1.0) / w) * rampf((1.0 + eps - r) / w);
}

/// Thin-shell outgoing data of the large-data construction:
/// u0 = L eps^{-alpha} on [1, 1+eps] mollified, u1 = -(r u0)'/r.
inline StatePair make_outgoing_shell(const RadialGrid& grid, double L, double eps,
                                     double alpha, double ramp) {
    ensure(eps > 0 && eps < 1, "make_outgoing_shell: need 0 < eps < 1");
    ensure(ramp > 0 && ramp <= 0.25, "make_outgoing_shell: need ramp <= 1/4");
    RadialField u0 = RadialField::from_function(grid, [&](double r) {
        return shell_profile_value(r, L, eps, alpha, ramp);
    });
    return make_outgoing(u0);
}

struct FarSupportData {
    StatePair pair;
    double smallness = 0.0;  // ||u0||_{H^1}^2 R^{4/N - 1}
    double sup_ratio = 0.0;  // ||u0||_inf R^{1/2} / ||u0||_{H^1}
};

/// Translate a profile to [R, R + width] with outgoing velocity and report the
/// far-support smallness parameter of the dispersion corollary.
inline FarSupportData make_far_support(const RadialField& profile, double R,
                                       const RadialGrid& grid, int N) {
    RadialField u0 = RadialField::from_function(
        grid, [&](double r) { return profile.interp(r - R); });
    FarSupportData out{make_outgoing(u0), 0.0, 0.0};
    if (u0.max_abs() > 0) {
        double h1 = sobolev_norm(u0, 1.0);
        out.smallness = h1 * h1 * std::pow(R, 4.0 / N - 1.0);
        out.sup_ratio = u0.max_abs() * std::sqrt(R) / h1;
    }
    return out;
}

struct BoundedBallData {
    StatePair pair;
    double smallness = 0.0;  // ||u0||_inf R^{2/N}
    bool singular_origin = false;
};

/// Bounded data supported on B(0, R): mollified plateau with outgoing
/// velocity. u0(0) != 0, so the origin sample of u1 is flagged.
inline BoundedBallData make_bounded_ball(double amp, double R,
                                         const RadialGrid& grid, int N,
                                         double ramp_frac = 0.125) {
    double w = ramp_frac * R;
    RadialField u0 = RadialField::from_function(grid, [&](double r) {
        double x = (R - r) / w;
        if (x >= 1) return amp;
        if (x <= 0) return 0.0;
        return amp * x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    });
    BoundedBallData out;
    out.pair = make_outgoing(u0);
    // the outgoing velocity is singular at the origin; extrapolate the sample
    out.pair.vel[0] = 2.0 * out.pair.vel[1] - out.pair.vel[2];
    out.singular_origin = true;
    out.smallness = amp * std::pow(R, 2.0 / N);
    return out;
}

/// Multiscale superposition sum_j lambda_j^{-2/N} phi(r/lambda_j) with the
/// matching velocity scaling.
inline StatePair make_multiscale(const RadialField& phi, const RadialField& psi,
                                 const std::vector<double>& scales, int N,
                                 const RadialGrid& grid) {
    ensure(!scales.empty(), "make_multiscale: need at least one scale");
    for (size_t j = 1; j < scales.size(); ++j)
        ensure(scales[j] > scales[j - 1], "make_multiscale: scales must increase");
    RadialField u0(grid), u1(grid);
    for (double lam : scales) {
        double c0 = std::pow(lam, -2.0 / N);
        double c1 = std::pow(lam, -1.0 - 2.0 / N);
        for (int i = 0; i < grid.n; ++i) {
            double s = grid.r(i) / lam;
            u0[i] += c0 * phi.interp(s);
            u1[i] += c1 * psi.interp(s);
        }
    }
    return {std::move(u0), std::move(u1)};
}

struct MultibumpData {
    BumpFunction u0;
    BumpFunction u1;
    bool radial = true;  // false unless centers are collinear through 0
};

/// Far-apart bump data for the Choquet machinery.
inline MultibumpData make_multibump(const RadialField& phi, const RadialField& psi,
                                    const std::vector<Vec3>& centers) {
    ensure(!centers.empty(), "make_multibump: need centers");
    MultibumpData out;
    for (const auto& c : centers) {
        out.u0.bumps.push_back({c, 1.0, phi});
        out.u1.bumps.push_back({c, 1.0, psi});
    }
    for (const auto& c : centers) {
        Vec3 x0 = centers.front();
        double cross = std::abs(c.y * x0.z - c.z * x0.y) +
                       std::abs(c.z * x0.x - c.x * x0.z) +
                       std::abs(c.x * x0.y - c.y * x0.x);
        if (cross > 1e-12 * (1.0 + c.norm() * x0.norm())) out.radial = false;
    }
    return out;
}

struct Verdict {
    std::string criterion;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct FitRecord {
    std::string name;
    double slope = 0.0;
    double half_width = 0.0;
    double expected = 0.0;
};

struct ExperimentReport {
    std::string label;
    ordered_json echo;  // scenario parameters
    std::map<std::string, double> norms;
    std::vector<std::string> infinite_norms;
    std::vector<FitRecord> fits;
    std::vector<double> contraction_deltas;
    bool picard_converged = false;
    std::vector<Verdict> verdicts;
    std::vector<std::string> warnings;
    ordered_json provenance;
    std::vector<std::pair<double, double>> series;  // (t, sup-norm) samples
    std::map<std::string, std::vector<std::array<double, 2>>> plotdata;

    ordered_json to_json(bool with_timestamp = true) const {
        ordered_json j;
        j["schema"] = "outwave-report/1";
        j["label"] = label;
        j["scenario"] = echo;
        ordered_json jn;
        for (const auto& [k, v] : norms) jn[k] = v;
        for (const auto& k : infinite_norms) jn[k] = "infinite";
        j["norms"] = jn;
        ordered_json jf = ordered_json::array();
        for (const auto& f : fits)
            jf.push_back({{"name", f.name},
                          {"slope", f.slope},
                          {"half_width", f.half_width},
                          {"expected", f.expected}});
        j["fits"] = jf;
        j["picard"] = {{"converged", picard_converged},
                       {"deltas", contraction_deltas}};
        ordered_json jv = ordered_json::array();
        for (const auto& v : verdicts)
            jv.push_back({{"criterion", v.criterion},
                          {"pass", v.pass},
                          {"value", v.value},
                          {"tolerance", v.tolerance},
                          {"detail", v.detail}});
        j["verdicts"] = jv;
        j["warnings"] = warnings;
        j["provenance"] = provenance;
        if (with_timestamp) j["generated_at"] = timestamp();
        return j;
    }

    bool all_pass() const {
        for (const auto& v : verdicts)
            if (!v.pass) return false;
        return true;
    }

    static std::string timestamp() {
        std::time_t t = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        return buf;
    }
};

struct ShellSweepConfig {
    double T = 4.0;           // Duhamel horizon for the epsilon sweep
    int out_nr = 320;         // coarse output radii
    int out_nt = 48;          // coarse output times
    int cells_per_eps = 8;    // fine resolution: h = eps / cells_per_eps
    double picard_T = 8.0;    // horizon of the full solve at the coarsest eps
    NonlinearSign sign = NonlinearSign::defocusing;
};

namespace expdetail {

/// Sharp shell sampled with partial-cell weights, so cell integrals of the
/// indicator are near-exact.
inline double shell_cell_fraction(double r, double h, double a, double b) {
    double lo = std::max(r - 0.5 * h, a), hi = std::min(r + 0.5 * h, b);
    return hi > lo ? (hi - lo) / h : 0.0;
}

/// Streaming evaluation of Duhamel(v^{N+1}) for the sharp-shell closed-form
/// flow: same trapezoid quadrature as the generic operator, with source
/// slices generated on the fly (the eps-resolving space-time lattice would
/// not fit in memory at the small end of the sweep).
inline SpaceTimeField shell_duhamel_streamed(int N, double alpha, double L,
                                             double eps, double T, int out_nr,
                                             int out_nt, int cells_per_eps) {
    double height = L * std::pow(eps, -alpha);
    double hf = eps / cells_per_eps;
    double r_max = 1.0 + eps + T + 0.5;
    int nf = static_cast<int>(std::ceil(r_max / hf)) + 1;
    RadialGrid fine(hf * (nf - 1), nf);

    // u0 on the fine grid through cell fractions
    std::vector<double> u0(nf);
    for (int i = 0; i < nf; ++i)
        u0[i] = height * shell_cell_fraction(fine.r(i), hf, 1.0, 1.0 + eps);
    auto u0_at = [&](double r) {
        if (r < 0 || r > fine.r_max) return 0.0;
        double x = r / hf;
        int i = static_cast<int>(x);
        if (i >= nf - 1) return u0[nf - 1];
        double f = x - i;
        return u0[i] * (1.0 - f) + u0[i + 1] * f;
    };

    RadialGrid out_grid(r_max, out_nr);
    std::vector<double> out_times(out_nt);
    for (int j = 0; j < out_nt; ++j) out_times[j] = j * (T / (out_nt - 1));
    out_times[0] = 0.0;
    SpaceTimeField out(out_grid, out_times);

    double dtf = hf;
    int Mf = static_cast<int>(std::ceil(T / dtf));
    std::vector<double> C(nf);
    for (int m = 0; m < Mf; ++m) {
        double s = m * dtf;
        // C(x) = int_0^x sigma * v^{N+1}(sigma, s) dsigma, trapezoid
        C[0] = 0.0;
        double prev = 0.0;
        for (int i = 1; i < nf; ++i) {
            double r = fine.r(i);
            double v = (r <= s) ? 0.0 : ((r - s) / r) * u0_at(r - s);
            double p = 1.0;
            for (int k = 0; k <= N; ++k) p *= v;
            double g = r * p;
            C[i] = C[i - 1] + 0.5 * hf * (prev + g);
            prev = g;
        }
        double Cend = C[nf - 1];
        auto C_at = [&](double x) {
            if (x <= 0.0) return 0.0;
            if (x >= fine.r_max) return Cend;
            double xx = x / hf;
            int i = static_cast<int>(xx);
            if (i >= nf - 1) return Cend;
            double f = xx - i;
            return C[i] * (1.0 - f) + C[i + 1] * f;
        };
        double w = (m == 0) ? 0.5 * dtf : dtf;
        for (int j = 1; j < out_nt; ++j) {
            double tau = out_times[j] - s;
            if (tau <= 0.0) continue;
            for (int i = 0; i < out_nr; ++i) {
                double r = out_grid.r(i);
                double val;
                if (i == 0) {
                    double rr = tau;
                    double v = (rr <= s) ? 0.0 : ((rr - s) / rr) * u0_at(rr - s);
                    double p = 1.0;
                    for (int k = 0; k <= N; ++k) p *= v;
                    val = tau * p;
                } else {
                    val = (C_at(r + tau) - C_at(std::abs(r - tau))) / (2.0 * r);
                }
                out.at(i, j) += w * val;
            }
        }
    }
    return out;
}

}  // namespace expdetail

/// The thin-shell epsilon sweep: evolve the shell by the closed form, apply
/// the Duhamel integral to v^{N+1}, fit the weighted norms against eps, and
/// run the full Picard solve at the coarsest eps.
inline ExperimentReport run_shell_sweep(int N, double alpha, double L,
                                        const std::vector<double>& eps_list,
                                        const ShellSweepConfig& cfg = {}) {
    ensure(!eps_list.empty(), "run_shell_sweep: need epsilons");
    ExperimentReport rep;
    rep.label = "shell_sweep";
    rep.echo = {{"N", N}, {"alpha", alpha}, {"L", L}, {"eps", eps_list},
                {"T", cfg.T}};
    if (alpha >= 1.0 / (N + 1))
        rep.warnings.push_back("alpha >= 1/(N+1): outside the contraction regime");

    std::vector<double> eps_ok, wsup, wl1t;
    for (double eps : eps_list) {
        SpaceTimeField duh = expdetail::shell_duhamel_streamed(
            N, alpha, L, eps, cfg.T, cfg.out_nr, cfg.out_nt, cfg.cells_per_eps);
        double ws = weighted_sup(duh);
        double wl = weighted_l1t(duh);
        eps_ok.push_back(eps);
        wsup.push_back(ws);
        wl1t.push_back(wl);
        rep.plotdata["weighted_sup_vs_eps"].push_back({eps, ws});
        rep.plotdata["weighted_l1t_vs_eps"].push_back({eps, wl});

        // ||u0||_{L^{p_c}} echo (shape-independence of the critical norm)
        double pc = critical_lebesgue_exponent(N);
        double hf = eps / cfg.cells_per_eps;
        double height = L * std::pow(eps, -alpha);
        double lpc = 0.0;
        for (double r = 1.0 - 2 * hf; r <= 1.0 + eps + 2 * hf; r += hf) {
            double frac = expdetail::shell_cell_fraction(r, hf, 1.0, 1.0 + eps);
            lpc += 4.0 * pi * hf * std::pow(frac * height, pc) * r * r;
        }
        rep.norms["Lpc(eps=" + format_param(eps) + ")"] = std::pow(lpc, 1.0 / pc);
    }

    double expected = 1.0 - (N + 1) * alpha;
    LogLogFit f_sup = loglog_fit(eps_ok, wsup);
    LogLogFit f_l1t = loglog_fit(eps_ok, wl1t);
    rep.fits.push_back({"weighted_sup_vs_eps", f_sup.slope, f_sup.half_width,
                        expected});
    rep.fits.push_back({"weighted_l1t_vs_eps", f_l1t.slope, f_l1t.half_width,
                        expected});
    rep.verdicts.push_back({"shell-eps-scaling",
                            std::abs(f_sup.slope - expected) <= 0.1, f_sup.slope,
                            0.1, "slope of weighted sup vs eps"});

    // full Picard solve at the coarsest eps
    double eps0 = *std::max_element(eps_ok.begin(), eps_ok.end());
    double hf = eps0 / 4.0;
    double r_max = 1.0 + eps0 + cfg.picard_T + 0.5;
    int nf = static_cast<int>(std::ceil(r_max / hf)) + 1;
    RadialGrid pg(hf * (nf - 1), nf);
    StatePair shell = make_outgoing_shell(pg, L, eps0, alpha, 0.25);
    SolverConfig scfg;
    scfg.N = N;
    scfg.sign = cfg.sign;
    scfg.T = cfg.picard_T;
    scfg.dt = 2.0 * hf;
    scfg.grid = pg;
    scfg.kind = NonlinearityKind::plain_power;  // the even-N construction
    StatePair zero{RadialField(pg), RadialField(pg)};
    auto pic = picard_solve(shell, zero, scfg);
    rep.picard_converged = pic.trace.converged;
    rep.contraction_deltas = pic.trace.deltas;
    rep.norms["dispersion_LN2t_Linfx"] = pic.trace.dispersion_norm;
    rep.verdicts.push_back({"shell-picard-converges", pic.trace.converged,
                            pic.trace.deltas.empty() ? 0.0
                                                     : pic.trace.deltas.back(),
                            0.0, "Picard convergence at the coarsest eps"});

    // pointwise largeness sup_t u(r, t) >= 0.1 L / <r> at sampled radii
    bool large_ok = true;
    for (double rprobe : {2.0, 4.0, 8.0}) {
        int i = static_cast<int>(std::round(rprobe / pg.h));
        double sup = 0.0;
        for (int j = 0; j < pic.u.nt(); ++j)
            sup = std::max(sup, pic.u.at(i, j));
        double bound = 0.1 * L / japanese_bracket(pg.r(i));
        large_ok = large_ok && sup >= bound;
        rep.plotdata["largeness"].push_back({pg.r(i), sup});
        rep.series.push_back({pg.r(i), sup});
    }
    rep.verdicts.push_back({"shell-largeness", large_ok, 0.0, 0.0,
                            "sup_t u >= 0.1 L/<r> at r in {2,4,8}"});

    rep.provenance = {{"out_nr", cfg.out_nr}, {"out_nt", cfg.out_nt},
                      {"cells_per_eps", cfg.cells_per_eps},
                      {"picard_grid_n", pg.n}, {"picard_dt", scfg.dt}};
    return rep;
}

/// Declarative scenario: builders plus a diagnostics list, no logic in the
/// CLI layer.
struct Scenario {
    std::string label;
    std::string kind;  // outgoing_shell | far_support | bounded_ball |
                       // multiscale | multibump | shell_sweep
    std::map<std::string, double> params;
    std::vector<double> values;  // eps list, scales, or center spacings
    std::vector<std::string> diagnostics;
    SolverConfig solver;
    bool has_solver = false;

    static Scenario from_toml(const TomlConfig& cfg) {
        Scenario sc;
        ensure(cfg.has_table("scenario"), "config needs a [scenario] table");
        sc.label = cfg.text_or("scenario", "label", "unnamed");
        sc.kind = cfg.text("scenario", "kind");
        for (const char* key :
             {"N", "L", "alpha", "eps", "ramp", "R", "amp", "T", "dt", "grid_n",
              "rmax", "spacing", "count", "p", "scale"})
            if (cfg.has("scenario", key)) {
                auto nums = cfg.numbers("scenario", key);
                if (nums.size() == 1)
                    sc.params[key] = nums[0];
                else if (std::string(key) == "eps")
                    sc.values = nums;
            }
        if (cfg.has("scenario", "scales")) sc.values = cfg.numbers("scenario", "scales");
        if (cfg.has_table("solver")) {
            sc.has_solver = true;
            sc.solver.N = static_cast<int>(cfg.number_or("solver", "N", 6));
            sc.solver.T = cfg.number_or("solver", "T", 4.0);
            sc.solver.dt = cfg.number_or("solver", "dt", 0.0);
            sc.solver.sign = cfg.text_or("solver", "sign", "defocusing") == "focusing"
                                 ? NonlinearSign::focusing
                                 : NonlinearSign::defocusing;
            int n = static_cast<int>(cfg.number_or("solver", "grid_n", 2048));
            double rmax = cfg.number_or("solver", "rmax", 16.0);
            sc.solver.grid = RadialGrid(rmax, n);
            if (sc.solver.dt <= 0) sc.solver.dt = sc.solver.grid.h;
        }
        if (cfg.has("diagnostics", "list"))
            sc.diagnostics = cfg.texts("diagnostics", "list");
        return sc;
    }
};

/// Dispatch a scenario to the builders/solvers/norms and assemble the report.
/// Solver failures are recorded, not thrown past the runner.
inline ExperimentReport run_experiment(const Scenario& sc) {
    ExperimentReport rep;
    rep.label = sc.label;
    ordered_json echo;
    echo["kind"] = sc.kind;
    for (const auto& [k, v] : sc.params) echo[k] = v;
    rep.echo = echo;

    auto getp = [&](const std::string& key, double fallback) {
        auto it = sc.params.find(key);
        return it != sc.params.end() ? it->second : fallback;
    };
    int N = static_cast<int>(getp("N", 6));

    try {
        if (sc.kind == "shell_sweep") {
            std::vector<double> eps = sc.values;
            if (eps.empty()) eps = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
            return run_shell_sweep(N, getp("alpha", 2.0 / (3.0 * N)),
                                   getp("L", 0.25), eps);
        }

        RadialGrid grid(getp("rmax", 16.0), static_cast<int>(getp("grid_n", 2048)));
        StatePair data{RadialField(grid), RadialField(grid)};
        double smallness = 0.0;
        std::string smallness_name;

        if (sc.kind == "outgoing_shell") {
            double eps = getp("eps", 1.0 / 16);
            data = make_outgoing_shell(grid, getp("L", 0.25), eps,
                                       getp("alpha", 2.0 / (3.0 * N)),
                                       getp("ramp", 0.25));
            smallness = std::pow(eps, 1.0 / (N + 1)) * data.pos.max_abs();
            smallness_name = "eps^{1/(N+1)} ||u0||_inf";
        } else if (sc.kind == "far_support") {
            RadialGrid pg(getp("width", 1.0), 513);
            RadialField prof = RadialField::from_function(pg, [&](double r) {
                double w = getp("width", 1.0);
                double x = (r - 0.5 * w) / (0.2 * w);
                return getp("amp", 1.0) * std::exp(-x * x);
            });
            auto far = make_far_support(prof, getp("R", 8.0), grid, N);
            data = far.pair;
            smallness = far.smallness;
            smallness_name = "||u0||_{H1}^2 R^{4/N-1}";
            rep.norms["sup_ratio_R12"] = far.sup_ratio;
        } else if (sc.kind == "bounded_ball") {
            auto ball = make_bounded_ball(getp("amp", 0.1), getp("R", 2.0), grid, N);
            data = ball.pair;
            smallness = ball.smallness;
            smallness_name = "||u0||_inf R^{2/N}";
            if (ball.singular_origin)
                rep.warnings.push_back("singular-origin: u0(0) != 0");
        } else if (sc.kind == "multiscale") {
            RadialGrid pg(8.0, 513);
            RadialField phi = RadialField::from_function(pg, [](double r) {
                double x = (r - 2.0) / 0.5;
                return std::exp(-x * x);
            });
            StatePair base = make_outgoing(phi);
            std::vector<double> scales = sc.values;
            if (scales.empty()) scales = {1.0, 8.0, 64.0};
            data = make_multiscale(phi, base.vel, scales, N, grid);
            double pc = critical_lebesgue_exponent(N);
            smallness = lorentz_norm(data.pos, pc, infinity);
            smallness_name = "||u0||_{Lpc,inf}";
        } else if (sc.kind == "multibump") {
            RadialField prof = standard_profile("gaussian", getp("scale", 1.0), 513);
            std::vector<Vec3> centers;
            int count = static_cast<int>(getp("count", 8));
            double spacing = getp("spacing", 100.0);
            for (int j = 0; j < count; ++j) centers.push_back({j * spacing, 0, 0});
            double p = getp("p", 1.25 * N);
            double alpha = 3.0 - 2.0 * p / N;
            auto repmb = multibump_smallness(centers, prof, getp("amp", 0.1), p,
                                             alpha, ChoquetParams{});
            rep.norms["Lp_inf_mu_alpha"] = repmb.norm;
            rep.norms["separation_S"] = repmb.criterion;
            rep.provenance = {{"grid_n", 0}, {"kind", sc.kind}};
            return rep;
        } else {
            throw std::runtime_error("unknown scenario kind: " + sc.kind);
        }

        rep.norms["smallness:" + smallness_name] = smallness;
        rep.norms[lp_label(2.0)] = lp_norm(data.pos, 2.0);
        rep.norms[lp_label(infinity)] = lp_norm(data.pos, infinity);
        if (std::abs(data.pos[grid.n - 1]) <= 1e-8 * data.pos.max_abs()) {
            rep.norms[hdot_label(1.0)] = sobolev_norm(data.pos, 1.0);
            double sc_idx = critical_sobolev_index(N);
            rep.norms[hdot_label(sc_idx)] = sobolev_norm(data.pos, sc_idx);
        }
        auto [outgoing, residual] = is_outgoing(data, 1e-6);
        rep.norms["outgoing_residual"] = residual;

        for (const auto& diag : sc.diagnostics) {
            if (diag == "evolve" || diag == "dispersion") {
                SolverConfig scfg = sc.solver;
                if (!sc.has_solver) {
                    scfg.N = N;
                    scfg.T = 4.0;
                    scfg.grid = grid;
                    scfg.dt = grid.h;
                }
                scfg.grid = grid;
                if (scfg.dt <= 0 || scfg.dt > grid.h) scfg.dt = grid.h;
                PropagatorPlan plan{grid, scfg.T, PropagationMethod::reduction};
                plan.validate(std::max(data.pos.support_radius(),
                                       data.vel.support_radius()));
                SpaceTimeField u = reference_solve(data, scfg);
                rep.norms["dispersion_LN2t_Linfx"] =
                    mixed_norm(u, scfg.N / 2.0, infinity);
                for (int j = 0; j < u.nt(); j += std::max(1, u.nt() / 64))
                    rep.series.push_back({u.times[j], u.slice(j).max_abs()});
            } else if (diag == "picard") {
                SolverConfig scfg = sc.solver;
                scfg.grid = grid;
                if (!sc.has_solver) {
                    scfg.N = N;
                    scfg.T = 2.0;
                }
                if (scfg.dt <= 0) scfg.dt = 4.0 * grid.h;
                StatePair zero{RadialField(grid), RadialField(grid)};
                auto pic = picard_solve(data, zero, scfg);
                rep.picard_converged = pic.trace.converged;
                rep.contraction_deltas = pic.trace.deltas;
                rep.norms["dispersion_LN2t_Linfx"] = pic.trace.dispersion_norm;
            } else if (diag == "decay_fit") {
                // the decay window needs a grid covering support + 100
                double sup_r = data.pos.support_radius(1e-10);
                RadialGrid wide(sup_r + 105.0,
                                static_cast<int>((sup_r + 105.0) / grid.h) + 1);
                RadialField u0w = resample(data.pos, wide);
                std::vector<double> ts, lp4, lpi;
                for (double t = 10.0; t <= 100.0; t *= 1.3) {
                    RadialField u = outgoing_closed_form(u0w, t);
                    ts.push_back(t);
                    lp4.push_back(lp_norm(u, 4.0));
                    lpi.push_back(lp_norm(u, infinity));
                }
                LogLogFit f4 = loglog_fit(ts, lp4), fi = loglog_fit(ts, lpi);
                rep.fits.push_back({"decay_L4", f4.slope, f4.half_width, -0.5});
                rep.fits.push_back({"decay_Linf", fi.slope, fi.half_width, -1.0});
            }
        }
        rep.provenance = {{"grid_n", grid.n}, {"rmax", grid.r_max}};
    } catch (const std::exception& e) {
        rep.warnings.push_back(std::string("solver failure: ") + e.what());
    }
    return rep;
}

/// Write report.json, series.csv, and plotdata/*.csv ("x,y,series").
inline void emit_report(const ExperimentReport& rep, const std::string& dir,
                        bool with_timestamp = true) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream out(dir + "/report.json");
        ensure(out.good(), "cannot write report.json");
        out << rep.to_json(with_timestamp).dump(2) << '\n';
    }
    {
        std::ofstream out(dir + "/series.csv");
        out << "t,value\n";
        out.precision(17);
        for (auto& [t, v] : rep.series) out << t << ',' << v << '\n';
    }
    if (!rep.plotdata.empty()) {
        fs::create_directories(dir + "/plotdata");
        for (const auto& [name, rows] : rep.plotdata) {
            std::ofstream out(dir + "/plotdata/" + name + ".csv");
            out << "x,y,series\n";
            out.precision(17);
            for (const auto& xy : rows)
                out << xy[0] << ',' << xy[1] << ',' << name << '\n';
        }
    }
}

}  // namespace outwave
