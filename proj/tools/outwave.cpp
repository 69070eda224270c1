// Command-line front end: project / simulate / norms / choquet / shell-sweep /
// verify. Exit codes: 0 all verdicts pass, 1 any verdict fails, 2 config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "outwave/acceptance.hpp"
#include "outwave/experiments.hpp"

using namespace outwave;
using ordered_json = nlohmann::ordered_json;

namespace {

void write_json(const ordered_json& j, const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    ensure(out.good(), "cannot write " + path);
    out << j.dump(2) << '\n';
}

std::vector<double> parse_eps_range(const std::string& spec) {
    // "2^-4..2^-9" or a comma list of numbers
    auto dots = spec.find("..");
    if (dots != std::string::npos) {
        auto parse_pow = [](const std::string& s) {
            auto caret = s.find('^');
            ensure(caret != std::string::npos && s.substr(0, caret) == "2",
                   "eps range must look like 2^-4..2^-9");
            return std::stoi(s.substr(caret + 1));
        };
        int a = parse_pow(spec.substr(0, dots));
        int b = parse_pow(spec.substr(dots + 2));
        if (a < b) std::swap(a, b);
        std::vector<double> eps;
        for (int k = a; k >= b; --k) eps.push_back(std::ldexp(1.0, k));
        return eps;
    }
    std::vector<double> eps;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) eps.push_back(std::stod(item));
    return eps;
}

StatePair build_data(const std::string& data, const RadialGrid& g, int N) {
    if (data.size() > 4 && data.substr(data.size() - 4) == ".csv")
        return read_pair_csv(data);
    if (data == "shell")
        return make_outgoing_shell(g, 0.25, 1.0 / 16.0, 2.0 / (3.0 * N), 0.25);
    if (data == "far_support") {
        RadialGrid pg(1.0, 513);
        RadialField prof = RadialField::from_function(pg, [](double r) {
            double x = (r - 0.5) / 0.15;
            return 0.2 * std::exp(-x * x);
        });
        return make_far_support(prof, 8.0, g, N).pair;
    }
    if (data == "bounded_ball") return make_bounded_ball(0.1, 2.0, g, N).pair;
    throw std::runtime_error("unknown data scenario: " + data);
}

int cmd_project(const std::string& input, const std::string& outdir) {
    StatePair s = read_pair_csv(input);
    ProjectionResult res = decompose(s);
    std::filesystem::create_directories(outdir);
    write_pair_csv(res.out_part, outdir + "/outgoing.csv");
    write_pair_csv(res.in_part, outdir + "/incoming.csv");
    auto [outgoing, residual] = is_outgoing(s, 1e-6);
    ordered_json j;
    j["completeness_residual"] = res.residual;
    j["singular_origin"] = res.singular_origin;
    j["input_is_outgoing"] = outgoing;
    j["input_outgoing_residual"] = residual;
    write_json(j, outdir + "/summary.json");
    std::cout << "wrote " << outdir << "/{outgoing,incoming}.csv, summary.json\n";
    return 0;
}

NormReport field_report(const StatePair& s, int N) {
    NormReport rep;
    for (double p : {2.0, 4.0, infinity}) rep.set(lp_label(p), lp_norm(s.pos, p));
    double sc = critical_sobolev_index(N);
    if (std::abs(s.pos[s.grid().n - 1]) <= 1e-8 * s.pos.max_abs()) {
        rep.set(hdot_label(1.0), sobolev_norm(s.pos, 1.0));
        rep.set(hdot_label(sc), sobolev_norm(s.pos, sc));
    }
    rep.set(lorentz_label(1.5 * N, infinity),
            lorentz_norm(s.pos, 1.5 * N, infinity));
    rep.set("energy(defocusing)", energy(s, N, NonlinearSign::defocusing));
    return rep;
}

ordered_json report_to_json(const NormReport& rep) {
    ordered_json j;
    for (const auto& [k, v] : rep.values) j[k] = v;
    for (const auto& k : rep.infinite) j[k] = "infinite";
    for (const auto& [k, v] : rep.metadata) j["meta:" + k] = v;
    return j;
}

int cmd_simulate(const std::string& scenario_file, const std::string& method,
                 int N, const std::string& sign, double T, double dt, int grid_n,
                 double rmax, const std::string& data, bool linear,
                 const std::string& outdir) {
    if (!scenario_file.empty()) {
        Scenario sc = Scenario::from_toml(TomlConfig::parse_file(scenario_file));
        ExperimentReport rep = run_experiment(sc);
        emit_report(rep, outdir);
        std::cout << rep.to_json(false).dump(2) << '\n';
        return rep.all_pass() ? 0 : 1;
    }
    RadialGrid g(rmax, grid_n);
    SolverConfig cfg;
    cfg.N = N;
    cfg.sign = sign == "focusing" ? NonlinearSign::focusing
                                  : NonlinearSign::defocusing;
    cfg.T = T;
    cfg.dt = dt > 0 ? dt : g.h;
    cfg.grid = g;
    cfg.linear_only = linear;
    StatePair s = build_data(data, g, N);
    std::filesystem::create_directories(outdir);

    NormReport rep = field_report(s, N);
    if (method == "fd" || method == "both") {
        SpaceTimeField u = reference_solve(s, cfg);
        write_spacetime_csv(u, outdir + "/solution_fd.csv");
        rep.set(mixed_label(N / 2.0, infinity), mixed_norm(u, N / 2.0, infinity));
        rep.set(reversed_label(infinity, 1.0), reversed_norm(u, infinity, 1.0));
        rep.set("weighted_sup", weighted_sup(u));
        rep.set("morawetz", morawetz(u, N));
        if (linear) {
            // linear-flow diagnostics: L2 drift, sup ratio, decay-fit slope
            double l2_0 = lp_norm(s.pos, 2.0), sup_0 = s.pos.max_abs();
            double drift = 0.0, sup_ratio = 0.0;
            std::vector<double> ts, sups;
            for (int j = 0; j < u.nt(); ++j) {
                RadialField slice = u.slice(j);
                drift = std::max(drift,
                                 std::abs(lp_norm(slice, 2.0) - l2_0) / l2_0);
                sup_ratio = std::max(sup_ratio, slice.max_abs() / sup_0);
                if (u.times[j] >= 0.5 * cfg.T && slice.max_abs() > 0) {
                    ts.push_back(u.times[j]);
                    sups.push_back(slice.max_abs());
                }
            }
            ordered_json jd;
            jd["l2_drift"] = drift;
            jd["sup_ratio"] = sup_ratio;
            if (ts.size() >= 3) {
                LogLogFit fit = loglog_fit(ts, sups);
                jd["decay_fit_slope"] = fit.slope;
                jd["decay_fit_half_width"] = fit.half_width;
            }
            write_json(jd, outdir + "/linear_diagnostics.json");
        }
    }
    if (method == "picard" || method == "both") {
        SolverConfig pcfg = cfg;
        if (dt <= 0) pcfg.dt = 4.0 * g.h;
        StatePair zero{RadialField(g), RadialField(g)};
        auto pic = picard_solve(s, zero, pcfg);
        write_spacetime_csv(pic.u, outdir + "/solution_picard.csv");
        ordered_json jt;
        jt["converged"] = pic.trace.converged;
        jt["deltas"] = pic.trace.deltas;
        jt["ratios"] = pic.trace.ratios();
        jt["dispersion_LN2t_Linfx"] = pic.trace.dispersion_norm;
        write_json(jt, outdir + "/picard_trace.json");
        if (!pic.trace.converged)
            std::cerr << "picard did not converge; last iterate written\n";
    }
    write_json(report_to_json(rep), outdir + "/norms.json");
    std::cout << "wrote " << outdir << "/\n";
    return 0;
}

int cmd_norms(const std::string& field_csv, const std::string& pair_csv,
              const std::string& spacetime_csv, int N, const std::string& out) {
    NormReport rep;
    if (!spacetime_csv.empty()) {
        SpaceTimeField u = read_spacetime_csv(spacetime_csv);
        rep.set(mixed_label(N / 2.0, infinity), mixed_norm(u, N / 2.0, infinity));
        rep.set(mixed_label(infinity, 2.0), mixed_norm(u, infinity, 2.0));
        rep.set(reversed_label(infinity, 3.0), reversed_norm(u, infinity, 3.0));
        rep.set(reversed_label(infinity, 1.0), reversed_norm(u, infinity, 1.0));
        rep.set("weighted_sup", weighted_sup(u));
        rep.set("weighted_l1t", weighted_l1t(u));
        rep.set("morawetz", morawetz(u, N));
    } else if (!pair_csv.empty()) {
        StatePair s = read_pair_csv(pair_csv);
        rep = field_report(s, N);
        auto [outgoing, residual] = is_outgoing(s, 1e-6);
        rep.set("outgoing_residual", residual);
    } else if (!field_csv.empty()) {
        RadialField f = read_field_csv(field_csv);
        for (double p : {1.0, 2.0, 4.0, infinity}) rep.set(lp_label(p), lp_norm(f, p));
        rep.set(lorentz_label(2.0, infinity), lorentz_norm(f, 2.0, infinity));
        if (std::abs(f[f.grid.n - 1]) <= 1e-8 * f.max_abs()) {
            rep.set(hdot_label(1.0), sobolev_norm(f, 1.0));
            rep.set(hdot_label(critical_sobolev_index(N)),
                    sobolev_norm(f, critical_sobolev_index(N)));
        }
    } else {
        throw std::runtime_error("norms: need --field, --pair, or --spacetime");
    }
    ordered_json j = report_to_json(rep);
    if (out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json(j, out);
    return 0;
}

int cmd_choquet(const std::string& input, double alpha, double p, double q,
                int levels, double lattice_spacing, const std::string& out) {
    std::ifstream in(input);
    ensure(in.good(), "cannot open " + input);
    ordered_json spec = ordered_json::parse(in);
    BumpFunction f;
    BallUnion balls;
    for (const auto& item : spec) {
        Vec3 c{item["center"][0], item["center"][1], item["center"][2]};
        double coeff = item.value("coeff", 1.0);
        std::string kind = item.value("profile", "gaussian");
        double scale = item.value("scale", 1.0);
        f.bumps.push_back({c, coeff, standard_profile(kind, scale)});
        balls.balls.push_back({c, scale});
    }
    ChoquetParams params;
    params.alpha = alpha;
    params.levels = levels;
    params.lattice_spacing = lattice_spacing;
    auto mu = outer_measure(balls, params);
    ordered_json j;
    j["alpha"] = alpha;
    j["outer_measure(profile-scale balls)"] = mu.value;
    j["argmax_center"] = {mu.argmax.x, mu.argmax.y, mu.argmax.z};
    double lcn = lorentz_choquet_norm(f, p, q, params);
    j["Lorentz_Choquet(p=" + format_param(p) + ",q=" + format_param(q) + ")"] = lcn;
    double kn = kato_norm(f, alpha / p, p, p, params);
    if (std::isinf(kn))
        j["Kato(a=" + format_param(alpha / p) + ",p=" + format_param(p) + ")"] =
            "infinite";
    else
        j["Kato(a=" + format_param(alpha / p) + ",p=" + format_param(p) + ")"] = kn;
    bool nonneg = true;
    for (const auto& b : f.bumps) nonneg = nonneg && b.coeff >= 0;
    if (nonneg && p == 1.0) j["Choquet_integral"] = choquet_integral(f, params);
    if (out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json(j, out);
    return 0;
}

int cmd_shell_sweep(int N, double alpha, double L, const std::string& eps_spec,
                    const std::string& outdir) {
    std::vector<double> eps = parse_eps_range(eps_spec);
    auto rep = run_shell_sweep(N, alpha, L, eps);
    emit_report(rep, outdir);
    std::cout << rep.to_json(false).dump(2) << '\n';
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"outwave: numerical laboratory for outgoing radial waves"};
    app.require_subcommand(1);

    auto* project = app.add_subcommand(
        "project", "split a state pair into outgoing and incoming parts");
    std::string proj_input, proj_out = "out/project";
    project->add_option("--input", proj_input, "StatePair CSV (r,pos,vel)")
        ->required();
    project->add_option("--out", proj_out, "output directory");

    auto* simulate = app.add_subcommand("simulate", "evolve initial data");
    std::string sim_scenario, sim_method = "fd", sim_sign = "defocusing",
                sim_data = "shell", sim_out = "out/simulate";
    int sim_N = 6, sim_grid_n = 2048;
    double sim_T = 4.0, sim_dt = 0.0, sim_rmax = 16.0;
    bool sim_linear = false;
    simulate->add_option("--scenario", sim_scenario, "TOML scenario file");
    simulate->add_option("--method", sim_method, "picard | fd | both")
        ->check(CLI::IsMember({"picard", "fd", "both"}));
    simulate->add_option("--N", sim_N, "nonlinearity power");
    simulate->add_option("--sign", sim_sign, "focusing | defocusing")
        ->check(CLI::IsMember({"focusing", "defocusing"}));
    simulate->add_option("--T", sim_T, "horizon");
    simulate->add_option("--dt", sim_dt, "time step (default: grid h)");
    simulate->add_option("--grid-n", sim_grid_n, "grid points");
    simulate->add_option("--rmax", sim_rmax, "grid extent");
    simulate->add_option("--data", sim_data,
                         "shell | far_support | bounded_ball | file.csv");
    simulate->add_flag("--linear", sim_linear, "disable the nonlinearity");
    simulate->add_option("--out", sim_out, "output directory");

    auto* norms = app.add_subcommand("norms", "norm report for field CSVs");
    std::string n_field, n_pair, n_st, n_out;
    int n_N = 6;
    norms->add_option("--field", n_field, "RadialField CSV (r,value)");
    norms->add_option("--pair", n_pair, "StatePair CSV (r,pos,vel)");
    norms->add_option("--spacetime", n_st, "SpaceTimeField CSV (r,t,value)");
    norms->add_option("--N", n_N, "nonlinearity power for labels");
    norms->add_option("--out", n_out, "output JSON (default: stdout)");

    auto* choquet = app.add_subcommand("choquet", "Choquet/Kato norm report");
    std::string c_input, c_out;
    double c_alpha = 1.0, c_p = 2.0, c_q = infinity, c_lattice = 0.0;
    int c_levels = 40;
    choquet->add_option("--input", c_input, "JSON bump list")->required();
    choquet->add_option("--alpha", c_alpha, "Kato weight exponent");
    choquet->add_option("--p", c_p, "Lorentz p");
    choquet->add_option("--q", c_q, "Lorentz q (inf allowed)");
    choquet->add_option("--levels", c_levels, "dyadic levels");
    choquet->add_option("--lattice-spacing", c_lattice,
                        "candidate lattice spacing");
    choquet->add_option("--out", c_out, "output JSON (default: stdout)");

    auto* sweep = app.add_subcommand("shell-sweep", "thin-shell epsilon sweep");
    int sw_N = 6;
    double sw_alpha = 1.0 / 9.0, sw_L = 0.25;
    std::string sw_eps = "2^-4..2^-9", sw_out = "out/shell_sweep";
    sweep->add_option("--N", sw_N, "nonlinearity power");
    sweep->add_option("--alpha", sw_alpha, "height exponent");
    sweep->add_option("--L", sw_L, "critical-norm size");
    sweep->add_option("--eps", sw_eps, "range like 2^-4..2^-9 or a comma list");
    sweep->add_option("--out", sw_out, "output directory");

    auto* verify =
        app.add_subcommand("verify", "run the full acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (project->parsed()) return cmd_project(proj_input, proj_out);
        if (simulate->parsed())
            return cmd_simulate(sim_scenario, sim_method, sim_N, sim_sign, sim_T,
                                sim_dt, sim_grid_n, sim_rmax, sim_data,
                                sim_linear, sim_out);
        if (norms->parsed()) return cmd_norms(n_field, n_pair, n_st, n_N, n_out);
        if (choquet->parsed())
            return cmd_choquet(c_input, c_alpha, c_p, c_q, c_levels, c_lattice,
                               c_out);
        if (sweep->parsed())
            return cmd_shell_sweep(sw_N, sw_alpha, sw_L, sw_eps, sw_out);
        if (verify->parsed()) {
            auto results = acceptance::run_all(std::cout);
            return acceptance::all_pass(results) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
