#include <catch2/catch_amalgamated.hpp>

#include "outwave/experiments.hpp"
#include "test_helpers.hpp"

using namespace outwave;

TEST_CASE("make_outgoing_shell") {
    RadialGrid g(4.0, 8192);
    int N = 6;
    double alpha = 2.0 / (3.0 * N);  // 1/p_c

    SECTION("critical Lebesgue norm is eps-independent") {
        double pc = critical_lebesgue_exponent(N);
        std::vector<double> norms;
        for (double eps : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
            StatePair s = make_outgoing_shell(g, 1.0, eps, alpha, 0.25);
            norms.push_back(lp_norm(s.pos, pc));
        }
        for (double v : norms)
            REQUIRE(v == Catch::Approx(norms.front()).epsilon(0.10));
    }

    SECTION("halving eps raises the sup by 2^alpha") {
        StatePair a = make_outgoing_shell(g, 1.0, 1.0 / 16, alpha, 0.25);
        StatePair b = make_outgoing_shell(g, 1.0, 1.0 / 32, alpha, 0.25);
        REQUIRE(b.pos.max_abs() / a.pos.max_abs() ==
                Catch::Approx(std::pow(2.0, alpha)).epsilon(1e-6));
    }

    SECTION("result is outgoing") {
        StatePair s = make_outgoing_shell(g, 1.0, 1.0 / 16, alpha, 0.25);
        auto [ok, res] = is_outgoing(s, 1e-10);
        REQUIRE(ok);
    }

    SECTION("parameter validation") {
        REQUIRE_THROWS(make_outgoing_shell(g, 1.0, 2.0, alpha, 0.25));
        REQUIRE_THROWS(make_outgoing_shell(g, 1.0, 0.1, alpha, 0.5));
    }
}

TEST_CASE("make_far_support") {
    RadialGrid g(40.0, 4096);
    int N = 6;
    RadialGrid pg(1.0, 257);
    RadialField prof = RadialField::from_function(pg, [](double r) {
        double x = (r - 0.5) / 0.15;
        return std::exp(-x * x);
    });

    SECTION("zero profile gives zero pair") {
        RadialField z(pg);
        auto far = make_far_support(z, 8.0, g, N);
        REQUIRE(far.pair.pos.max_abs() == 0.0);
        REQUIRE(far.smallness == 0.0);
    }

    SECTION("H1-normalized smallness halves by 2^{4/N-1} under R doubling") {
        auto f1 = make_far_support(prof, 8.0, g, N);
        auto f2 = make_far_support(prof, 16.0, g, N);
        // normalize both pairs to unit H1 before comparing the product
        double h1a = sobolev_norm(f1.pair.pos, 1.0);
        double h1b = sobolev_norm(f2.pair.pos, 1.0);
        double s1 = f1.smallness / (h1a * h1a);
        double s2 = f2.smallness / (h1b * h1b);
        REQUIRE(s2 / s1 == Catch::Approx(std::pow(2.0, 4.0 / N - 1.0)).epsilon(1e-9));
    }

    SECTION("radial Sobolev constant is stable on the self-similar family") {
        double prev = -1.0;
        for (double R : {4.0, 8.0, 16.0}) {
            RadialGrid pgR(R, 513);
            RadialField profR = RadialField::from_function(pgR, [R](double r) {
                double x = (r - 0.5 * R) / (0.15 * R);
                return std::exp(-x * x);
            });
            auto far = make_far_support(profR, R, g, N);
            if (prev > 0) REQUIRE(far.sup_ratio == Catch::Approx(prev).epsilon(0.05));
            prev = far.sup_ratio;
        }
    }
}

TEST_CASE("make_bounded_ball and make_multiscale") {
    int N = 6;

    SECTION("bounded ball reports the right smallness product") {
        RadialGrid g(16.0, 2048);
        auto ball = make_bounded_ball(0.2, 2.0, g, N);
        REQUIRE(ball.smallness ==
                Catch::Approx(0.2 * std::pow(2.0, 2.0 / N)).epsilon(1e-12));
        REQUIRE(ball.singular_origin);
        REQUIRE(ball.pair.pos[0] == Catch::Approx(0.2));
        REQUIRE(ball.pair.pos.all_finite());
        REQUIRE(ball.pair.vel.all_finite());
    }

    SECTION("multiscale critical norm adds across well-separated scales") {
        RadialGrid pg(8.0, 1025);
        RadialField phi = RadialField::from_function(pg, [](double r) {
            double x = (r - 2.0) / 0.5;
            return std::exp(-x * x);
        });
        StatePair base = make_outgoing(phi);
        double pc = critical_lebesgue_exponent(N);
        RadialGrid g(4096.0, 262145);  // resolves scale 1 and contains 512*support
        StatePair u = make_multiscale(phi, base.vel, {1.0, 8.0, 64.0, 512.0}, N, g);
        double single = std::pow(lp_norm(phi, pc), pc);
        double total = std::pow(lp_norm(u.pos, pc), pc);
        REQUIRE(total == Catch::Approx(4.0 * single).epsilon(0.15));
    }

    SECTION("single scale reduces to the base profile") {
        RadialGrid pg(8.0, 1025);
        RadialField phi = tw::gaussian_bump(pg, 2.0, 0.5);
        StatePair base = make_outgoing(phi);
        StatePair u = make_multiscale(phi, base.vel, {1.0}, N, pg);
        REQUIRE(tw::sup_diff(u.pos, phi) <= 1e-12);
    }
}

TEST_CASE("make_multibump") {
    RadialField prof = standard_profile("gaussian", 1.0, 257);

    SECTION("single bump reduces to the base profile") {
        auto mb = make_multibump(prof, prof, {{5, 0, 0}});
        REQUIRE(mb.u0.bumps.size() == 1);
        REQUIRE(mb.radial);
        REQUIRE(mb.u0.eval({5, 0, 0}) == Catch::Approx(1.0));
    }

    SECTION("collinear-through-origin centers stay radial, others do not") {
        auto collinear = make_multibump(prof, prof, {{3, 0, 0}, {9, 0, 0}});
        REQUIRE(collinear.radial);
        auto skew = make_multibump(prof, prof, {{3, 0, 0}, {0, 5, 0}});
        REQUIRE_FALSE(skew.radial);
    }

    SECTION("criterion matches multibump_smallness") {
        std::vector<Vec3> centers{{0, 0, 0}, {50, 0, 0}, {100, 0, 0}};
        auto rep = multibump_smallness(centers, prof, 1.0, 7.5, 0.5,
                                       ChoquetParams{});
        // sup over j1 is attained at the middle bump
        double s_expected = 2.0 * std::pow(1.0 + 2500.0, -0.25);
        REQUIRE(rep.criterion == Catch::Approx(s_expected).epsilon(1e-9));
    }
}

TEST_CASE("run_shell_sweep scaling") {
    // slope of the weighted sup vs eps is 1 - (N+1) alpha; short sweep here,
    // the acceptance suite runs the full one
    int N = 6;
    ShellSweepConfig cfg;
    cfg.T = 4.0;
    auto rep = run_shell_sweep(N, 1.0 / 9.0, 0.25,
                               {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}, cfg);
    REQUIRE(rep.fits.size() >= 1);
    double expected = 1.0 - (N + 1) / 9.0;
    REQUIRE(rep.fits[0].slope == Catch::Approx(expected).margin(0.1));
    REQUIRE(rep.picard_converged);
    REQUIRE(rep.all_pass());
}

TEST_CASE("dispersion-to-smallness ratio is bounded across a far-support sweep") {
    // as R grows the smallness parameter decreases monotonically and the
    // measured dispersion norm tracks it within a fixed bracket
    int N = 6;
    double prev_small = 1e300;
    double rmin = 1e300, rmax_ratio = 0.0;
    for (double R : {4.0, 8.0, 16.0}) {
        RadialGrid g(R + 24.0, 4096);
        RadialGrid pg(1.0, 257);
        // amplitude ~ 1/R keeps the H1 norm fixed so the smallness parameter
        // decreases like R^{4/N-1}
        RadialField prof = RadialField::from_function(pg, [R](double r) {
            double x = (r - 0.5) / 0.15;
            return 0.05 * (4.0 / R) * std::exp(-x * x);
        });
        auto far = make_far_support(prof, R, g, N);
        REQUIRE(far.smallness < prev_small);
        prev_small = far.smallness;
        SolverConfig cfg;
        cfg.N = N;
        cfg.T = 4.0;
        cfg.dt = g.h;
        cfg.grid = g;
        SpaceTimeField u = reference_solve(far.pair, cfg);
        double disp = mixed_norm(u, N / 2.0, infinity);
        double ratio = disp / (sobolev_norm(far.pair.pos, 1.0) *
                               std::pow(R, 2.0 / N - 0.5));
        rmin = std::min(rmin, ratio);
        rmax_ratio = std::max(rmax_ratio, ratio);
    }
    REQUIRE(rmax_ratio / rmin <= 3.0);  // bounded bracket across the sweep
}

TEST_CASE("run_shell_sweep degenerate alpha") {
    // alpha = 0: no height scaling, slope of the weighted sup is ~1
    ShellSweepConfig cfg;
    cfg.T = 4.0;
    auto rep = run_shell_sweep(6, 0.0, 0.25,
                               {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}, cfg);
    REQUIRE(rep.fits[0].slope == Catch::Approx(1.0).margin(0.1));
}

TEST_CASE("run_experiment and emit_report") {
    SECTION("unknown kind is recorded, not thrown") {
        Scenario sc;
        sc.kind = "bogus";
        auto rep = run_experiment(sc);
        REQUIRE_FALSE(rep.warnings.empty());
    }

    SECTION("empty diagnostics produce an echo-only report") {
        Scenario sc;
        sc.label = "echo";
        sc.kind = "outgoing_shell";
        sc.params = {{"N", 6}, {"L", 0.25}, {"eps", 1.0 / 16}, {"grid_n", 2048},
                     {"rmax", 4.0}};
        auto rep = run_experiment(sc);
        REQUIRE(rep.label == "echo");
        REQUIRE(rep.warnings.empty());
        REQUIRE(rep.norms.count("smallness:eps^{1/(N+1)} ||u0||_inf") == 1);
    }

    SECTION("cor_sup far-support scenario reports dispersion and bound ratio") {
        Scenario sc;
        sc.label = "cor_sup R=8 N=6";
        sc.kind = "far_support";
        sc.params = {{"N", 6}, {"R", 8.0}, {"grid_n", 4096}, {"rmax", 16.0},
                     {"width", 1.0}, {"amp", 0.2}};
        sc.diagnostics = {"evolve"};
        auto rep = run_experiment(sc);
        REQUIRE(rep.warnings.empty());
        REQUIRE(rep.norms.count("dispersion_LN2t_Linfx") == 1);
        double disp = rep.norms["dispersion_LN2t_Linfx"];
        double h1 = rep.norms[hdot_label(1.0)];
        double bound = h1 * std::pow(8.0, 2.0 / 6.0 - 0.5);
        REQUIRE(disp > 0.0);
        REQUIRE(disp / bound < 10.0);  // bounded ratio, constant recorded
    }

    SECTION("deterministic emission apart from the timestamp") {
        Scenario sc;
        sc.label = "det";
        sc.kind = "outgoing_shell";
        sc.params = {{"N", 6}, {"grid_n", 1024}, {"rmax", 4.0}, {"eps", 0.0625}};
        auto rep = run_experiment(sc);
        emit_report(rep, "/tmp/outwave_rep1", false);
        emit_report(rep, "/tmp/outwave_rep2", false);
        std::ifstream a("/tmp/outwave_rep1/report.json"),
            b("/tmp/outwave_rep2/report.json");
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        REQUIRE(sa.str() == sb.str());
        REQUIRE(sa.str().find("outwave-report/1") != std::string::npos);
    }

    SECTION("scenario parses from TOML") {
        const char* text = R"(
[scenario]
label = "from toml"
kind = "outgoing_shell"
L = 0.25
eps = 0.0625
grid_n = 1024
rmax = 4.0

[solver]
N = 6
T = 2.0
grid_n = 1024
rmax = 4.0

[diagnostics]
list = ["decay_fit"]
)";
        Scenario sc = Scenario::from_toml(TomlConfig::parse(text));
        REQUIRE(sc.label == "from toml");
        auto rep = run_experiment(sc);
        REQUIRE(rep.warnings.empty());
        REQUIRE(rep.fits.size() == 2);
        REQUIRE(rep.fits[1].slope == Catch::Approx(-1.0).margin(0.05));
    }
}
