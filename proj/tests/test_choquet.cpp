#include <catch2/catch_amalgamated.hpp>

#include "outwave/choquet.hpp"
#include "test_helpers.hpp"

using namespace outwave;

namespace {

double ball_measure_oracle(double R, double alpha) {
    // int_{B(0,R)} |x|^{-alpha} dx = 4 pi R^{3-alpha} / (3-alpha)
    return 4.0 * pi * std::pow(R, 3.0 - alpha) / (3.0 - alpha);
}

BumpFunction single(const Vec3& c, double coeff, const RadialField& prof) {
    BumpFunction f;
    f.bumps.push_back({c, coeff, prof});
    return f;
}

RadialField indicator_profile(double R, int n = 1025) {
    RadialGrid g(2.0 * R, n);
    return RadialField::from_function(g, [=](double r) { return r <= R ? 1.0 : 0.0; });
}

double lens_volume(double R1, double R2, double d) {
    // volume of the intersection of two balls at distance d
    double t = R1 + R2 - d;
    return pi * t * t *
           (d * d + 2.0 * d * (R1 + R2) - 3.0 * (R1 - R2) * (R1 - R2)) /
           (12.0 * d);
}

}  // namespace

TEST_CASE("kato_integral oracles") {
    ChoquetParams params;

    SECTION("unit ball observed from its center") {
        BallUnion A{{Ball{{0, 0, 0}, 1.0}}};
        double v = kato_integral(A, {0, 0, 0}, 1.0, params);
        REQUIRE(v == Catch::Approx(2.0 * pi).epsilon(1e-10));
    }

    SECTION("far field looks like vol / d^alpha") {
        BallUnion A{{Ball{{0, 0, 0}, 1.0}}};
        double v = kato_integral(A, {100, 0, 0}, 1.0, params);
        REQUIRE(v == Catch::Approx((4.0 * pi / 3.0) / 100.0).epsilon(0.01));
    }

    SECTION("alpha = 0 recovers Lebesgue volume, two overlapping balls") {
        BallUnion A{{Ball{{0, 0, 0}, 1.0}, Ball{{1.0, 0, 0}, 1.0}}};
        double oracle = 2.0 * (4.0 * pi / 3.0) - lens_volume(1.0, 1.0, 1.0);
        double v = kato_integral(A, {0.3, 0.2, -0.1}, 0.0, params);
        REQUIRE(v == Catch::Approx(oracle).epsilon(0.02));
    }

    SECTION("interior observation point, alpha = 2") {
        BallUnion A{{Ball{{0, 0, 0}, 1.0}}};
        double v = kato_integral(A, {0.5, 0, 0}, 2.0, params);
        // closed form 4 pi (1/2 + log(3)/2 - log(2)/8 - log(3/2)/8)
        double oracle = 4.0 * pi *
                        (0.5 + 0.5 * std::log(3.0) - std::log(2.0) / 8.0 -
                         std::log(1.5) / 8.0);
        REQUIRE(v == Catch::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("outer_measure") {
    ChoquetParams params;

    SECTION("single ball: closed form, argmax at the center") {
        for (double alpha : {0.5, 1.0, 2.0}) {
            for (double R : {0.5, 1.0, 2.0}) {
                params.alpha = alpha;
                Vec3 c{1.3, -0.7, 2.1};
                BallUnion A{{Ball{c, R}}};
                auto res = outer_measure(A, params);
                REQUIRE(res.value ==
                        Catch::Approx(ball_measure_oracle(R, alpha)).epsilon(0.02));
                REQUIRE((res.argmax - c).norm() <= 0.05 * R);
            }
        }
    }

    SECTION("two far balls: one ball plus vol/d, monotone in 1/d") {
        params.alpha = 1.0;
        double prev = 0.0;
        for (double d : {40.0, 20.0, 10.0}) {
            BallUnion A{{Ball{{0, 0, 0}, 1.0}, Ball{{d, 0, 0}, 1.0}}};
            auto res = outer_measure(A, params);
            double expect = ball_measure_oracle(1.0, 1.0) + (4.0 * pi / 3.0) / d;
            REQUIRE(res.value == Catch::Approx(expect).epsilon(0.02));
            REQUIRE(res.value > prev);  // monotone in 1/d
            prev = res.value;
        }
    }

    SECTION("radius to zero gives measure to zero, monotonically") {
        params.alpha = 1.0;
        double prev = 1e300;
        for (double R : {1.0, 0.5, 0.25, 0.125}) {
            BallUnion A{{Ball{{0, 0, 0}, R}}};
            double v = outer_measure(A, params).value;
            REQUIRE(v < prev);
            prev = v;
        }
        REQUIRE(prev <= ball_measure_oracle(0.125, 1.0) * 1.02);
    }

    SECTION("monotonicity and subadditivity") {
        params.alpha = 1.0;
        BallUnion small{{Ball{{0, 0, 0}, 0.8}}};
        BallUnion big{{Ball{{0, 0, 0}, 1.0}, Ball{{3.0, 0, 0}, 0.5}}};
        double ms = outer_measure(small, params).value;
        double mb = outer_measure(big, params).value;
        REQUIRE(ms <= mb * 1.02);

        BallUnion a{{Ball{{0, 0, 0}, 1.0}}};
        BallUnion b{{Ball{{3.0, 0, 0}, 0.5}}};
        double mu_a = outer_measure(a, params).value;
        double mu_b = outer_measure(b, params).value;
        REQUIRE(mb <= (mu_a + mu_b) * 1.02);
    }

    SECTION("translation invariance for shifted unions") {
        params.alpha = 1.5;
        BallUnion A{{Ball{{0, 0, 0}, 1.0}, Ball{{4.0, 1.0, 0}, 0.7}}};
        BallUnion B = A;
        Vec3 shift{17.0, -3.0, 5.0};
        for (auto& ball : B.balls) ball.center = ball.center + shift;
        double va = outer_measure(A, params).value;
        double vb = outer_measure(B, params).value;
        REQUIRE(va == Catch::Approx(vb).epsilon(0.02));
    }
}

TEST_CASE("choquet_integral") {
    ChoquetParams params;
    params.alpha = 1.0;

    SECTION("indicator: single-layer cake") {
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(1.0));
        double v = choquet_integral(f, params);
        REQUIRE(v == Catch::Approx(ball_measure_oracle(1.0, 1.0)).epsilon(0.05));
    }

    SECTION("positive homogeneity is exact on dyadic multiples") {
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(1.0));
        BumpFunction f2 = single({0, 0, 0}, 2.0, indicator_profile(1.0));
        REQUIRE(choquet_integral(f2, params) ==
                Catch::Approx(2.0 * choquet_integral(f, params)).epsilon(1e-9));
    }

    SECTION("disjoint supports are subadditive") {
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(1.0));
        BumpFunction g = single({30.0, 0, 0}, 1.5, indicator_profile(0.8));
        BumpFunction fg = f;
        fg.bumps.push_back(g.bumps[0]);
        double v = choquet_integral(fg, params);
        REQUIRE(v <= (choquet_integral(f, params) + choquet_integral(g, params)) *
                         1.05);
    }

    SECTION("negative integrands and non-monotone profiles are rejected") {
        BumpFunction bad = single({0, 0, 0}, -1.0, indicator_profile(1.0));
        REQUIRE_THROWS_WITH(choquet_integral(bad, params),
                            "requires nonnegative integrand");
        BumpFunction shell = single({0, 0, 0}, 1.0, standard_profile("shell", 1.0));
        REQUIRE_THROWS_WITH(choquet_integral(shell, params),
                            "profile must be radially nonincreasing");
    }
}

TEST_CASE("choquet_rearrangement") {
    ChoquetParams params;
    params.alpha = 1.0;

    SECTION("zero function") {
        BumpFunction z;
        REQUIRE(choquet_rearrangement(z, params).empty());
    }

    SECTION("indicator rearranges to a single step") {
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(1.0));
        auto steps = choquet_rearrangement(f, params);
        REQUIRE_FALSE(steps.empty());
        double mu = ball_measure_oracle(1.0, 1.0);
        for (const auto& s : steps) {
            REQUIRE(s.height <= 1.0);
            REQUIRE(s.measure == Catch::Approx(mu).epsilon(0.02));
        }
    }

    SECTION("two disjoint levels give a two-step function") {
        BumpFunction f = single({0, 0, 0}, 2.0, indicator_profile(1.0));
        f.bumps.push_back({{25.0, 0, 0}, 1.0, indicator_profile(1.0)});
        auto steps = choquet_rearrangement(f, params);
        REQUIRE(steps.front().height == 2.0);
        double mu1 = steps.front().measure;
        double mu_all = steps.back().measure;
        REQUIRE(mu1 == Catch::Approx(ball_measure_oracle(1.0, 1.0)).epsilon(0.03));
        // the far ball adds only its far-field tail vol/d, not its full measure
        double expect_all = ball_measure_oracle(1.0, 1.0) + (4.0 * pi / 3.0) / 25.0;
        REQUIRE(mu_all == Catch::Approx(expect_all).epsilon(0.03));
        for (size_t i = 1; i < steps.size(); ++i) {
            REQUIRE(steps[i].height < steps[i - 1].height);
            REQUIRE(steps[i].measure >= steps[i - 1].measure);
        }
    }
}

TEST_CASE("lorentz_choquet_norm") {
    ChoquetParams params;

    SECTION("indicator: mu(A)^{1/p} for q = inf") {
        params.alpha = 1.0;
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(1.0));
        double mu = ball_measure_oracle(1.0, 1.0);
        for (double p : {2.0, 7.0}) {
            REQUIRE(lorentz_choquet_norm(f, p, infinity, params) ==
                    Catch::Approx(std::pow(mu, 1.0 / p)).epsilon(0.02));
        }
    }

    SECTION("scaling law ||f(c.)|| = c^{(alpha-3)/p} ||f||") {
        for (auto [p, alpha] : std::vector<std::pair<double, double>>{
                 {7.0, 3.0 - 14.0 / 6.0}, {8.0, 3.0 - 16.0 / 6.0}}) {
            params.alpha = alpha;
            RadialGrid g(8.0, 1025);
            RadialField prof = RadialField::from_function(
                g, [](double r) { return std::exp(-r * r); });
            RadialGrid g2(4.0, 513);
            RadialField prof2 = RadialField::from_function(
                g2, [](double r) { return std::exp(-4.0 * r * r); });
            double n1 = lorentz_choquet_norm(single({0, 0, 0}, 1.0, prof), p,
                                             infinity, params);
            double n2 = lorentz_choquet_norm(single({0, 0, 0}, 1.0, prof2), p,
                                             infinity, params);
            REQUIRE(n2 / n1 ==
                    Catch::Approx(std::pow(2.0, (alpha - 3.0) / p)).epsilon(0.02));
        }
    }

    SECTION("zero") {
        params.alpha = 1.0;
        BumpFunction z;
        REQUIRE(lorentz_choquet_norm(z, 2.0, infinity, params) == 0.0);
    }
}

TEST_CASE("kato_norm") {
    ChoquetParams params;

    SECTION("indicator at p = q = 1 coincides with the outer measure") {
        params.alpha = 1.0;
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(1.0));
        REQUIRE(kato_norm(f, 1.0, 1.0, 1.0, params) ==
                Catch::Approx(2.0 * pi).epsilon(0.02));
    }

    SECTION("integrability violation is a labeled infinity") {
        params.alpha = 1.0;
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(1.0));
        REQUIRE(std::isinf(kato_norm(f, 2.0, 2.0, 2.0, params)));
    }

    SECTION("weak-q norm of a ball against the semi-analytic oracle") {
        params.alpha = 1.0;
        double a = 0.8, p = 2.0, R = 1.0;
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(R));
        // |x|^{-a} chi_B is radially decreasing; sup at u = R^{-a}
        double oracle = std::pow(R, -a) * std::pow(4.0 * pi / 3.0, 1.0 / p) *
                        std::pow(R, 3.0 / p);
        double v = kato_norm(f, a, p, infinity, params);
        REQUIRE(v == Catch::Approx(oracle).epsilon(0.08));
    }

    SECTION("embedding sandwich with constants at most 4") {
        params.alpha = 1.0;
        double p = 2.0;
        std::vector<BumpFunction> family;
        family.push_back(single({0, 0, 0}, 1.0, indicator_profile(1.0)));
        family.push_back(single({0, 0, 0}, 1.0, indicator_profile(0.4)));
        family.push_back(single({0, 0, 0}, 0.7, standard_profile("gaussian", 1.0)));
        family.push_back(single({0, 0, 0}, 1.3, standard_profile("gaussian", 0.5)));
        {
            BumpFunction two = single({0, 0, 0}, 1.0, indicator_profile(1.0));
            two.bumps.push_back({{20.0, 0, 0}, 0.8, indicator_profile(0.7)});
            family.push_back(two);
        }
        for (const auto& f : family) {
            double weak = lorentz_choquet_norm(f, p, infinity, params);
            double kato = kato_norm(f, params.alpha / p, p, p, params);
            double strong = lp_choquet_norm(f, p, params);
            REQUIRE(weak <= 4.0 * kato);
            REQUIRE(kato <= 4.0 * strong);
        }
    }
}

TEST_CASE("atomic_decompose") {
    ChoquetParams params;
    params.alpha = 1.0;

    SECTION("indicator is a single atom with c = mu^{1/p}") {
        double p = 2.0;
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(1.0));
        auto atoms = atomic_decompose(f, p, params);
        REQUIRE(atoms.size() == 1);
        double mu = ball_measure_oracle(1.0, 1.0);
        REQUIRE(atoms[0].coeff == Catch::Approx(std::pow(mu, 1.0 / p)).epsilon(0.02));
        REQUIRE(atoms[0].band == 0);
    }

    SECTION("two disjoint heights land in bands k=1 and k=0") {
        double p = 2.0;
        BumpFunction f = single({0, 0, 0}, 2.0, indicator_profile(1.0));
        f.bumps.push_back({{25.0, 0, 0}, 0.75, indicator_profile(1.0)});
        auto atoms = atomic_decompose(f, p, params);
        REQUIRE(atoms.size() == 2);
        REQUIRE(atoms[0].band == 1);
        REQUIRE(atoms[1].band == 0);
    }

    SECTION("reconstruction and quasinorm equivalence on random bumps") {
        std::mt19937 rng(61);
        std::uniform_real_distribution<double> uc(0.4, 2.5);
        std::uniform_real_distribution<double> uw(0.4, 1.2);
        double p = 2.0;
        for (int trial = 0; trial < 10; ++trial) {
            BumpFunction f;
            int nb = 1 + trial % 3;
            for (int b = 0; b < nb; ++b) {
                RadialGrid g(6.0, 513);
                double w = uw(rng), c = uc(rng);
                RadialField prof = RadialField::from_function(g, [=](double r) {
                    return std::exp(-r * r / (w * w));
                });
                f.bumps.push_back({{b * 40.0, 0, 0}, c, prof});
            }
            auto atoms = atomic_decompose(f, p, params);
            REQUIRE_FALSE(atoms.empty());

            // pointwise reconstruction on a sample set
            std::uniform_real_distribution<double> ux(-2.0, 2.0);
            for (int s = 0; s < 20; ++s) {
                Vec3 x{(s % 3) * 40.0 + ux(rng), ux(rng), ux(rng)};
                double fsum = 0.0;
                for (const auto& a : atoms) fsum += a.coeff * a.atom.eval(x);
                REQUIRE(fsum == Catch::Approx(f.eval(x)).margin(1e-6));
            }

            // sup_k |c_k| reproduces the weak quasinorm within factor 4
            double supc = 0.0;
            for (const auto& a : atoms) supc = std::max(supc, a.coeff);
            double weak = lorentz_choquet_norm(f, p, infinity, params);
            REQUIRE(supc <= 4.0 * weak);
            REQUIRE(weak <= 4.0 * supc);
        }
    }
}

TEST_CASE("quasi_triangle_ratio") {
    ChoquetParams params;
    params.alpha = 1.0;
    RadialField prof = standard_profile("gaussian", 1.0, 513);

    SECTION("g = 0 gives ratio 1") {
        BumpFunction f = single({0, 0, 0}, 1.0, prof);
        BumpFunction z;
        REQUIRE(quasi_triangle_ratio(f, z, 2.0, params) ==
                Catch::Approx(1.0).epsilon(1e-9));
    }

    SECTION("f = g stays below the quasinorm constant") {
        BumpFunction f = single({0, 0, 0}, 1.0, prof);
        for (double p : {1.0, 2.0, 3.0}) {
            double r = quasi_triangle_ratio(f, f, p, params);
            REQUIRE(r <= std::pow(p + 1.0, 1.0 / p) * 1.05);
        }
    }

    SECTION("disjoint far supports are nearly additive") {
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(1.0));
        BumpFunction g = single({50.0, 0, 0}, 1.0, indicator_profile(1.0));
        double r = quasi_triangle_ratio(f, g, 2.0, params);
        REQUIRE(r <= 1.05);
    }

    SECTION("random pairs respect (p+1)^{1/p} with 5% slack") {
        std::mt19937 rng(67);
        std::uniform_real_distribution<double> uc(0.3, 2.0);
        std::uniform_real_distribution<double> uw(0.4, 1.5);
        std::uniform_real_distribution<double> ud(8.0, 60.0);
        for (double p : {1.0, 2.0, 3.0}) {
            for (int trial = 0; trial < 12; ++trial) {
                RadialGrid g(6.0, 257);
                double w1 = uw(rng), w2 = uw(rng);
                RadialField p1 = RadialField::from_function(g, [=](double r) {
                    return std::exp(-r * r / (w1 * w1));
                });
                RadialField p2 = RadialField::from_function(g, [=](double r) {
                    return std::exp(-r * r / (w2 * w2));
                });
                BumpFunction f = single({0, 0, 0}, uc(rng), p1);
                Vec3 c2 = (trial % 2 == 0) ? Vec3{0, 0, 0} : Vec3{ud(rng), 0, 0};
                BumpFunction h = single(c2, uc(rng), p2);
                double r = quasi_triangle_ratio(f, h, p, params);
                REQUIRE(r <= std::pow(p + 1.0, 1.0 / p) * 1.05);
            }
        }
    }
}

TEST_CASE("fractional_integrate") {
    ChoquetParams params;

    SECTION("zero input") {
        BumpFunction z;
        auto res = fractional_integrate(z, 1.0, {{0, 0, 0}}, params);
        REQUIRE(res.values[0] == 0.0);
    }

    SECTION("ball against |x|^{-1} at the origin") {
        BumpFunction f = single({0, 0, 0}, 1.0, indicator_profile(1.0));
        auto res = fractional_integrate(f, 1.0, {{0, 0, 0}}, params);
        REQUIRE(res.values[0] == Catch::Approx(2.0 * pi).epsilon(0.02));
    }

    SECTION("boundedness ratio stable under profile refinement") {
        // (1-alpha/3)/r = (1-alpha/3)/p + beta/3 - 1 with beta = 1; the
        // closed-loop family p = 7.5/(N+1), alpha = 0.5 gives r = 7.5
        double p = 7.5 / 7.0, alpha = 0.5;
        double rr = (1.0 - alpha / 3.0) / ((1.0 - alpha / 3.0) / p + 1.0 / 3.0 - 1.0);
        ChoquetParams pa;
        pa.alpha = alpha;
        double prev = -1.0;
        for (int n : {513, 1025}) {
            RadialGrid g(8.0, n);
            RadialField prof = RadialField::from_function(
                g, [](double r) { return std::exp(-r * r); });
            BumpFunction f = single({0, 0, 0}, 1.0, prof);
            auto conv = fractional_integrate(f, 1.0, {}, pa);
            double num = lorentz_choquet_norm(conv.field, rr, infinity, pa);
            double den = lorentz_choquet_norm(f, p, infinity, pa);
            double ratio = num / den;
            if (prev > 0) REQUIRE(ratio == Catch::Approx(prev).epsilon(0.2));
            prev = ratio;
        }
    }
}

TEST_CASE("closed loop contraction") {
    int N = 6;
    double p = 7.5, alpha = 3.0 - 2.0 * p / N;  // = 0.5
    ChoquetParams params;
    params.alpha = alpha;
    RadialGrid g(8.0, 1025);
    RadialField prof = RadialField::from_function(
        g, [](double r) { return std::exp(-r * r); });
    BumpFunction base;
    base.bumps.push_back({{0, 0, 0}, 1.0, prof});

    SECTION("zero maps to zero") {
        BumpFunction z;
        z.bumps.push_back({{0, 0, 0}, 0.0, prof});
        BumpFunction m = closed_loop_map(z, N, params);
        REQUIRE(m.max_abs() == 0.0);
    }

    SECTION("parameter range is validated") {
        REQUIRE_THROWS(contraction_ratio(base, base, N, 20.0, alpha, params));
        REQUIRE_THROWS(contraction_ratio(base, base, N, p, 0.9, params));
    }

    SECTION("ratio scales like rho^N and drops below one") {
        std::vector<double> rhos{0.5, 0.25, 0.125};
        std::vector<double> ratios;
        for (double rho : rhos) {
            BumpFunction u1, u2;
            u1.bumps.push_back({{0, 0, 0}, rho, prof});
            u2.bumps.push_back({{0, 0, 0}, 0.5 * rho, prof});
            ratios.push_back(contraction_ratio(u1, u2, N, p, alpha, params));
        }
        for (size_t k = 1; k < ratios.size(); ++k) {
            double fold = ratios[k - 1] / ratios[k];
            REQUIRE(fold == Catch::Approx(std::pow(2.0, N)).epsilon(0.2));
        }
        REQUIRE(ratios.back() < 1.0);
    }
}

TEST_CASE("multibump_smallness") {
    int N = 6;
    double p = 7.5, alpha = 3.0 - 2.0 * p / N;
    ChoquetParams params;
    RadialField prof = standard_profile("gaussian", 1.0, 513);

    SECTION("single bump: criterion 0, norm equals the single-bump norm") {
        auto rep = multibump_smallness({{0, 0, 0}}, prof, 1.0, p, alpha, params);
        REQUIRE(rep.criterion == 0.0);
        ChoquetParams pa;
        pa.alpha = alpha;
        BumpFunction f;
        f.bumps.push_back({{0, 0, 0}, 1.0, prof});
        REQUIRE(rep.norm ==
                Catch::Approx(lorentz_choquet_norm(f, p, infinity, pa)).epsilon(1e-9));
    }

    SECTION("8 far bumps stay within 1.5x the single-bump norm when S <= 0.1") {
        double d = 3000.0;
        std::vector<Vec3> centers;
        for (int j = 0; j < 8; ++j) centers.push_back({j * d, 0, 0});
        auto rep = multibump_smallness(centers, prof, 1.0, p, alpha, params);
        REQUIRE(rep.criterion <= 0.1);
        auto one = multibump_smallness({{0, 0, 0}}, prof, 1.0, p, alpha, params);
        REQUIRE(rep.norm <= 1.5 * one.norm);
        REQUIRE(rep.norm <= std::pow(1.0 + rep.criterion, 1.0 / p) * 1.5 * one.norm);
    }

    SECTION("polynomially spaced centers give a finite criterion") {
        // y_j = j^{1/alpha0} e with alpha0 < alpha
        double alpha0 = 0.4;
        std::vector<Vec3> centers;
        for (int j = 1; j <= 64; ++j)
            centers.push_back({std::pow(j, 1.0 / alpha0), 0, 0});
        auto rep = multibump_smallness(centers, prof, 0.1, p, alpha, params);
        REQUIRE(std::isfinite(rep.criterion));
        double bound = 0.0;
        for (int j = 1; j <= 64; ++j) bound += 2.0 * std::pow(j, -alpha / alpha0);
        REQUIRE(rep.criterion <= bound);
    }

    SECTION("distinct centers are required") {
        REQUIRE_THROWS(multibump_smallness({{0, 0, 0}, {0, 0, 0}}, prof, 1.0, p,
                                           alpha, params));
    }
}
