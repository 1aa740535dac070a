#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "stakepool/closed_form.hpp"
#include "stakepool/continuum.hpp"
#include "stakepool/distribution.hpp"
#include "stakepool/errors.hpp"
#include "stakepool/rng.hpp"

using namespace stakepool;

TEST_CASE("security-max quadratic root") {
    // 2R/(M + sqrt(M^2 + 4HR)) for the three benchmark instances
    CHECK(security_max_uniform(1.0, 0.5, 1.0).cstar ==
          doctest::Approx(0.780776406404415).epsilon(1e-12));
    CHECK(security_max_uniform(1.0, 0.4, 1.0).cstar ==
          doctest::Approx(0.819803902718557).epsilon(1e-12));
    CHECK(security_max_uniform(1.0, 1.0 / 3.0, 1.0).cstar ==
          doctest::Approx(0.847127088383037).epsilon(1e-12));
    CHECK_FALSE(security_max_uniform(1.0, 0.5, 1.0).clipped);
}

TEST_CASE("security-max agrees with the generic solver") {
    auto u = make_uniform(1.0);
    SplitMix64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const double H = 0.3 + 3.0 * rng.next_double();
        const double M = 0.9 * H * rng.next_double();
        const double R = 0.05 + 0.4 * (H + M) * rng.next_double();
        const SecurityMaxUniform cf = security_max_uniform(H, M, R);
        const EquilibriumResult eq =
            solve_threshold_equilibrium(GameParams{H, M, R, 1.0}, *u);
        CHECK(cf.cstar == doctest::Approx(eq.cstar).epsilon(1e-9));
    }
}

TEST_CASE("security-max clips to the support") {
    const SecurityMaxUniform cf = security_max_uniform(1.0, 0.5, 3.0);
    CHECK(cf.cstar == 1.0);
    CHECK(cf.clipped);
    auto u = make_uniform(1.0);
    const EquilibriumResult eq = solve_threshold_equilibrium(GameParams{1.0, 0.5, 3.0, 1.0}, *u);
    CHECK(eq.corner == Corner::AllPool);
    CHECK(eq.cstar == cf.cstar);
}

TEST_CASE("welfare radical reproduces the first-order condition root") {
    const WelfareOptimalUniform a = welfare_optimal_uniform(1.0, 0.5);
    CHECK(a.radical_ok);
    CHECK(a.cstar == doctest::Approx(0.5).epsilon(1e-10));

    const WelfareOptimalUniform b = welfare_optimal_uniform(1.0, 0.4);
    CHECK(b.radical_ok);
    CHECK(b.cstar == doctest::Approx(0.49706444743783).epsilon(1e-10));

    const WelfareOptimalUniform c = welfare_optimal_uniform(1.0, 1.0 / 3.0);
    CHECK(c.radical_ok);
    CHECK(c.cstar == doctest::Approx(0.4907892877758).epsilon(1e-10));

    // H=2, M=1 rescales the cubic but the root is again exactly 1/2
    const WelfareOptimalUniform d = welfare_optimal_uniform(2.0, 1.0);
    CHECK(d.cstar == doctest::Approx(0.5).epsilon(1e-10));

    CHECK_THROWS_AS(welfare_optimal_uniform(0.5, 0.5), ValidationError);  // needs H > M
    CHECK_THROWS_AS(welfare_optimal_uniform(1.0, 0.0), ValidationError);
}

TEST_CASE("welfare radical satisfies c (cH+M)^2 = HM across instances") {
    SplitMix64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const double H = 0.2 + 5.0 * rng.next_double();
        const double M = H * (0.05 + 0.9 * rng.next_double());
        if (M >= H) continue;
        const WelfareOptimalUniform w = welfare_optimal_uniform(H, M);
        CHECK(w.radical_ok);
        const double lhs = w.cstar * (w.cstar * H + M) * (w.cstar * H + M);
        CHECK(lhs == doctest::Approx(H * M).epsilon(1e-8));
    }
}

TEST_CASE("equilibrium cubic at the published operating points") {
    struct Row {
        double M, lambda, cstar;
    };
    const Row rows[] = {
        {0.5, 0.99, 0.751114981256408},      {0.5, 0.9, 0.586504233686232},
        {0.5, 0.8, 0.461159964999471},       {0.5, 0.7, 0.354476296911522},
        {0.5, 0.6, 0.256005910001694},       {0.5, 0.5, 0.160818587131648},
        {0.4, 0.9, 0.619685228916698},       {0.4, 0.8, 0.496011403645287},
        {0.4, 0.6, 0.295306379611348},       {0.4, 0.5, 0.202631590937158},
        {0.4, 0.4, 0.110047469005626},       {1.0 / 3.0, 0.9, 0.642525063283208},
        {1.0 / 3.0, 0.5, 0.232408120756002}, {1.0 / 3.0, 0.4, 0.142059696795832},
        {1.0 / 3.0, 0.3, 0.0488924223806646},
    };
    for (const Row& r : rows) {
        const CubicSolution sol = equilibrium_cubic(1.0, r.M, 1.0, r.lambda);
        REQUIRE(sol.feasible_root.has_value());
        CHECK(*sol.feasible_root == doctest::Approx(r.cstar).epsilon(1e-9));
    }
}

TEST_CASE("cubic roots have small residuals and match bisection") {
    auto u = make_uniform(1.0);
    SplitMix64 rng(23);
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        const double H = 0.2 + 4.0 * rng.next_double();
        const double M = H * (0.02 + 0.9 * rng.next_double());
        const double R = 0.05 + 0.4 * (H + M) * rng.next_double();
        const double bound = M / (H + M);
        const double lam = bound + (1.0 - bound) * (0.02 + 0.98 * rng.next_double());

        const CubicSolution sol = equilibrium_cubic(H, M, R, lam);
        REQUIRE(sol.feasible_root.has_value());
        const double c = *sol.feasible_root;

        // residual of the monic expansion at the reported root
        const double res = std::abs(((sol.a * c + sol.b) * c + sol.d) * c + sol.e);
        const double scale =
            std::abs(sol.a) + std::abs(sol.b) + std::abs(sol.d) + std::abs(sol.e);
        CHECK(res < 1e-9 * scale);

        // discriminant bookkeeping is self-consistent
        CHECK(sol.delta0 == doctest::Approx(sol.b * sol.b - 3 * sol.a * sol.d));

        const EquilibriumResult eq = solve_threshold_equilibrium(GameParams{H, M, R, lam}, *u);
        if (eq.corner == Corner::Interior) {
            CHECK(c == doctest::Approx(eq.cstar).epsilon(1e-8));
            ++checked;
        }
    }
    CHECK(checked > 400);
}

TEST_CASE("cubic at lambda = 1 reduces to the security quadratic") {
    SplitMix64 rng(29);
    for (int i = 0; i < 50; ++i) {
        const double H = 0.3 + 3.0 * rng.next_double();
        const double M = H * 0.8 * rng.next_double();
        const double R = 0.05 + 0.3 * (H + M) * rng.next_double();
        const CubicSolution sol = equilibrium_cubic(H, M, R, 1.0);
        REQUIRE(sol.feasible_root.has_value());
        CHECK(*sol.feasible_root ==
              doctest::Approx(security_max_uniform(H, M, R).cstar).epsilon(1e-10));
    }
}

TEST_CASE("cubic rejects shares below the existence bound") {
    CHECK_THROWS_AS(equilibrium_cubic(1.0, 0.5, 1.0, 0.2), NumericError);
    try {
        equilibrium_cubic(1.0, 0.5, 1.0, 0.2);
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("M/(H+M)") != std::string::npos);
    }
}

TEST_CASE("all three cube roots are reported") {
    const CubicSolution sol = equilibrium_cubic(1.0, 0.5, 1.0, 0.9);
    // the roots must actually solve the cubic in complex arithmetic
    for (const std::complex<double>& z : sol.roots) {
        const std::complex<double> r =
            ((sol.a * z + sol.b) * z + sol.d) * z + sol.e;
        CHECK(std::abs(r) < 1e-8);
    }
}
