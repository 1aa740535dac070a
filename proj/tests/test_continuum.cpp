#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "stakepool/continuum.hpp"
#include "stakepool/distribution.hpp"
#include "stakepool/errors.hpp"
#include "stakepool/rng.hpp"

using namespace stakepool;

namespace {

double gap(double c, const GameParams& p, const CostDistribution& d) {
    const double F = d.cdf(c);
    const double own = p.lambda * p.R / (F * p.H + p.M);
    const double del = p.lambda >= 1.0 ? 0.0 : (1.0 - p.lambda) * p.R / ((1.0 - F) * p.H);
    return own - del - c;
}

}  // namespace

TEST_CASE("parameter validation") {
    auto u = make_uniform(1.0);
    CHECK_THROWS_AS(validate(GameParams{0.0, 0.0, 1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(validate(GameParams{1.0, -0.1, 1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(validate(GameParams{1.0, 1.0, 1.0, 1.0}), ValidationError);  // M >= H
    CHECK_THROWS_AS(validate(GameParams{1.0, 0.5, 0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(validate(GameParams{1.0, 0.5, 1.0, 1.2}), ValidationError);
    CHECK_THROWS_AS(validate(GameParams{1.0, 0.5, 1.0, -0.2}), ValidationError);
    CHECK_THROWS_AS(solve_threshold_equilibrium(GameParams{1.0, 0.5, -1.0, 1.0}, *u),
                    ValidationError);
}

TEST_CASE("lambda = 1 equilibrium solves c(cH+M) = R for uniform costs") {
    auto u = make_uniform(1.0);
    const GameParams p{1.0, 0.5, 1.0, 1.0};
    const EquilibriumResult eq = solve_threshold_equilibrium(p, *u);
    CHECK(eq.corner == Corner::Interior);
    CHECK(eq.cstar == doctest::Approx(0.780776406404415).epsilon(1e-10));
    CHECK(eq.P == doctest::Approx(eq.cstar).epsilon(1e-12));
    CHECK(eq.D == doctest::Approx(1.0 - eq.cstar).epsilon(1e-12));
    CHECK(eq.I == 0.0);
    CHECK(eq.s == doctest::Approx(eq.D / (eq.P + 0.5)).epsilon(1e-12));
    CHECK(eq.r == doctest::Approx(1.0 / (eq.P + 0.5)).epsilon(1e-12));
    CHECK(eq.security == doctest::Approx(0.609611796797792).epsilon(1e-9));
    CHECK(std::abs(gap(eq.cstar, p, *u)) < 1e-9);
}

TEST_CASE("interior equilibria at published operating points") {
    auto u = make_uniform(1.0);
    const EquilibriumResult a =
        solve_threshold_equilibrium(GameParams{1.0, 0.5, 1.0, 0.9}, *u);
    CHECK(a.cstar == doctest::Approx(0.586504233686232).epsilon(1e-10));
    // lambda close to the existence bound: threshold collapses toward zero
    const EquilibriumResult b =
        solve_threshold_equilibrium(GameParams{1.0, 1.0 / 3.0, 1.0, 0.3}, *u);
    CHECK(b.cstar == doctest::Approx(0.0488924223806646).epsilon(1e-8));
}

TEST_CASE("power-law costs") {
    auto p05 = make_power(0.5);
    const EquilibriumResult eq =
        solve_threshold_equilibrium(GameParams{1.0, 0.5, 1.0, 1.0}, *p05);
    CHECK(eq.cstar == doctest::Approx(0.736325878314138).epsilon(1e-10));
    CHECK(eq.P == doctest::Approx(std::sqrt(eq.cstar)).epsilon(1e-10));
}

TEST_CASE("existence boundary: interior, corner, and no-pooling regimes") {
    auto u = make_uniform(1.0);
    SplitMix64 rng(31337);
    for (int i = 0; i < 100; ++i) {
        const double H = 0.2 + 4.8 * rng.next_double();
        const double M = 0.95 * H * rng.next_double();
        // keep R below T(H+M)/2 so the all-pool corner cannot trigger
        const double R = 0.05 + 0.35 * (H + M) * rng.next_double();
        const double bound = M / (H + M);

        GameParams above{H, M, R, bound + std::max(2e-12, (1.0 - bound) * rng.next_double())};
        const EquilibriumResult eq = solve_threshold_equilibrium(above, *u);
        CHECK(eq.corner == Corner::Interior);
        CHECK(eq.cstar > 0.0);
        CHECK(eq.cstar < 1.0);
        CHECK(std::abs(gap(eq.cstar, above, *u)) < 1e-9 * R);
        // measure identities
        CHECK(eq.P + eq.D + eq.I == doctest::Approx(H).epsilon(1e-12));
        CHECK(eq.security == doctest::Approx(eq.P / (eq.P + M)).epsilon(1e-12));

        GameParams at{H, M, R, bound};
        const EquilibriumResult eq0 = solve_threshold_equilibrium(at, *u);
        CHECK(eq0.corner == (M > 0.0 ? Corner::AllDelegate : Corner::Interior));
        if (M > 0.0) CHECK(eq0.cstar == 0.0);

        if (M > 0.0) {
            GameParams below{H, M, R, bound * 0.9};
            const EquilibriumResult eqn = solve_threshold_equilibrium(below, *u);
            CHECK(eqn.corner == Corner::NoInterior);
            CHECK(eqn.cstar == 0.0);
            CHECK(eqn.security == 0.0);
            CHECK(eqn.D == doctest::Approx(H));
        }
    }
}

TEST_CASE("indifference gap crosses zero exactly once") {
    auto u = make_uniform(1.0);
    const GameParams p{1.0, 0.4, 1.0, 0.8};
    const EquilibriumResult eq = solve_threshold_equilibrium(p, *u);
    int sign_changes = 0;
    double prev = gap(1e-9, p, *u);
    for (int i = 1; i <= 500; ++i) {
        const double c = 1e-9 + (1.0 - 2e-9) * i / 500.0;
        const double g = gap(c, p, *u);
        if ((prev > 0) != (g > 0)) {
            ++sign_changes;
            CHECK(std::abs(c - eq.cstar) < 0.003);
        }
        prev = g;
    }
    CHECK(sign_changes == 1);
}

TEST_CASE("all-pool corner when the reward dominates the support") {
    auto u = make_uniform(1.0);
    const GameParams p{1.0, 0.5, 3.0, 1.0};  // g(1) = 3/1.5 - 1 > 0
    const EquilibriumResult eq = solve_threshold_equilibrium(p, *u);
    CHECK(eq.corner == Corner::AllPool);
    CHECK(eq.cstar == 1.0);
    CHECK(eq.P == doctest::Approx(1.0));
    CHECK(eq.D == doctest::Approx(0.0));
}

TEST_CASE("threshold is increasing in the owner share") {
    auto u = make_uniform(1.0);
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double lam = 1.0 / 3.0 + (2.0 / 3.0) * i / 100.0;
        const EquilibriumResult eq =
            solve_threshold_equilibrium(GameParams{1.0, 0.5, 1.0, lam}, *u);
        CHECK(eq.cstar >= prev);
        prev = eq.cstar;
    }
    CHECK(prev == doctest::Approx(0.780776406404415).epsilon(1e-9));
}

TEST_CASE("lambda_from_cstar inverts the solver") {
    auto u = make_uniform(1.0);
    const GameParams p{1.0, 0.5, 1.0, 1.0};
    for (double c : {0.1, 0.3, 0.5, 0.7, 0.78}) {
        const double lam = lambda_from_cstar(c, p, *u);
        GameParams q = p;
        q.lambda = lam;
        const EquilibriumResult eq = solve_threshold_equilibrium(q, *u);
        CHECK(eq.cstar == doctest::Approx(c).epsilon(1e-8));
    }
    CHECK_THROWS_AS(lambda_from_cstar(0.0, p, *u), ValidationError);
    CHECK_THROWS_AS(lambda_from_cstar(1.0, p, *u), ValidationError);
}

TEST_CASE("welfare values and derivative") {
    auto u = make_uniform(1.0);
    const GameParams p{1.0, 0.5, 1.0, 1.0};
    // W(c) = c/(c+M) - c^2/2 for uniform costs on [0,1], H = R = 1
    CHECK(welfare(0.5, p, *u) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(welfare(0.780776406404415, p, *u) ==
          doctest::Approx(0.304805898398896).epsilon(1e-10));
    CHECK(welfare(0.0, p, *u) == 0.0);
    // interior optimum of the same expression sits at c = 0.5
    CHECK(welfare_derivative(0.5, p, *u) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(welfare_derivative(0.3, p, *u) > 0.0);
    CHECK(welfare_derivative(0.7, p, *u) < 0.0);
}

TEST_CASE("welfare-optimal design for uniform costs") {
    auto u = make_uniform(1.0);

    const DesignResult a = welfare_optimal_cstar(GameParams{1.0, 0.5, 1.0, 1.0}, *u);
    CHECK(a.cstar == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(a.lambda == doctest::Approx(5.0 / 6.0).epsilon(1e-7));
    CHECK(a.objective == doctest::Approx(0.375).epsilon(1e-10));
    CHECK_FALSE(a.heuristic);

    const DesignResult b = welfare_optimal_cstar(GameParams{1.0, 0.4, 1.0, 1.0}, *u);
    CHECK(b.cstar == doctest::Approx(0.49706444743783).epsilon(1e-7));
    CHECK(b.lambda == doctest::Approx(0.800944877765971).epsilon(1e-6));
    CHECK(b.objective == doctest::Approx(0.430564623664856).epsilon(1e-10));

    const DesignResult c = welfare_optimal_cstar(GameParams{1.0, 1.0 / 3.0, 1.0, 1.0}, *u);
    CHECK(c.cstar == doctest::Approx(0.4907892877758).epsilon(1e-7));
    CHECK(c.lambda == doctest::Approx(0.772562520085926).epsilon(1e-6));
    CHECK(c.objective == doctest::Approx(0.475092383248185).epsilon(1e-10));

    CHECK_THROWS_AS(welfare_optimal_cstar(GameParams{1.0, 0.0, 1.0, 1.0}, *u),
                    ValidationError);
}

TEST_CASE("welfare corner: small support pushes the optimum to all-pool") {
    // HM >= (H+M)^2 T with H=10, M=5, T=0.2: 50 >= 45
    auto u = make_uniform(0.2);
    const DesignResult big = welfare_optimal_cstar(GameParams{10.0, 5.0, 5.0, 1.0}, *u);
    CHECK(big.cstar == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(big.corner == Corner::AllPool);
    CHECK(big.lambda == doctest::Approx(1.0));
    CHECK(big.note.empty());

    // same corner but the reward cannot actually sustain c* = T
    const DesignResult small = welfare_optimal_cstar(GameParams{10.0, 5.0, 1.0, 1.0}, *u);
    CHECK(small.cstar == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_FALSE(small.note.empty());
}

TEST_CASE("welfare optimum under a non-uniform concave cdf") {
    auto p05 = make_power(0.5);
    const GameParams p{1.0, 0.5, 1.0, 1.0};
    const DesignResult d = welfare_optimal_cstar(p, *p05);
    CHECK_FALSE(d.heuristic);
    CHECK(d.cstar > 0.0);
    CHECK(d.cstar < 1.0);
    // interior first-order condition holds at the reported optimum
    CHECK(std::abs(welfare_derivative(d.cstar, p, *p05)) < 1e-6);
    // and the value beats nearby thresholds
    CHECK(d.objective >= welfare(d.cstar * 0.9, p, *p05));
    CHECK(d.objective >= welfare(std::min(1.0, d.cstar * 1.1), p, *p05));
}

TEST_CASE("non-concave cdf falls back to the heuristic grid") {
    // convex-then-concave piecewise cdf fails the concavity screen
    auto t = make_table({{0, 0}, {0.6, 0.1}, {0.8, 0.9}, {1, 1}});
    const GameParams p{1.0, 0.5, 1.0, 1.0};
    const DesignResult d = welfare_optimal_cstar(p, *t);
    CHECK(d.heuristic);
    CHECK_FALSE(d.note.empty());
    // grid optimum still beats a coarse scan
    for (double c = 0.05; c < 1.0; c += 0.05)
        CHECK(d.objective >= welfare(c, p, *t) - 1e-9);
}

TEST_CASE("equilibrium summary fills measures without solving") {
    auto u = make_uniform(1.0);
    const GameParams p{2.0, 0.5, 1.0, 1.0};
    const EquilibriumResult eq = equilibrium_summary(0.4, p, *u);
    CHECK(eq.cstar == 0.4);
    CHECK(eq.P == doctest::Approx(0.8));
    CHECK(eq.D == doctest::Approx(1.2));
    CHECK(eq.security == doctest::Approx(0.8 / 1.3));
}
