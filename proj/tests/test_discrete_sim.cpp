#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "stakepool/continuum.hpp"
#include "stakepool/discrete_sim.hpp"
#include "stakepool/distribution.hpp"
#include "stakepool/errors.hpp"

using namespace stakepool;

namespace {

DiscreteConfig config(std::uint64_t n, std::uint64_t m, double R, double lambda,
                      std::uint64_t reps = 100, std::uint64_t seed = 42) {
    DiscreteConfig c;
    c.n = n;
    c.m = m;
    c.R = R;
    c.lambda = lambda;
    c.dist = make_uniform(1.0);
    c.replications = reps;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(validate(config(0, 0, 1.0, 1.0)), ValidationError);
    CHECK_THROWS_AS(validate(config(5, 5, 1.0, 1.0)), ValidationError);  // needs n > m
    CHECK_THROWS_AS(validate(config(10, 2, 0.0, 1.0)), ValidationError);
    CHECK_THROWS_AS(validate(config(10, 2, 1.0, 1.5)), ValidationError);
    DiscreteConfig no_dist = config(10, 2, 1.0, 1.0);
    no_dist.dist = nullptr;
    CHECK_THROWS_AS(validate(no_dist), ValidationError);
    DiscreteConfig no_reps = config(10, 2, 1.0, 1.0, 0);
    CHECK_THROWS_AS(validate(no_reps), ValidationError);
}

TEST_CASE("single agent, sole pool, full reward") {
    // threshold 1.0: the lone agent always opens a pool and proposes
    const DiscreteConfig cfg = config(1, 0, 1.0, 1.0, 1);
    const ReplicationStats r = run_replication(cfg, 1.0, 0);
    CHECK(r.k == 1);
    CHECK_FALSE(r.degenerate);
    CHECK(r.security == 1.0);
    CHECK(r.proposer_pool == 0);
    CHECK(r.reward_owner_paid == doctest::Approx(1.0));
    CHECK(r.reward_delegators_paid == 0.0);
    CHECK(r.reward_burned == 0.0);
    REQUIRE(r.owner_utility_at_threshold.has_value());
    // lambda r / (k+m) - threshold = 1/1 - 1
    CHECK(*r.owner_utility_at_threshold == doctest::Approx(0.0));
    CHECK_FALSE(r.mean_delegator_utility.has_value());
    CHECK_FALSE(r.indifference_gap.has_value());
}

TEST_CASE("degenerate replication when nobody can form a pool") {
    // threshold 0 and no malicious pools: k + m == 0
    const ReplicationStats r = run_replication(config(5, 0, 1.0, 1.0, 1), 0.0, 0);
    CHECK(r.degenerate);
    CHECK(r.k == 0);
    CHECK(r.security == 0.0);
}

TEST_CASE("replications are deterministic and order-independent") {
    const DiscreteConfig cfg = config(400, 200, 400.0, 0.9, 10, 77);
    const ReplicationStats a = run_replication(cfg, 0.55, 6);
    const ReplicationStats b = run_replication(cfg, 0.55, 6);
    CHECK(a.k == b.k);
    CHECK(a.proposer_pool == b.proposer_pool);
    CHECK(a.delegation_counts == b.delegation_counts);
    CHECK(*a.indifference_gap == *b.indifference_gap);

    const SimulationSummary s1 = simulate(cfg, 0.55, true);
    const SimulationSummary s2 = simulate(cfg, 0.55, true);
    CHECK(s1.mean_k == s2.mean_k);
    CHECK(s1.mean_gap == s2.mean_gap);
    CHECK(s1.gap_std_error == s2.gap_std_error);
    for (std::size_t i = 0; i < s1.per_replication.size(); ++i)
        CHECK(s1.per_replication[i].k == s2.per_replication[i].k);

    DiscreteConfig other = cfg;
    other.seed = 78;
    CHECK(simulate(other, 0.55).mean_k != s1.mean_k);
}

TEST_CASE("accounting: the block reward is fully attributed") {
    const DiscreteConfig cfg = config(300, 100, 7.5, 0.6, 1);
    for (std::uint64_t rep = 0; rep < 40; ++rep) {
        const ReplicationStats r = run_replication(cfg, 0.45, rep);
        const double total = r.reward_owner_paid + r.reward_delegators_paid + r.reward_burned;
        CHECK(total == doctest::Approx(7.5).epsilon(1e-12));
        // every non-owner delegates somewhere
        const std::uint64_t delegated =
            std::accumulate(r.delegation_counts.begin(), r.delegation_counts.end(), 0ull);
        CHECK(delegated == cfg.n - r.k);
        CHECK(r.proposer_pool < r.delegation_counts.size());
        // malicious pools always exist here, so never degenerate
        CHECK_FALSE(r.degenerate);
    }
}

TEST_CASE("per-replication utilities recompute from the counts") {
    const DiscreteConfig cfg = config(3, 1, 2.0, 0.6, 1);
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        const ReplicationStats r = run_replication(cfg, 0.5, rep);
        if (r.k == 0) continue;
        REQUIRE(r.owner_utility_at_threshold.has_value());
        CHECK(*r.owner_utility_at_threshold ==
              doctest::Approx(0.6 * 2.0 / (r.k + 1.0) - 0.5).epsilon(1e-12));
        if (cfg.n == r.k) continue;
        REQUIRE(r.mean_delegator_utility.has_value());
        double acc = 0.0;
        for (const auto d : r.delegation_counts)
            if (d > 0) acc += (1.0 + d) * 0.4 * 2.0 / (cfg.n + cfg.m);
        acc /= (cfg.n - r.k);
        CHECK(*r.mean_delegator_utility == doctest::Approx(acc).epsilon(1e-12));
        CHECK(*r.indifference_gap ==
              doctest::Approx(*r.owner_utility_at_threshold - acc).epsilon(1e-12));
    }
}

TEST_CASE("pool ownership count follows the binomial law") {
    // k ~ Binomial(n, F(threshold)); z-test on the mean over replications
    const std::uint64_t n = 1000, reps = 1000;
    const double t = 0.3;
    const DiscreteConfig cfg = config(n, 50, 1000.0, 1.0, reps, 2718);
    const SimulationSummary s = simulate(cfg, t);
    const double p = 0.3;
    const double se = std::sqrt(n * p * (1 - p) / static_cast<double>(reps));
    CHECK(std::abs(s.mean_k - n * p) < 4.0 * se);
    CHECK(s.degenerate_count == 0);
}

TEST_CASE("delegators spread evenly across pools") {
    // honest pools should absorb delegations in proportion to their count
    const DiscreteConfig cfg = config(5000, 500, 5000.0, 0.95, 1, 99);
    const ReplicationStats r = run_replication(cfg, 0.5, 0);
    const std::uint64_t honest_delegated =
        std::accumulate(r.delegation_counts.begin(), r.delegation_counts.begin() + r.k, 0ull);
    const double share = static_cast<double>(honest_delegated) / (cfg.n - r.k);
    const double want = static_cast<double>(r.k) / (r.k + cfg.m);
    CHECK(share == doctest::Approx(want).epsilon(0.05));
}

TEST_CASE("mean-field gap matches the continuum and scales with n") {
    auto u = make_uniform(1.0);
    // r = R n / H and m = n M / H reproduce the continuum instance at any n
    for (std::uint64_t n : {100ull, 10000ull}) {
        const DiscreteConfig cfg = config(n, n / 2, static_cast<double>(n), 1.0);
        const double c = 0.5;
        const GameParams p{1.0, 0.5, 1.0, 1.0};
        const double own = p.R / (u->cdf(c) + 0.5);
        CHECK(mean_field_gap(cfg, c) == doctest::Approx(own - c).epsilon(1e-12));
    }
}

TEST_CASE("best response reproduces the continuum threshold") {
    const double want = 0.780776406404415;
    CHECK(best_response_threshold(config(100, 50, 100.0, 1.0)) ==
          doctest::Approx(want).epsilon(1e-8));
    CHECK(best_response_threshold(config(10000, 5000, 10000.0, 1.0)) ==
          doctest::Approx(want).epsilon(1e-8));
    // interior split
    CHECK(best_response_threshold(config(1000, 500, 1000.0, 0.9)) ==
          doctest::Approx(0.586504233686232).epsilon(1e-8));
}

TEST_CASE("best response at and below the sustainability bound") {
    // lambda == m/(n+m): zero threshold; below: rejected
    CHECK(best_response_threshold(config(100, 50, 100.0, 1.0 / 3.0)) == 0.0);
    CHECK_THROWS_AS(best_response_threshold(config(100, 50, 100.0, 0.2)), ValidationError);
}

TEST_CASE("simulate solves for the threshold when none is given") {
    const DiscreteConfig cfg = config(500, 250, 500.0, 1.0, 25);
    const SimulationSummary s = simulate(cfg);
    CHECK(s.threshold == doctest::Approx(0.780776406404415).epsilon(1e-8));
    CHECK_FALSE(s.unsustainable);
    CHECK(s.replications == 25);
    // mean security should sit near the continuum value
    CHECK(s.mean_security == doctest::Approx(0.609611796797792).epsilon(0.02));
    // the indifference gap is near zero at the fixed point
    CHECK(std::abs(s.mean_gap) < 5.0 * s.gap_std_error + 1e-3);
}

TEST_CASE("unsustainable share simulates the empty outcome") {
    const DiscreteConfig cfg = config(100, 50, 100.0, 0.2, 10);
    const SimulationSummary s = simulate(cfg);
    CHECK(s.unsustainable);
    CHECK(s.threshold == 0.0);
    CHECK(s.mean_k == 0.0);
    CHECK(s.mean_security == 0.0);
    CHECK(s.degenerate_count == 0);  // malicious pools still exist
}

TEST_CASE("summary keeps replications only when asked") {
    const DiscreteConfig cfg = config(50, 10, 50.0, 1.0, 8);
    CHECK(simulate(cfg, 0.5).per_replication.empty());
    CHECK(simulate(cfg, 0.5, true).per_replication.size() == 8);
}

TEST_CASE("convergence study tracks the continuum across sizes") {
    const GameParams p{1.0, 0.5, 1.0, 1.0};
    const auto pts = convergence_study(p, make_uniform(1.0), {100, 400}, 50, 4242);
    REQUIRE(pts.size() == 2);
    for (const ConvergencePoint& pt : pts) {
        CHECK(pt.m == pt.n / 2);
        CHECK(pt.continuum_threshold == doctest::Approx(0.780776406404415).epsilon(1e-9));
        CHECK(pt.deviation < 0.02);
        CHECK(pt.deviation ==
              doctest::Approx(std::abs(pt.discrete_threshold - pt.continuum_threshold)));
    }
}

TEST_CASE("m never reaches n in the study scaling") {
    // M/H close to 1 would round m up to n without the clamp
    const GameParams p{1.0, 0.99, 1.0, 1.0};
    const auto pts = convergence_study(p, make_uniform(1.0), {10}, 5, 1);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].m == 9);  // min(n-1, round(n*M/H))
}
