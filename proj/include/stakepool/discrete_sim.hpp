#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stakepool/distribution.hpp"
#include "stakepool/game.hpp"

namespace stakepool {

struct DiscreteConfig {
    std::uint64_t n = 0;      // agents with one unit each
    std::uint64_t m = 0;      // malicious pools
    double R = 1.0;           // block reward paid to the chosen pool
    double lambda = 1.0;      // owner share of the pool reward
    DistPtr dist;             // cost draws: quantile(U[0,1))
    std::uint64_t replications = 100;
    std::uint64_t seed = 42;
};

void validate(const DiscreteConfig& config);

struct ReplicationStats {
    std::uint64_t k = 0;                       // realized pool owners
    std::vector<std::uint64_t> delegation_counts; // size k+m, honest first
    bool degenerate = false;                   // k+m == 0: no pools formed

    // Expectation-form payoffs (over the proposer draw), so a single
    // replication is already an unbiased read on the indifference gap.
    // The owner figure is for a marginal owner whose cost sits exactly at
    // the threshold; its win probability averages to 1/(k+m).
    std::optional<double> owner_utility_at_threshold;
    std::optional<double> mean_delegator_utility;
    std::optional<double> indifference_gap; // owner-at-threshold minus delegator

    double security = 0.0; // k / (k+m)

    // Realized block accounting for the sampled proposer.
    std::uint64_t proposer_pool = 0; // index into delegation_counts
    double reward_owner_paid = 0.0;
    double reward_delegators_paid = 0.0;
    double reward_burned = 0.0; // delegator share of a pool nobody joined
};

// One replication at a fixed participation threshold. Deterministic in
// (config.seed, rep_index): each replication owns an independent RNG stream.
ReplicationStats run_replication(const DiscreteConfig& config,
                                 double threshold, std::uint64_t rep_index);

// Mean-field indifference gap g(c) = lambda r/(F(c)n+m) - (1-lambda) r/((1-F(c))n)
// - c for the discrete population; the fixed point is the continuum analogue.
double mean_field_gap(const DiscreteConfig& config, double c);

// Damped fixed-point iteration on the mean-field map; |step| < 1e-9 or
// NumericError carrying the recent iterates. lambda at the sustainability
// bound returns 0; below it throws ValidationError. The damping factor is
// tunable for steep distributions.
double best_response_threshold(const DiscreteConfig& config,
                               double damping = 0.5);

struct SimulationSummary {
    double threshold = 0.0;
    bool unsustainable = false; // lambda too small for any pooling
    std::uint64_t replications = 0;
    double mean_k = 0.0;
    double mean_security = 0.0;
    double mean_gap = 0.0;      // across non-degenerate replications
    double gap_std_error = 0.0;
    std::uint64_t degenerate_count = 0;
    std::vector<ReplicationStats> per_replication; // kept when requested
};

SimulationSummary simulate(const DiscreteConfig& config,
                           std::optional<double> threshold = std::nullopt,
                           bool keep_replications = false);

struct ConvergencePoint {
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    double discrete_threshold = 0.0;
    double continuum_threshold = 0.0;
    double deviation = 0.0; // |discrete - continuum|
    double mean_gap = 0.0;
    double gap_std_error = 0.0;
};

// Discrete best response vs the continuum threshold across population sizes.
// Per-unit rewards scale as r = R n/H and m = round(n M/H) so every n targets
// the same continuum instance.
std::vector<ConvergencePoint> convergence_study(
    const GameParams& params, const DistPtr& dist,
    const std::vector<std::uint64_t>& sizes, std::uint64_t replications,
    std::uint64_t seed);

} // namespace stakepool
