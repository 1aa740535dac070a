#include "stakepool/discrete_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stakepool/continuum.hpp"
#include "stakepool/errors.hpp"

namespace stakepool {

void validate(const DiscreteConfig& config) {
    if (config.n == 0)
        throw ValidationError("simulation needs at least one honest agent");
    if (config.m >= config.n)
        throw ValidationError("the model assumes n > m");
    if (!(config.R > 0.0) || !std::isfinite(config.R))
        throw ValidationError("R must be positive and finite");
    if (!(config.lambda >= 0.0 && config.lambda <= 1.0))
        throw ValidationError("lambda must lie in [0,1]");
    if (!config.dist)
        throw ValidationError("simulation needs a cost distribution");
    if (config.replications == 0)
        throw ValidationError("replications must be at least 1");
}

ReplicationStats run_replication(const DiscreteConfig& config,
                                 double threshold, std::uint64_t rep_index) {
    validate(config);
    if (!(threshold >= 0.0))
        throw ValidationError("threshold must be nonnegative");
    SplitMix64 rng = replication_stream(config.seed, rep_index);
    const std::uint64_t n = config.n;
    const std::uint64_t m = config.m;

    // Pass 1: cost draws in agent order decide who opens a pool.
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i)
        if (config.dist->sample(rng) < threshold) ++k;

    ReplicationStats st;
    st.k = k;
    const std::uint64_t pools = k + m;
    if (pools == 0) {
        st.degenerate = true;
        return st;
    }

    // Pass 2: each non-owner delegates to a uniformly random pool
    // (honest pools first, then malicious).
    st.delegation_counts.assign(pools, 0);
    const std::uint64_t delegators = n - k;
    for (std::uint64_t j = 0; j < delegators; ++j)
        ++st.delegation_counts[rng.next_below(pools)];

    // One block: the proposer pool is drawn proportional to its stake
    // 1 + d_i by picking a single stake unit out of the n + m total.
    const std::uint64_t unit = rng.next_below(n + m);
    std::uint64_t acc = 0;
    for (std::uint64_t i = 0; i < pools; ++i) {
        acc += 1 + st.delegation_counts[i];
        if (unit < acc) {
            st.proposer_pool = i;
            break;
        }
    }

    const double r = config.R;
    const double lam = config.lambda;
    st.reward_owner_paid = lam * r;
    if (st.delegation_counts[st.proposer_pool] > 0) {
        st.reward_delegators_paid = (1.0 - lam) * r;
    } else {
        st.reward_burned = (1.0 - lam) * r;
    }

    st.security = static_cast<double>(k) / static_cast<double>(pools);

    // Expected payoffs over the proposer draw. A marginal owner's pool wins
    // with probability (1+d)/(n+m), which averages to 1/(k+m) across pools.
    if (k > 0)
        st.owner_utility_at_threshold =
            lam * r / static_cast<double>(pools) - threshold;
    if (delegators > 0) {
        double total = 0.0;
        for (std::uint64_t i = 0; i < pools; ++i) {
            const std::uint64_t d = st.delegation_counts[i];
            if (d == 0) continue;
            // d delegators, each expecting (1+d)/(n+m) * (1-lam) r / d.
            total += (1.0 + static_cast<double>(d)) /
                     static_cast<double>(n + m) * (1.0 - lam) * r;
        }
        st.mean_delegator_utility = total / static_cast<double>(delegators);
    }
    if (st.owner_utility_at_threshold && st.mean_delegator_utility)
        st.indifference_gap =
            *st.owner_utility_at_threshold - *st.mean_delegator_utility;
    return st;
}

double mean_field_gap(const DiscreteConfig& config, double c) {
    validate(config);
    if (!(c >= 0.0)) throw ValidationError("threshold must be nonnegative");
    const double F = config.dist->cdf(c);
    const double n = static_cast<double>(config.n);
    const double m = static_cast<double>(config.m);
    const double own = config.lambda * config.R / (F * n + m);
    const double del =
        config.lambda >= 1.0
            ? 0.0
            : (1.0 - config.lambda) * config.R / ((1.0 - F) * n);
    return own - del - c;
}

double best_response_threshold(const DiscreteConfig& config, double damping) {
    validate(config);
    if (!(damping > 0.0 && damping <= 1.0))
        throw ValidationError("damping must lie in (0,1]");
    const double n = static_cast<double>(config.n);
    const double m = static_cast<double>(config.m);
    const double bound = m / (n + m);
    if (config.lambda == bound ||
        std::abs(config.lambda - bound) <= 1e-12 * bound)
        return 0.0;
    if (config.lambda < bound) {
        std::ostringstream msg;
        msg << "lambda = " << config.lambda
            << " is below the pooling bound m/(n+m) = " << bound;
        throw ValidationError(msg.str());
    }

    const auto target = [&](double c) {
        const double F = config.dist->cdf(c);
        const double own = config.lambda * config.R / (F * n + m);
        const double del =
            config.lambda >= 1.0
                ? 0.0
                : (1.0 - config.lambda) * config.R / ((1.0 - F) * n);
        return own - del;
    };

    const double T = config.dist->support_upper();
    double cap;
    if (std::isfinite(T)) {
        cap = T;
    } else {
        cap = 1.0;
        int probes = 0;
        while (target(cap) > cap) {
            cap *= 2.0;
            if (++probes > 900)
                throw NumericError(
                    "mean-field map has no bounded fixed point below 2^900");
        }
    }

    double c = std::clamp(config.dist->quantile(0.5), 0.0, cap);
    std::vector<double> tail;
    for (int it = 0; it < 10000; ++it) {
        double next_target = target(c);
        if (!std::isfinite(next_target))
            next_target = next_target > 0.0 ? cap : 0.0;
        const double next =
            std::clamp(c + damping * (next_target - c), 0.0, cap);
        const double step = std::abs(next - c);
        c = next;
        if (step < 1e-9) return c;
        if (it >= 9995) tail.push_back(c);
    }
    std::ostringstream msg;
    msg << "best-response iteration did not settle in 10000 steps; "
           "last iterates:";
    for (double v : tail) msg << ' ' << v;
    throw NumericError(msg.str());
}

SimulationSummary simulate(const DiscreteConfig& config,
                           std::optional<double> threshold,
                           bool keep_replications) {
    validate(config);
    SimulationSummary out;
    if (threshold) {
        if (!(*threshold >= 0.0))
            throw ValidationError("threshold must be nonnegative");
        out.threshold = *threshold;
    } else {
        const double bound = static_cast<double>(config.m) /
                             static_cast<double>(config.n + config.m);
        if (config.lambda < bound &&
            std::abs(config.lambda - bound) > 1e-12 * bound) {
            out.threshold = 0.0;
            out.unsustainable = true;
        } else {
            out.threshold = best_response_threshold(config);
        }
    }

    out.replications = config.replications;
    double sum_k = 0.0;
    double sum_security = 0.0;
    std::vector<double> gaps;
    gaps.reserve(config.replications);
    for (std::uint64_t rep = 0; rep < config.replications; ++rep) {
        ReplicationStats st = run_replication(config, out.threshold, rep);
        sum_k += static_cast<double>(st.k);
        sum_security += st.security;
        if (st.degenerate) ++out.degenerate_count;
        if (st.indifference_gap) gaps.push_back(*st.indifference_gap);
        if (keep_replications) out.per_replication.push_back(std::move(st));
    }
    const double reps = static_cast<double>(config.replications);
    out.mean_k = sum_k / reps;
    out.mean_security = sum_security / reps;
    if (!gaps.empty()) {
        double mean = 0.0;
        for (double g : gaps) mean += g;
        mean /= static_cast<double>(gaps.size());
        out.mean_gap = mean;
        if (gaps.size() > 1) {
            double ss = 0.0;
            for (double g : gaps) ss += (g - mean) * (g - mean);
            const double var = ss / static_cast<double>(gaps.size() - 1);
            out.gap_std_error =
                std::sqrt(var / static_cast<double>(gaps.size()));
        }
    }
    return out;
}

std::vector<ConvergencePoint> convergence_study(
    const GameParams& params, const DistPtr& dist,
    const std::vector<std::uint64_t>& sizes, std::uint64_t replications,
    std::uint64_t seed) {
    validate(params);
    if (!dist) throw ValidationError("convergence study needs a distribution");
    if (sizes.empty())
        throw ValidationError("convergence study needs population sizes");
    const EquilibriumResult continuum =
        solve_threshold_equilibrium(params, *dist);

    std::vector<ConvergencePoint> out;
    out.reserve(sizes.size());
    for (std::uint64_t n : sizes) {
        DiscreteConfig cfg;
        cfg.n = n;
        // Match the continuum instance: malicious count and per-block reward
        // scale with n so the mean-field equation is n-invariant.
        const double scaled_m =
            static_cast<double>(n) * params.M / params.H;
        cfg.m = std::min<std::uint64_t>(
            n > 0 ? n - 1 : 0,
            static_cast<std::uint64_t>(std::llround(scaled_m)));
        cfg.R = params.R * static_cast<double>(n) / params.H;
        cfg.lambda = params.lambda;
        cfg.dist = dist;
        cfg.replications = replications;
        cfg.seed = seed;

        ConvergencePoint pt;
        pt.n = n;
        pt.m = cfg.m;
        pt.continuum_threshold = continuum.cstar;
        pt.discrete_threshold = best_response_threshold(cfg);
        pt.deviation = std::abs(pt.discrete_threshold - continuum.cstar);
        const SimulationSummary sim =
            simulate(cfg, pt.discrete_threshold, false);
        pt.mean_gap = sim.mean_gap;
        pt.gap_std_error = sim.gap_std_error;
        out.push_back(pt);
    }
    return out;
}

} // namespace stakepool
