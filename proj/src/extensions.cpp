#include "stakepool/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detail/numerics.hpp"
#include "stakepool/errors.hpp"

namespace stakepool {
namespace {

bool near(double a, double b) {
    return a == b || std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void validate_costly(const CostlyDelegationParams& cd) {
    validate(cd.base);
    if (!(cd.c_d >= 0.0) || !std::isfinite(cd.c_d))
        throw ValidationError("delegation cost c_d must be nonnegative");
}

// Root of lambda R/(F(c)H+M) - (1-lambda) R/((1-F)H) - c + shift = 0; the
// base-game equation for shift = 0, the costly-delegation one for shift = c_d.
double solve_shifted(const GameParams& p, const CostDistribution& dist,
                     double shift) {
    const auto g = [&](double c) {
        const double F = dist.cdf(c);
        const double own = p.lambda * p.R / (F * p.H + p.M);
        const double del = p.lambda >= 1.0
                               ? 0.0
                               : (1.0 - p.lambda) * p.R / ((1.0 - F) * p.H);
        return own - del - c + shift;
    };
    const double T = dist.support_upper();
    double hi;
    if (std::isfinite(T)) {
        hi = T;
        if (g(T) >= 0.0) return T;
    } else {
        hi = 1.0;
        int probes = 0;
        while (g(hi) > 0.0) {
            hi *= 2.0;
            if (++probes > 900)
                throw NumericError("no sign change of the shifted "
                                   "indifference gap below 2^900");
        }
    }
    return detail::bisect_decreasing(g, 0.0, hi, 1e-10 * p.R);
}

// Root of lambda R/(F(c)H+M) = c, the pool-vs-idle indifference.
double solve_idle(const GameParams& p, const CostDistribution& dist) {
    if (p.lambda == 0.0) return 0.0;
    const auto g = [&](double c) {
        return p.lambda * p.R / (dist.cdf(c) * p.H + p.M) - c;
    };
    const double T = dist.support_upper();
    double hi;
    if (std::isfinite(T)) {
        hi = T;
        if (g(T) >= 0.0) return T;
    } else {
        hi = 1.0;
        int probes = 0;
        while (g(hi) > 0.0) {
            hi *= 2.0;
            if (++probes > 900)
                throw NumericError(
                    "no sign change of the pool-vs-idle gap below 2^900");
        }
    }
    return detail::bisect_decreasing(g, 0.0, hi, 1e-10 * p.R);
}

// Per-delegator return at threshold cstar, the left side of the
// participation constraint.
double delegator_return(double cstar, const GameParams& p,
                        const CostDistribution& dist) {
    if (p.lambda >= 1.0) return 0.0;
    const double F = dist.cdf(cstar);
    return (1.0 - p.lambda) * p.R / ((1.0 - F) * p.H);
}

} // namespace

double costly_lambda_bound(const CostlyDelegationParams& cd) {
    validate_costly(cd);
    const auto& p = cd.base;
    const double raw =
        p.M * (p.R - cd.c_d * p.H) / (p.R * (p.H + p.M));
    return std::max(0.0, raw);
}

CostlyResult solve_costly_delegation(const CostlyDelegationParams& cd,
                                     const CostDistribution& dist) {
    validate_costly(cd);
    const GameParams& p = cd.base;
    const double idle_floor = costly_lambda_bound(cd);
    const double delegate_floor = p.lambda_bound();

    CostlyResult out;
    if (p.lambda > delegate_floor && !near(p.lambda, delegate_floor)) {
        out.regime = CostlyRegime::Delegation;
        out.cstar = solve_shifted(p, dist, cd.c_d);
    } else if (cd.c_d > 0.0 &&
               (p.lambda > idle_floor || near(p.lambda, idle_floor) ||
                near(p.lambda, delegate_floor))) {
        out.regime = CostlyRegime::Idle;
        out.cstar = solve_idle(p, dist);
    } else if (near(p.lambda, delegate_floor)) {
        // c_d = 0: the game collapses to the base game's AllDelegate corner.
        out.regime = CostlyRegime::Delegation;
        out.cstar = 0.0;
    } else {
        out.regime = CostlyRegime::NoPooling;
        out.cstar = 0.0;
    }
    return out;
}

double idle_pool_threshold(const CostlyDelegationParams& cd,
                           const CostDistribution& dist) {
    validate_costly(cd);
    const GameParams& p = cd.base;
    const double lo = costly_lambda_bound(cd);
    const double hi = p.lambda_bound();
    const bool inside = (p.lambda > lo || near(p.lambda, lo)) &&
                        (p.lambda < hi || near(p.lambda, hi));
    if (!inside) {
        std::ostringstream msg;
        msg << "lambda = " << p.lambda << " is outside the idle regime ["
            << lo << ", " << hi
            << "]; use solve_costly_delegation for regime-aware solving";
        throw ValidationError(msg.str());
    }
    return solve_idle(p, dist);
}

bool delegation_participation_check(double cstar,
                                    const CostlyDelegationParams& cd,
                                    const CostDistribution& dist) {
    validate_costly(cd);
    if (!(cstar >= 0.0))
        throw ValidationError("cstar must be nonnegative");
    return delegator_return(cstar, cd.base, dist) >= cd.c_d;
}

DesignResult max_security_costly(const CostlyDelegationParams& cd,
                                 const CostDistribution& dist) {
    validate_costly(cd);
    const GameParams& base = cd.base;
    const double floor = base.lambda_bound();

    const auto induced_cstar = [&](double lambda) {
        GameParams p = base;
        p.lambda = lambda;
        return solve_shifted(p, dist, cd.c_d);
    };
    // Participation slack at lambda's induced threshold; feasible when >= 0.
    const auto slack = [&](double lambda) {
        GameParams p = base;
        p.lambda = lambda;
        return delegator_return(induced_cstar(lambda), p, dist) - cd.c_d;
    };

    // c*(lambda) is increasing, so the best feasible lambda is the largest
    // one; scan for the feasibility edge, then sharpen it by bisection.
    const int grid = 512;
    int last_ok = -1;
    for (int i = grid; i >= 1; --i) {
        if (slack(floor + (1.0 - floor) * i / grid) >= 0.0) {
            last_ok = i;
            break;
        }
    }

    DesignResult out;
    if (last_ok < 0) {
        // Delegating never beats idling: the designer still maximizes pool
        // participation with lambda = 1, and everyone else idles. The
        // threshold equation matches the zero-cost benchmark's, so this is
        // the knife-edge of the benchmark ordering.
        GameParams p = base;
        p.lambda = 1.0;
        out.lambda = 1.0;
        out.cstar = solve_idle(p, dist);
        out.corner = Corner::AllIdle;
        out.note = "no reward share lets delegating beat idling; non-pool "
                   "agents stay idle";
        out.equilibrium = equilibrium_summary(out.cstar, p, dist,
                                              Corner::AllIdle);
        out.objective = out.equilibrium.security;
    } else {
        double lo = floor + (1.0 - floor) * last_ok / grid;
        if (last_ok == grid) {
            out.lambda = 1.0;
        } else {
            double hi = floor + (1.0 - floor) * (last_ok + 1) / grid;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (slack(mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            out.lambda = lo;
        }
        GameParams p = base;
        p.lambda = out.lambda;
        out.cstar = induced_cstar(out.lambda);
        out.corner = Corner::Interior;
        out.equilibrium =
            equilibrium_summary(out.cstar, p, dist, Corner::Interior);
        out.objective = out.equilibrium.security;
    }

    const EquilibriumResult benchmark = security_max_cstar(base, dist);
    if (out.objective > benchmark.security + 1e-9)
        throw DiagnosticError(
            "costly-delegation security exceeded the zero-cost benchmark; "
            "the solver state is numerically inconsistent");
    return out;
}

double endogenous_threshold_cost(const EndogenousParams& ep,
                                 const CostDistribution& dist) {
    validate(ep.base);
    if (!(ep.theta >= 0.0 && ep.theta <= 0.5))
        throw ValidationError("theta must lie in [0, 1/2]");
    if (ep.base.M == 0.0) return 0.0;
    if (ep.theta == 0.0)
        throw ValidationError(
            "theta = 0 demands full security, unreachable with M > 0");
    const double level =
        (1.0 - ep.theta) * ep.base.M / (ep.theta * ep.base.H);
    if (level >= 1.0) {
        std::ostringstream msg;
        msg << "security target 1-theta = " << 1.0 - ep.theta
            << " is unreachable: full honest participation only gives "
            << ep.base.H / (ep.base.H + ep.base.M);
        throw ValidationError(msg.str());
    }
    return dist.quantile(level);
}

EndogenousDesign endogenous_lambda_bound(const EndogenousParams& ep,
                                         const CostDistribution& dist) {
    EndogenousDesign out;
    out.c_theta = endogenous_threshold_cost(ep, dist);
    const auto& p = ep.base;
    const double F = out.c_theta > 0.0 ? dist.cdf(out.c_theta) : 0.0;
    const double pooled = F * p.H + p.M;
    out.lambda_min =
        ((out.c_theta / p.R) * pooled * (1.0 - F) * p.H + pooled) /
        (p.H + p.M);
    out.achievable = out.lambda_min <= 1.0;
    return out;
}

double endogenous_security(double base_security, double theta) {
    return std::min(1.0, base_security + theta);
}

CompetitionOutcome classify_return_competition(
    const GameParams& params, const CostDistribution& dist,
    std::optional<double> lambda_floor) {
    GameParams p = params;
    p.lambda = 1.0;
    validate(p);
    CompetitionOutcome out;
    if (lambda_floor && !(*lambda_floor >= 0.0 && *lambda_floor <= 1.0))
        throw ValidationError("lambda floor must lie in [0,1]");
    const double bound = p.lambda_bound();
    if (!lambda_floor || *lambda_floor < bound ||
        near(*lambda_floor, bound)) {
        // Pools undercut each other's owner share until malicious pools,
        // indifferent to returns, absorb all delegated stake.
        out.regime = CompetitionRegime::Disrupted;
        return out;
    }
    p.lambda = *lambda_floor;
    out.regime = CompetitionRegime::FixedEquivalent;
    out.effective_lambda = *lambda_floor;
    out.equilibrium = solve_threshold_equilibrium(p, dist);
    return out;
}

} // namespace stakepool
