#pragma once

#include <optional>

#include "stakepool/continuum.hpp"

namespace stakepool {

// ---------------------------------------------------------------- costly --

struct CostlyDelegationParams {
    GameParams base;
    double c_d = 0.0; // per-delegation cost, >= 0 (0 reduces to the base game)
};

// Interior solutions of the costly-delegation indifference equation exist
// only above this share (below it even a zero-cost agent prefers delegating).
double costly_lambda_bound(const CostlyDelegationParams& cd);

enum class CostlyRegime {
    Delegation, // lambda > M/(H+M): delegation individually rational
    Idle,       // lambda in [bound, M/(H+M)]: delegating loses to idling;
                // the binding threshold is idle_pool_threshold's c'
    NoPooling,  // lambda at/below the interior bound: c* = 0 corner
};

struct CostlyResult {
    double cstar = 0.0; // root of the shifted indifference equation
    CostlyRegime regime = CostlyRegime::Delegation;
};

// Threshold of the costly-delegation game: bisection on
//   c = lambda R/(F(c)H+M) - (1-lambda) R/((1-F(c))H) + c_d.
// The returned c* strictly exceeds the base-game threshold at equal lambda.
CostlyResult solve_costly_delegation(const CostlyDelegationParams& cd,
                                     const CostDistribution& dist);

// Pool-vs-idle threshold c' solving lambda R/(F(c')H+M) = c', defined for
// lambda in [costly bound, M/(M+H)] where delegation is dominated by idling.
// Throws ValidationError outside that regime (use solve_costly_delegation).
double idle_pool_threshold(const CostlyDelegationParams& cd,
                           const CostDistribution& dist);

// Delegate-vs-idle participation: (1-lambda) R / ((1-F(c*)) H) >= c_d,
// evaluated at the scenario's lambda.
bool delegation_participation_check(double cstar,
                                    const CostlyDelegationParams& cd,
                                    const CostDistribution& dist);

// Largest security achievable when delegation costs c_d: maximizes c* over
// lambda subject to both the interior indifference solution and the
// participation constraint. The feasible set is an interval in lambda and
// c*(lambda) is increasing, so the optimum sits on the participation
// boundary; found by grid scan + bisection refinement, ties toward smaller
// lambda. Empty feasible set: reports the all-idle outcome (lambda = 1,
// threshold from the pool-vs-idle equation, corner AllIdle).
DesignResult max_security_costly(const CostlyDelegationParams& cd,
                                 const CostDistribution& dist);

// ------------------------------------------------------------ endogenous --

struct EndogenousParams {
    GameParams base;
    double theta = 0.0; // fault tolerance in [0, 1/2]
};

// Smallest c with F(c)H/(F(c)H+M) >= 1-theta, i.e. F(c) >= (1-theta)M/(theta H).
// Throws ValidationError when even full participation cannot reach the
// security target (requires H/(H+M) > 1-theta).
double endogenous_threshold_cost(const EndogenousParams& ep,
                                 const CostDistribution& dist);

struct EndogenousDesign {
    double c_theta = 0.0;
    double lambda_min = 0.0;
    bool achievable = false; // lambda_min <= 1
};

// Smallest share for which the equilibrium threshold clears c_theta:
//   lambda_min = [ (c^t/R)(F(c^t)H+M)(1-F(c^t))H + F(c^t)H+M ] / (H+M).
// achievable = false flags lambda_min > 1 (no split attains full security).
EndogenousDesign endogenous_lambda_bound(const EndogenousParams& ep,
                                         const CostDistribution& dist);

// Security under the endogenous-reward rule: min(1, base security + theta).
double endogenous_security(double base_security, double theta);

// ----------------------------------------------------------- competition --

enum class CompetitionRegime {
    Disrupted,       // race to lambda = 1... then undercutting: malicious
                     // pools capture all delegated stake
    FixedEquivalent, // binding floor above M/(H+M): play the fixed game there
};

struct CompetitionOutcome {
    CompetitionRegime regime = CompetitionRegime::Disrupted;
    double effective_lambda = 0.0;
    std::optional<EquilibriumResult> equilibrium; // absent when disrupted
};

// Return competition between pools. Without a floor on lambda (or with a
// floor at/below M/(H+M)) the equilibrium is disrupted; a binding floor
// reproduces the fixed game at lambda = floor.
CompetitionOutcome classify_return_competition(
    const GameParams& params, const CostDistribution& dist,
    std::optional<double> lambda_floor);

} // namespace stakepool
