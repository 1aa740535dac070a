#pragma once

#include "stakepool/distribution.hpp"
#include "stakepool/game.hpp"

namespace stakepool {

// Unique threshold equilibrium of the base game. Above the existence bound
// lambda > M/(H+M) this bisects the monotone indifference gap
//   g(c) = lambda R/(F(c)H+M) - (1-lambda) R/((1-F(c))H) - c
// to |g| < 1e-10 R. At the bound: AllDelegate corner (c* = 0); below it:
// NoInterior (the all-delegate measures are still reported).
EquilibriumResult solve_threshold_equilibrium(const GameParams& params,
                                              const CostDistribution& dist);

// Inverse map lambda(c*) for 0 < c* < T.
double lambda_from_cstar(double cstar, const GameParams& params,
                         const CostDistribution& dist);

// Equilibrium with lambda forced to 1, the security-maximal choice.
EquilibriumResult security_max_cstar(const GameParams& params,
                                     const CostDistribution& dist);

// Social welfare W(c*) = P/(P+M) * H - P * E[X | X < c*], P = F(c*) H.
double welfare(double cstar, const GameParams& params,
               const CostDistribution& dist);

// d/dc of the welfare functional: f(c) [H^2 M/(F(c)H+M)^2 - H c].
double welfare_derivative(double cstar, const GameParams& params,
                          const CostDistribution& dist);

// Welfare-maximizing threshold. For concave F: the HM >= (H+M)^2 T corner
// returns c* = T, otherwise golden-section on the concave W (tol 1e-9).
// A CDF failing the numeric concavity screen falls back to a 1e4-point grid
// plus local refinement and is flagged heuristic. The reported lambda comes
// from lambda_from_cstar and may exceed 1 when no feasible share implements
// the optimum (small R); callers decide how loudly to warn.
DesignResult welfare_optimal_cstar(const GameParams& params,
                                   const CostDistribution& dist);

// Fills the measure identities for a given threshold without solving.
EquilibriumResult equilibrium_summary(double cstar, const GameParams& params,
                                      const CostDistribution& dist,
                                      Corner corner = Corner::Interior);

} // namespace stakepool
