#pragma once

#include <vector>

#include "stakepool/continuum.hpp"

namespace stakepool {

// Share of block rewards captured by malicious pools at the equilibrium of
// lambda: mu(lambda) = M lambda / (F(c*(lambda)) H + M).
// Domain: lambda in [M/(H+M), 1]; the left endpoint is the c* = 0 corner
// where mu equals M/(H+M) exactly.
double malicious_reward_share(double lambda, const GameParams& params,
                              const CostDistribution& dist);

enum class MuShape {
    Increasing,
    IncreasingThenDecreasing,
};

struct SweepPoint {
    double lambda = 0;
    double cstar = 0;
    double P = 0;
    double mu = 0;
    double security = 0;
    double welfare = 0;
};

struct RewardShareCurve {
    std::vector<SweepPoint> points;
    MuShape shape = MuShape::Increasing;
    // True when the finite-difference sign pattern of mu is exactly (+)*(-)*.
    // The classifier reports findings; it only asserts for the callers that
    // need the claim (minimize_malicious_reward).
    bool unimodal_verified = true;
    double min_lambda = 0; // argmin of mu over the grid
    double min_mu = 0;
};

// Evaluates (lambda, c*, P, mu, security, W) over an explicit grid inside
// [M/(H+M), 1] and classifies the mu shape.
RewardShareCurve sweep_lambda(const GameParams& params,
                              const CostDistribution& dist,
                              const std::vector<double>& grid);

// Minimizes mu over [lambda_floor, 1] by the endpoint rule (the curve is
// increasing or increasing-then-decreasing for uniform costs, so interior
// minima cannot occur). A 1e3-point grid re-verifies that shape and throws
// DiagnosticError when the supplied distribution breaks it.
DesignResult minimize_malicious_reward(const GameParams& params,
                                       const CostDistribution& dist,
                                       double lambda_floor);

} // namespace stakepool
