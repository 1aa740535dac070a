#include "stakepool/reward_design.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stakepool/errors.hpp"

namespace stakepool {
namespace {

bool near_bound(double lambda, double bound) {
    return lambda == bound || std::abs(lambda - bound) <= 1e-12 * bound;
}

SweepPoint evaluate_point(double lambda, const GameParams& params,
                          const CostDistribution& dist) {
    GameParams p = params;
    p.lambda = lambda;
    validate(p);
    const double bound = p.lambda_bound();
    SweepPoint pt;
    pt.lambda = lambda;
    if (near_bound(lambda, bound)) {
        const EquilibriumResult eq =
            equilibrium_summary(0.0, p, dist, Corner::AllDelegate);
        pt.cstar = 0.0;
        pt.P = eq.P;
        pt.security = eq.security;
        pt.mu = bound; // exact corner value, no limit-taking
        pt.welfare = 0.0;
        return pt;
    }
    if (lambda < bound) {
        std::ostringstream msg;
        msg << "mu(lambda) is defined on [M/(H+M), 1] = [" << bound
            << ", 1]; got lambda = " << lambda;
        throw ValidationError(msg.str());
    }
    const EquilibriumResult eq = solve_threshold_equilibrium(p, dist);
    pt.cstar = eq.cstar;
    pt.P = eq.P;
    pt.security = eq.security;
    pt.mu = p.M * lambda / (eq.P + p.M);
    pt.welfare = welfare(eq.cstar, p, dist);
    return pt;
}

} // namespace

double malicious_reward_share(double lambda, const GameParams& params,
                              const CostDistribution& dist) {
    return evaluate_point(lambda, params, dist).mu;
}

RewardShareCurve sweep_lambda(const GameParams& params,
                              const CostDistribution& dist,
                              const std::vector<double>& grid) {
    if (grid.empty())
        throw ValidationError("sweep needs a nonempty lambda grid");
    RewardShareCurve curve;
    curve.points.reserve(grid.size());
    for (double lambda : grid)
        curve.points.push_back(evaluate_point(lambda, params, dist));

    // Shape from the finite-difference sign pattern: admissible patterns are
    // (+)* and (+)*(-)*; near-zero differences extend the current phase.
    bool seen_down = false;
    bool ok = true;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const double d = curve.points[i].mu - curve.points[i - 1].mu;
        const double tol = 1e-13 * (std::abs(curve.points[i].mu) +
                                    std::abs(curve.points[i - 1].mu) + 1.0);
        if (d > tol && seen_down) ok = false;
        if (d < -tol) seen_down = true;
    }
    curve.shape = seen_down ? MuShape::IncreasingThenDecreasing
                            : MuShape::Increasing;
    curve.unimodal_verified = ok;

    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.points.size(); ++i)
        if (curve.points[i].mu < curve.points[best].mu) best = i;
    curve.min_lambda = curve.points[best].lambda;
    curve.min_mu = curve.points[best].mu;
    return curve;
}

DesignResult minimize_malicious_reward(const GameParams& params,
                                       const CostDistribution& dist,
                                       double lambda_floor) {
    GameParams p = params;
    p.lambda = 1.0;
    validate(p);
    const double bound = p.lambda_bound();
    if (!(lambda_floor <= 1.0) ||
        (lambda_floor < bound && !near_bound(lambda_floor, bound))) {
        std::ostringstream msg;
        msg << "lambda_floor must lie in [M/(H+M), 1] = [" << bound << ", 1]";
        throw ValidationError(msg.str());
    }
    const double lo = lambda_floor < bound ? bound : lambda_floor;

    // Endpoint rule: with mu increasing or increasing-then-decreasing the
    // minimum over [lo, 1] sits at an end. A dense grid re-checks the shape
    // claim before the rule is trusted.
    const int n = 1000;
    std::vector<double> grid(n + 1);
    for (int i = 0; i <= n; ++i)
        grid[static_cast<std::size_t>(i)] = lo + (1.0 - lo) * i / n;
    grid.back() = 1.0;
    const RewardShareCurve curve = sweep_lambda(params, dist, grid);
    if (!curve.unimodal_verified)
        throw DiagnosticError(
            "mu(lambda) is neither increasing nor increasing-then-decreasing "
            "on the interval; the endpoint rule does not apply to this cost "
            "distribution");
    const double mu_lo = curve.points.front().mu;
    const double mu_hi = curve.points.back().mu;
    if (curve.min_mu <
        std::min(mu_lo, mu_hi) - 1e-9 * (1.0 + std::abs(curve.min_mu)))
        throw DiagnosticError(
            "interior grid minimum of mu undercuts both endpoints, "
            "contradicting the verified shape");

    DesignResult out;
    out.lambda = mu_lo <= mu_hi ? lo : 1.0;
    p.lambda = out.lambda;
    const EquilibriumResult eq =
        near_bound(out.lambda, bound)
            ? equilibrium_summary(0.0, p, dist, Corner::AllDelegate)
            : solve_threshold_equilibrium(p, dist);
    out.cstar = eq.cstar;
    out.corner = eq.corner;
    out.objective = mu_lo <= mu_hi ? mu_lo : mu_hi;
    out.equilibrium = eq;
    return out;
}

} // namespace stakepool
