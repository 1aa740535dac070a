#include "stakepool/continuum.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "detail/numerics.hpp"
#include "stakepool/errors.hpp"

namespace stakepool {

void validate(const GameParams& p) {
    if (!(p.H > 0.0) || !std::isfinite(p.H))
        throw ValidationError("H must be positive and finite");
    if (!(p.M >= 0.0) || !std::isfinite(p.M))
        throw ValidationError("M must be nonnegative and finite");
    if (!(p.M < p.H))
        throw ValidationError("the model assumes H > M");
    if (!(p.R > 0.0) || !std::isfinite(p.R))
        throw ValidationError("R must be positive and finite");
    if (!(p.lambda >= 0.0 && p.lambda <= 1.0))
        throw ValidationError("lambda must lie in [0,1]");
}

const char* corner_name(Corner c) {
    switch (c) {
        case Corner::Interior: return "Interior";
        case Corner::AllDelegate: return "AllDelegate";
        case Corner::NoInterior: return "NoInterior";
        case Corner::AllPool: return "AllPool";
        case Corner::AllIdle: return "AllIdle";
    }
    return "Unknown";
}

namespace {

// Marginal agent's pooling-minus-delegating payoff at threshold c. At
// lambda = 1 the delegator term is identically zero even where 1-F
// vanishes, so it is short-circuited rather than left to 0/0.
double indifference_gap(double c, const GameParams& p,
                        const CostDistribution& dist) {
    const double F = dist.cdf(c);
    const double own = p.lambda * p.R / (F * p.H + p.M);
    const double del = p.lambda >= 1.0
                           ? 0.0
                           : (1.0 - p.lambda) * p.R / ((1.0 - F) * p.H);
    return own - del - c;
}

bool near_bound(double lambda, double bound) {
    return lambda == bound || std::abs(lambda - bound) <= 1e-12 * bound;
}

} // namespace

EquilibriumResult equilibrium_summary(double cstar, const GameParams& params,
                                      const CostDistribution& dist,
                                      Corner corner) {
    EquilibriumResult out;
    out.cstar = cstar;
    out.corner = corner;
    const double F = cstar > 0.0 ? dist.cdf(cstar) : 0.0;
    out.P = F * params.H;
    out.I = corner == Corner::AllIdle ? (1.0 - F) * params.H : 0.0;
    out.D = (1.0 - F) * params.H - out.I;
    const double pooled = out.P + params.M;
    out.s = pooled > 0.0 ? out.D / pooled : 0.0;
    out.r = pooled > 0.0 ? params.R / pooled : 0.0;
    out.security = pooled > 0.0 ? out.P / pooled : 0.0;
    return out;
}

EquilibriumResult solve_threshold_equilibrium(const GameParams& params,
                                              const CostDistribution& dist) {
    validate(params);
    const double bound = params.lambda_bound();
    if (near_bound(params.lambda, bound))
        return equilibrium_summary(0.0, params, dist, Corner::AllDelegate);
    if (params.lambda < bound)
        return equilibrium_summary(0.0, params, dist, Corner::NoInterior);

    const auto g = [&](double c) { return indifference_gap(c, params, dist); };
    const double T = dist.support_upper();
    double hi;
    if (std::isfinite(T)) {
        hi = T;
        if (g(T) >= 0.0) // possible only at lambda = 1: R/(H+M) >= T
            return equilibrium_summary(T, params, dist, Corner::AllPool);
    } else {
        hi = 1.0;
        double lo_probe = 0.0;
        int probes = 0;
        while (g(hi) > 0.0) {
            lo_probe = hi;
            hi *= 2.0;
            if (++probes > 900) {
                std::ostringstream msg;
                msg << "indifference gap stayed positive on the probed "
                       "interval ["
                    << lo_probe << ", " << hi << "]";
                throw NumericError(msg.str());
            }
        }
    }
    const double cstar =
        detail::bisect_decreasing(g, 0.0, hi, 1e-10 * params.R);
    return equilibrium_summary(cstar, params, dist, Corner::Interior);
}

double lambda_from_cstar(double cstar, const GameParams& params,
                         const CostDistribution& dist) {
    validate(params);
    if (!(cstar > 0.0))
        throw ValidationError("lambda(cstar) needs cstar > 0");
    if (cstar >= dist.support_upper())
        throw ValidationError(
            "lambda(cstar) is undefined at or beyond the support bound "
            "(the delegator measure vanishes)");
    const double F = dist.cdf(cstar);
    const double own_rate = params.R / (F * params.H + params.M);
    const double del_rate = params.R / ((1.0 - F) * params.H);
    return (cstar + del_rate) / (own_rate + del_rate);
}

EquilibriumResult security_max_cstar(const GameParams& params,
                                     const CostDistribution& dist) {
    GameParams p = params;
    p.lambda = 1.0;
    return solve_threshold_equilibrium(p, dist);
}

double welfare(double cstar, const GameParams& params,
               const CostDistribution& dist) {
    validate(params);
    if (!(cstar >= 0.0))
        throw ValidationError("welfare needs cstar >= 0");
    if (cstar == 0.0) return 0.0;
    const double F = dist.cdf(cstar);
    const double P = F * params.H;
    if (P <= 0.0) return 0.0;
    const double security = P / (P + params.M);
    return security * params.H - P * dist.truncated_mean(cstar);
}

double welfare_derivative(double cstar, const GameParams& params,
                          const CostDistribution& dist) {
    validate(params);
    if (!(cstar >= 0.0))
        throw ValidationError("welfare derivative needs cstar >= 0");
    const double F = dist.cdf(cstar);
    const double pooled = F * params.H + params.M;
    return dist.pdf(cstar) *
           (params.H * params.H * params.M / (pooled * pooled) -
            params.H * cstar);
}

DesignResult welfare_optimal_cstar(const GameParams& params,
                                   const CostDistribution& dist) {
    validate(params);
    if (!(params.M > 0.0))
        throw ValidationError(
            "welfare design needs M > 0 (with M = 0 the objective "
            "degenerates: any vanishing pool measure already yields full "
            "security)");
    const double T = dist.support_upper();
    const double HM = params.H + params.M;

    DesignResult out;
    if (std::isfinite(T) && params.H * params.M >= HM * HM * T) {
        // Welfare still rising at the top of the support.
        out.cstar = T;
        out.corner = Corner::AllPool;
        out.lambda = 1.0;
        if (params.R < T * HM)
            out.note = "welfare optimum sits at the support bound but no "
                       "reward share reaches it (R too small)";
    } else {
        // W' < 0 beyond H/M regardless of F, so the search stays bounded
        // even for unbounded support.
        const double cap = params.H / params.M + 1.0;
        const double B = std::isfinite(T) ? std::min(T, cap) : cap;
        const auto W = [&](double c) { return welfare(c, params, dist); };

        // Theorem-grade concavity needs F'' <= 0; screen it numerically.
        bool concave = true;
        const int screen = 256;
        const double h = B / screen;
        for (int i = 1; i < screen && concave; ++i) {
            const double x = i * h;
            const double d2 =
                dist.cdf(x + h) - 2.0 * dist.cdf(x) + dist.cdf(x - h);
            if (d2 > 1e-9) concave = false;
        }

        // Golden section leaves O(1e-9) abscissa error; a derivative
        // bisection around its result pushes the FOC residual to roundoff.
        const auto polish = [&](double c) {
            const auto Wp = [&](double x) {
                return welfare_derivative(x, params, dist);
            };
            double lo = std::max(0.0, c - 1e-6);
            double hi = std::min(B, c + 1e-6);
            for (int grow = 0; grow < 20 && Wp(lo) <= 0.0 && lo > 0.0; ++grow)
                lo = std::max(0.0, lo - (c - lo) * 2.0);
            for (int grow = 0; grow < 20 && Wp(hi) >= 0.0 && hi < B; ++grow)
                hi = std::min(B, hi + (hi - c) * 2.0);
            if (!(Wp(lo) > 0.0 && Wp(hi) < 0.0)) return c;
            for (int it = 0; it < 80 && hi - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                (Wp(mid) > 0.0 ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };

        if (concave) {
            out.cstar = polish(detail::golden_max(W, 0.0, B, 1e-9));
        } else {
            const int grid = 10000;
            int best = 0;
            double best_w = -std::numeric_limits<double>::infinity();
            for (int i = 0; i <= grid; ++i) {
                const double w = W(B * i / grid);
                if (w > best_w) {
                    best_w = w;
                    best = i;
                }
            }
            const double lo = B * std::max(0, best - 1) / grid;
            const double hi = B * std::min(grid, best + 1) / grid;
            out.cstar = polish(detail::golden_max(W, lo, hi, 1e-9));
            out.heuristic = true;
            out.note = "CDF failed the concavity screen; optimum from grid "
                       "search plus local refinement";
        }
        out.corner = Corner::Interior;
        out.lambda = lambda_from_cstar(out.cstar, params, dist);
        if (out.lambda > 1.0) {
            std::ostringstream msg;
            msg << "no reward share in [0,1] implements the welfare optimum "
                   "(would need lambda = "
                << out.lambda << ")";
            out.note = msg.str();
        }
    }
    out.objective = welfare(out.cstar, params, dist);
    GameParams induced = params;
    induced.lambda = std::min(out.lambda, 1.0);
    out.equilibrium = equilibrium_summary(out.cstar, induced, dist, out.corner);
    return out;
}

} // namespace stakepool
