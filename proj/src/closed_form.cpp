#include "stakepool/closed_form.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "detail/numerics.hpp"
#include "stakepool/errors.hpp"

namespace stakepool {
namespace {

void check_hmr(double H, double M, double R) {
    if (!(H > 0.0) || !std::isfinite(H))
        throw ValidationError("H must be positive and finite");
    if (!(M >= 0.0) || !std::isfinite(M))
        throw ValidationError("M must be nonnegative and finite");
    if (!(R > 0.0) || !std::isfinite(R))
        throw ValidationError("R must be positive and finite");
}

} // namespace

SecurityMaxUniform security_max_uniform(double H, double M, double R) {
    check_hmr(H, M, R);
    SecurityMaxUniform out;
    // Positive root of H c^2 + M c - R = 0, written to avoid cancellation.
    const double root = 2.0 * R / (M + std::sqrt(M * M + 4.0 * H * R));
    out.clipped = root > 1.0;
    out.cstar = out.clipped ? 1.0 : root;
    return out;
}

WelfareOptimalUniform welfare_optimal_uniform(double H, double M) {
    if (!(M > 0.0) || !(H > M))
        throw ValidationError("welfare_optimal_uniform needs H > M > 0");
    using cplx = std::complex<double>;

    // First-order condition c (cH + M)^2 = HM, solved through the published
    // radical. The cube-root argument is rationalized: the direct form
    // -27H^5M - 2H^3M^3 + 3*sqrt(3)*sqrt(27H^10M^2 + 4H^8M^4) cancels
    // catastrophically (it is ~1e-3 out of ~1e1 terms at H=1, M=1/2), and
    // its product with the conjugate is exactly -4H^6M^6.
    const double H3 = H * H * H;
    const double H5 = H3 * H * H;
    const double H8 = H5 * H3;
    const double M2 = M * M;
    const double disc = 27.0 * H8 * H * H * M2 + 4.0 * H8 * M2 * M2;
    const double conj_sum =
        27.0 * H5 * M + 2.0 * H3 * M2 * M + 3.0 * std::sqrt(3.0) * std::sqrt(disc);
    const double z_cubed = -4.0 * H3 * H3 * M2 * M2 * M2 / conj_sum;

    const cplx zeta(-0.5, std::sqrt(3.0) / 2.0);
    const cplx i_sqrt3(0.0, std::sqrt(3.0));
    const double cbrt2 = std::cbrt(2.0);
    const double cbrt4 = cbrt2 * cbrt2;
    const auto wprime = [&](double c) {
        const double pooled = c * H + M;
        return H * H * M / (pooled * pooled) - c * H;
    };

    cplx Z = std::pow(cplx(z_cubed, 0.0), 1.0 / 3.0);
    for (int k = 0; k < 3; ++k, Z *= zeta) {
        const cplx c = (1.0 + i_sqrt3) * M2 / (3.0 * cbrt4 * Z) +
                       (1.0 - i_sqrt3) * Z / (6.0 * cbrt2 * H * H) -
                       2.0 * M / (3.0 * H);
        if (std::abs(c.imag()) < 1e-9 && c.real() >= 0.0 &&
            c.real() <= 1.0 && std::abs(wprime(c.real())) < 1e-8)
            return {c.real(), true};
    }

    // No branch produced the real optimum: fall back to direct maximization
    // of the (concave) welfare and flag the discrepancy.
    const double c = detail::golden_max(
        [&](double x) {
            const double P = x * H;
            return P / (P + M) * H - P * x / 2.0;
        },
        0.0, 1.0, 1e-9);
    return {c, false};
}

CubicSolution equilibrium_cubic(double H, double M, double R, double lambda) {
    check_hmr(H, M, R);
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw ValidationError("lambda must lie in [0,1]");
    using cplx = std::complex<double>;

    CubicSolution sol;
    sol.a = -H * H;
    sol.b = H * (H - M);
    sol.d = H * (M + R);
    sol.e = -lambda * R * (H + M) + M * R;
    sol.delta0 = sol.b * sol.b - 3.0 * sol.a * sol.d;
    sol.delta1 = 2.0 * sol.b * sol.b * sol.b -
                 9.0 * sol.a * sol.b * sol.d +
                 27.0 * sol.a * sol.a * sol.e;

    const double disc =
        sol.delta1 * sol.delta1 - 4.0 * sol.delta0 * sol.delta0 * sol.delta0;
    if (disc >= 0.0) {
        // Pick the sign that adds magnitudes; the other branch cancels.
        const double sq = std::sqrt(disc);
        const double num =
            sol.delta1 >= 0.0 ? sol.delta1 + sq : sol.delta1 - sq;
        sol.C = cplx(std::cbrt(0.5 * num), 0.0);
    } else {
        sol.C = std::pow(cplx(0.5 * sol.delta1, 0.5 * std::sqrt(-disc)),
                         1.0 / 3.0);
    }

    const cplx zeta(-0.5, std::sqrt(3.0) / 2.0); // z = (-1 + i sqrt(3)) / 2
    if (std::abs(sol.C) == 0.0) {
        // C = 0 forces delta1 = 0 and disc = 0, hence delta0 = 0: triple root.
        sol.roots.fill(cplx(-sol.b / (3.0 * sol.a), 0.0));
    } else {
        cplx zk(1.0, 0.0);
        for (auto& root : sol.roots) {
            const cplx Ck = zk * sol.C;
            root = -(cplx(sol.b, 0.0) + Ck + sol.delta0 / Ck) / (3.0 * sol.a);
            zk *= zeta;
        }
    }

    double best_residual = std::numeric_limits<double>::infinity();
    for (const auto& root : sol.roots) {
        if (std::abs(root.imag()) >= 1e-9) continue;
        const double c = root.real();
        if (!(c > 0.0 && c < 1.0)) continue;
        const double residual =
            std::abs(((sol.a * c + sol.b) * c + sol.d) * c + sol.e);
        if (residual < best_residual) {
            best_residual = residual;
            sol.feasible_root = c;
        }
    }
    if (!sol.feasible_root) {
        std::ostringstream msg;
        msg << "equilibrium cubic has no root in (0,1); interior thresholds "
               "require lambda > M/(H+M) = "
            << M / (H + M);
        throw NumericError(msg.str());
    }
    return sol;
}

} // namespace stakepool
