#pragma once

#include <array>
#include <complex>
#include <optional>

namespace stakepool {

// Closed forms for uniform costs on [0,1], cross-validated against the
// generic solver in tests.

struct SecurityMaxUniform {
    double cstar = 0.0;
    bool clipped = false; // raw quadratic root exceeded the support
};

// Positive root of H c^2 + M c - R = 0, clipped to [0,1] with a corner flag.
SecurityMaxUniform security_max_uniform(double H, double M, double R);

struct WelfareOptimalUniform {
    double cstar = 0.0;
    bool radical_ok = true; // false: fell back to golden-section search
};

// Real root of the welfare first-order condition c (cH+M)^2 = HM, evaluated
// through the published radical in complex arithmetic. The cube-root branch
// is picked by the W'(c*) = 0 check (|W'| < 1e-8); if no branch yields a real
// root in [0,1] the function falls back to golden-section and flags it.
WelfareOptimalUniform welfare_optimal_uniform(double H, double M);

// General-lambda equilibrium cubic with full discriminant machinery.
// Coefficients are a = -H^2, b = H(H-M), d = H(M+R),
// e = -lambda R(H+M) + MR (the letter c is skipped; this tuple is the
// negation of the expanded indifference polynomial, so the roots are
// identical; do not "fix" the signs).
struct CubicSolution {
    double a = 0, b = 0, d = 0, e = 0;
    double delta0 = 0; // b^2 - 3ad
    double delta1 = 0; // 2b^3 - 9abd + 27a^2 e
    std::complex<double> C;
    std::array<std::complex<double>, 3> roots;
    std::optional<double> feasible_root; // the unique real root in (0,1)
};

// Solves the equilibrium cubic for uniform costs. Requires
// lambda in (M/(H+M), 1]; throws NumericError when no real root lands in
// (0,1) (the infeasible side of the existence bound).
CubicSolution equilibrium_cubic(double H, double M, double R, double lambda);

} // namespace stakepool
