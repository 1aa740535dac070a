#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "stakepool/rng.hpp"

namespace stakepool {

// Cost distribution of honest agents: CDF F on [0, T), atomless, F(0) = 0.
// T may be +infinity for custom distributions. Immutable after construction,
// safe to share across threads.
class CostDistribution {
public:
    virtual ~CostDistribution() = default;

    // F(c). Saturates to 1 for c >= T. Throws ValidationError for c < 0.
    virtual double cdf(double c) const = 0;

    // Density f(c). Default: central difference of cdf with
    // h = 1e-6 * max(1, c), which is all custom distributions provide.
    virtual double pdf(double c) const;

    // Upper support bound T; may be +infinity.
    virtual double support_upper() const = 0;

    // Smallest c with F(c) >= u, u in [0,1]. Default: bisection with a
    // doubling probe for unbounded support.
    virtual double quantile(double u) const;

    // E[X | X < cstar]. Requires F(cstar) > 0. Default: adaptive Simpson on
    // the by-parts form (cstar*F(cstar) - int_0^cstar F) / F(cstar), which
    // avoids differentiating a user-supplied cdf.
    virtual double truncated_mean(double cstar) const;

    // Inverse-CDF draw from the caller's stream.
    double sample(SplitMix64& rng) const { return quantile(rng.next_double()); }

    // Spec string round-trip, e.g. "uniform", "power:alpha=0.5".
    virtual std::string describe() const = 0;
};

using DistPtr = std::shared_ptr<const CostDistribution>;

// Uniform on [0, T]. The canonical family of the closed forms is T = 1.
DistPtr make_uniform(double upper = 1.0);

// F(c) = c^alpha on [0, 1]; requires 0 < alpha <= 1 so that F'' <= 0.
DistPtr make_power(double alpha);

// Piecewise-linear CDF through (cost, F) knots. First knot must be (0, 0),
// last F must reach 1; costs strictly increasing, F nondecreasing.
DistPtr make_table(std::vector<std::pair<double, double>> knots);

// Test/embedding hook: cdf-only distribution, possibly unbounded support.
DistPtr make_custom(std::function<double(double)> cdf, double upper,
                    std::string name = "custom");

// Parses the CLI spec strings: "uniform", "power:alpha=<float>",
// "table:<path>" (CSV rows "cost,F"). Throws ValidationError on anything else.
DistPtr parse_distribution(const std::string& spec);

} // namespace stakepool
