#include "stakepool/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "detail/numerics.hpp"
#include "stakepool/errors.hpp"

namespace stakepool {
namespace {

void check_cost(double c) {
    if (!(c >= 0.0)) throw ValidationError("cost must be nonnegative");
}

void check_level(double u) {
    if (!(u >= 0.0 && u <= 1.0))
        throw ValidationError("probability level must lie in [0,1]");
}

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double parse_num(const std::string& text, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size() || text.empty())
        throw ValidationError(std::string("cannot parse ") + what + " from '" +
                              text + "'");
    return v;
}

} // namespace

// ------------------------------------------------------- virtual defaults --

double CostDistribution::pdf(double c) const {
    check_cost(c);
    const double h = 1e-6 * std::max(1.0, c);
    const double lo = std::max(0.0, c - h);
    const double hi = c + h;
    return (cdf(hi) - cdf(lo)) / (hi - lo);
}

double CostDistribution::quantile(double u) const {
    check_level(u);
    if (u <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = support_upper();
    if (!std::isfinite(hi)) {
        hi = 1.0;
        int probes = 0;
        while (cdf(hi) < u) {
            lo = hi;
            hi *= 2.0;
            if (++probes > 1024) {
                std::ostringstream msg;
                msg << "quantile probe found no c with F(c) >= " << u
                    << " below " << hi;
                throw NumericError(msg.str());
            }
        }
    }
    // Leftmost c with F(c) >= u.
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) >= u)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double CostDistribution::truncated_mean(double cstar) const {
    if (!(cstar > 0.0))
        throw ValidationError("truncated_mean needs a positive threshold");
    const double T = support_upper();
    const double top = std::isfinite(T) ? std::min(cstar, T) : cstar;
    const double mass = cdf(top);
    if (mass <= 0.0)
        throw ValidationError(
            "truncated_mean: F(cstar) = 0, conditional mean undefined");
    const double area = detail::adaptive_simpson(
        [this](double x) { return cdf(x); }, 0.0, top, 1e-10);
    return (top * mass - area) / mass;
}

// ----------------------------------------------------------------- uniform --

namespace {

class UniformDist final : public CostDistribution {
public:
    explicit UniformDist(double upper) : T_(upper) {
        if (!(upper > 0.0) || !std::isfinite(upper))
            throw ValidationError("uniform upper bound must be positive and finite");
    }

    double cdf(double c) const override {
        check_cost(c);
        return c >= T_ ? 1.0 : c / T_;
    }

    double pdf(double c) const override {
        check_cost(c);
        return c > T_ ? 0.0 : 1.0 / T_;
    }

    double support_upper() const override { return T_; }

    double quantile(double u) const override {
        check_level(u);
        return u * T_;
    }

    double truncated_mean(double cstar) const override {
        if (!(cstar > 0.0))
            throw ValidationError("truncated_mean needs a positive threshold");
        return 0.5 * std::min(cstar, T_);
    }

    std::string describe() const override {
        return T_ == 1.0 ? "uniform" : "uniform:T=" + format_num(T_);
    }

private:
    double T_;
};

class PowerDist final : public CostDistribution {
public:
    explicit PowerDist(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw ValidationError("power alpha must lie in (0,1]");
    }

    double cdf(double c) const override {
        check_cost(c);
        return c >= 1.0 ? 1.0 : std::pow(c, alpha_);
    }

    double pdf(double c) const override {
        check_cost(c);
        if (c > 1.0) return 0.0;
        if (c == 0.0)
            return alpha_ == 1.0 ? 1.0
                                 : std::numeric_limits<double>::infinity();
        return alpha_ * std::pow(c, alpha_ - 1.0);
    }

    double support_upper() const override { return 1.0; }

    double quantile(double u) const override {
        check_level(u);
        return std::pow(u, 1.0 / alpha_);
    }

    double truncated_mean(double cstar) const override {
        if (!(cstar > 0.0))
            throw ValidationError("truncated_mean needs a positive threshold");
        return alpha_ / (alpha_ + 1.0) * std::min(cstar, 1.0);
    }

    std::string describe() const override {
        return "power:alpha=" + format_num(alpha_);
    }

private:
    double alpha_;
};

class TableDist final : public CostDistribution {
public:
    explicit TableDist(std::vector<std::pair<double, double>> knots)
        : knots_(std::move(knots)) {
        if (knots_.size() < 2)
            throw ValidationError("table distribution needs at least 2 knots");
        if (knots_.front().first != 0.0 || knots_.front().second != 0.0)
            throw ValidationError("table distribution must start at (0, 0)");
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (!(knots_[i].first > knots_[i - 1].first))
                throw ValidationError("table costs must be strictly increasing");
            if (knots_[i].second < knots_[i - 1].second - 1e-15)
                throw ValidationError("table CDF values must be nondecreasing");
            if (knots_[i].second > 1.0 + 1e-9)
                throw ValidationError("table CDF values must stay within [0,1]");
            knots_[i].second = std::min(knots_[i].second, 1.0);
        }
        if (std::abs(knots_.back().second - 1.0) > 1e-9)
            throw ValidationError("table CDF must reach 1 at the last knot");
        knots_.back().second = 1.0;
        std::size_t top = knots_.size() - 1;
        while (top > 0 && knots_[top - 1].second >= 1.0) --top;
        T_ = knots_[top].first;
    }

    double cdf(double c) const override {
        check_cost(c);
        if (c >= T_) return 1.0;
        const auto seg = segment_at(c);
        return lerp_f(seg, c);
    }

    double pdf(double c) const override {
        check_cost(c);
        if (c >= T_) return 0.0;
        const auto seg = segment_at(c);
        return slope(seg);
    }

    double support_upper() const override { return T_; }

    double quantile(double u) const override {
        check_level(u);
        if (u <= 0.0) return 0.0;
        // Leftmost cost reaching level u: flats resolve to their left edge.
        std::size_t j = 1;
        while (knots_[j].second < u) ++j;
        const double f0 = knots_[j - 1].second;
        const double f1 = knots_[j].second;
        const double c0 = knots_[j - 1].first;
        const double c1 = knots_[j].first;
        return c0 + (u - f0) / (f1 - f0) * (c1 - c0);
    }

    double truncated_mean(double cstar) const override {
        if (!(cstar > 0.0))
            throw ValidationError("truncated_mean needs a positive threshold");
        const double top = std::min(cstar, T_);
        const double mass = cdf(top);
        if (mass <= 0.0)
            throw ValidationError(
                "truncated_mean: F(cstar) = 0, conditional mean undefined");
        // f is a step function, so the first moment is exact segment-wise.
        double moment = 0.0;
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            const double a = knots_[i - 1].first;
            if (a >= top) break;
            const double b = std::min(knots_[i].first, top);
            const double s = slope(i);
            moment += s * 0.5 * (b * b - a * a);
        }
        return moment / mass;
    }

    std::string describe() const override {
        std::string out = "table:";
        for (std::size_t i = 0; i < knots_.size(); ++i) {
            if (i) out += ';';
            out += format_num(knots_[i].first);
            out += ',';
            out += format_num(knots_[i].second);
        }
        return out;
    }

private:
    std::size_t segment_at(double c) const {
        // index i with knots_[i-1].first <= c < knots_[i].first
        const auto it = std::upper_bound(
            knots_.begin(), knots_.end(), c,
            [](double v, const auto& k) { return v < k.first; });
        return static_cast<std::size_t>(
            std::max<std::ptrdiff_t>(1, it - knots_.begin()));
    }

    double slope(std::size_t i) const {
        return (knots_[i].second - knots_[i - 1].second) /
               (knots_[i].first - knots_[i - 1].first);
    }

    double lerp_f(std::size_t i, double c) const {
        return knots_[i - 1].second + slope(i) * (c - knots_[i - 1].first);
    }

    std::vector<std::pair<double, double>> knots_;
    double T_ = 1.0;
};

class CustomDist final : public CostDistribution {
public:
    CustomDist(std::function<double(double)> cdf_fn, double upper,
               std::string name)
        : cdf_fn_(std::move(cdf_fn)), T_(upper), name_(std::move(name)) {
        if (!cdf_fn_) throw ValidationError("custom distribution needs a cdf");
        if (!(upper > 0.0))
            throw ValidationError("custom support bound must be positive");
    }

    double cdf(double c) const override {
        check_cost(c);
        if (c >= T_) return 1.0;
        return std::clamp(cdf_fn_(c), 0.0, 1.0);
    }

    double support_upper() const override { return T_; }

    std::string describe() const override { return name_; }

private:
    std::function<double(double)> cdf_fn_;
    double T_;
    std::string name_;
};

std::vector<std::pair<double, double>> parse_inline_knots(
    const std::string& body) {
    std::vector<std::pair<double, double>> knots;
    std::stringstream ss(body);
    std::string pair_text;
    while (std::getline(ss, pair_text, ';')) {
        const auto comma = pair_text.find(',');
        if (comma == std::string::npos)
            throw ValidationError("table knot '" + pair_text +
                                  "' is not 'cost,F'");
        knots.emplace_back(
            parse_num(pair_text.substr(0, comma), "table knot cost"),
            parse_num(pair_text.substr(comma + 1), "table knot CDF value"));
    }
    return knots;
}

std::vector<std::pair<double, double>> load_knots_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open table CSV '" + path + "'");
    std::vector<std::pair<double, double>> knots;
    std::string line;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        const auto end = line.find_last_not_of(" \t\r");
        const std::string row = line.substr(start, end - start + 1);
        const auto comma = row.find(',');
        if (comma == std::string::npos)
            throw ValidationError("table CSV row '" + row +
                                  "' is not 'cost,F'");
        try {
            knots.emplace_back(parse_num(row.substr(0, comma), "cost"),
                               parse_num(row.substr(comma + 1), "CDF value"));
        } catch (const ValidationError&) {
            if (!header_allowed) throw;
        }
        header_allowed = false;
    }
    return knots;
}

} // namespace

DistPtr make_uniform(double upper) {
    return std::make_shared<UniformDist>(upper);
}

DistPtr make_power(double alpha) { return std::make_shared<PowerDist>(alpha); }

DistPtr make_table(std::vector<std::pair<double, double>> knots) {
    return std::make_shared<TableDist>(std::move(knots));
}

DistPtr make_custom(std::function<double(double)> cdf, double upper,
                    std::string name) {
    return std::make_shared<CustomDist>(std::move(cdf), upper,
                                        std::move(name));
}

DistPtr parse_distribution(const std::string& spec) {
    if (spec == "uniform") return make_uniform(1.0);
    if (spec.rfind("uniform:T=", 0) == 0)
        return make_uniform(parse_num(spec.substr(10), "uniform upper bound"));
    if (spec.rfind("power:alpha=", 0) == 0)
        return make_power(parse_num(spec.substr(12), "power exponent"));
    if (spec.rfind("table:", 0) == 0) {
        const std::string body = spec.substr(6);
        if (body.empty())
            throw ValidationError("table spec needs a path or inline knots");
        return make_table(body.find(';') != std::string::npos
                              ? parse_inline_knots(body)
                              : load_knots_csv(body));
    }
    throw ValidationError(
        "unknown distribution '" + spec +
        "'; expected uniform, uniform:T=<x>, power:alpha=<a>, "
        "table:<csv-path> or table:c0,F0;c1,F1;...");
}

} // namespace stakepool
