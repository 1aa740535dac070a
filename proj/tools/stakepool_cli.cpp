// stakepool: command-line frontend for the staking-pool formation toolkit.
//
// Subcommands map 1:1 onto the library surface: solve / design / sweep /
// tables / simulate / costly / endogenous / compete.  Every subcommand
// accepts --json (stable schema, schema_version 1) and --out FILE, and any
// flag may instead come from a flat key=value --config file (command-line
// flags win).
//
// Exit codes: 0 success, 2 validation or usage error, 3 numerical failure,
// 4 self-check table mismatch.

#include "CLI11.hpp"
#include "json.hpp"

#include "stakepool/closed_form.hpp"
#include "stakepool/continuum.hpp"
#include "stakepool/discrete_sim.hpp"
#include "stakepool/distribution.hpp"
#include "stakepool/errors.hpp"
#include "stakepool/extensions.hpp"
#include "stakepool/game.hpp"
#include "stakepool/reward_design.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
using namespace stakepool;

namespace {

constexpr int kSchemaVersion = 1;

std::string fmt(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

// Fixed-point, then trailing zeros (and a bare point) stripped: the style
// used for the published table cells ("0.8", "0.35305").
std::string fmt_trim(double v, int prec) {
    std::string s = fmt(v, prec);
    if (s.find('.') == std::string::npos) return s;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw ValidationError("cannot open output file '" + out_path + "' for writing");
    f << text;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Pull --config out of the raw argument list and append one "--key=value"
// token per config entry not already present on the command line.  CLI11
// then rejects unknown keys exactly as it would reject unknown flags.
std::vector<std::string> apply_config(std::vector<std::string> args) {
    std::string path;
    for (auto it = args.begin(); it != args.end(); ++it) {
        if (*it == "--config") {
            if (it + 1 == args.end())
                throw ValidationError("--config requires a file path");
            path = *(it + 1);
            args.erase(it, it + 2);
            break;
        }
        if (it->rfind("--config=", 0) == 0) {
            path = it->substr(9);
            args.erase(it);
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " is not key=value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config line " + std::to_string(lineno) + " has an empty key");
        const std::string flag = "--" + key;
        bool present = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) { present = true; break; }
        if (!present) args.push_back(flag + "=" + value);
    }
    return args;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError(std::string(what) + ": cannot parse '" + tok + "' as a number");
        }
    }
    if (out.empty()) throw ValidationError(std::string(what) + ": empty list");
    return out;
}

std::vector<std::uint64_t> parse_size_list(const std::string& csv) {
    std::vector<std::uint64_t> out;
    for (double v : parse_double_list(csv, "--convergence")) {
        if (v < 1 || v != std::floor(v))
            throw ValidationError("--convergence sizes must be positive integers");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// shared scenario flags

struct Scenario {
    double H = 1.0;
    double M = 0.0;
    double R = 1.0;
    double lambda = 1.0;
    std::string dist_spec = "uniform";
    bool as_json = false;
    std::string out_path;

    GameParams params() const { return GameParams{H, M, R, lambda}; }
    DistPtr dist() const { return parse_distribution(dist_spec); }

    json params_json() const {
        return json{{"H", H}, {"M", M}, {"R", R}, {"lambda", lambda}, {"dist", dist_spec}};
    }
};

void add_common(CLI::App* sub, Scenario& sc, bool with_lambda) {
    sub->add_option("--H", sc.H, "total honest stake")->capture_default_str();
    sub->add_option("--M", sc.M, "malicious stake")->capture_default_str();
    sub->add_option("--R", sc.R, "per-block reward")->capture_default_str();
    if (with_lambda)
        sub->add_option("--lambda", sc.lambda, "pool owner's reward share in [0,1]");
    sub->add_option("--dist", sc.dist_spec,
                    "cost distribution: uniform | uniform:T=<x> | power:alpha=<a> | "
                    "table:<c,F;c,F;...> | table:<file.csv>")
        ->capture_default_str();
    sub->add_flag("--json", sc.as_json, "emit JSON instead of text");
    sub->add_option("--out", sc.out_path, "write output to FILE instead of stdout");
}

json equilibrium_json(const EquilibriumResult& eq) {
    return json{{"cstar", eq.cstar},   {"P", eq.P},
                {"D", eq.D},           {"I", eq.I},
                {"s", eq.s},           {"r", eq.r},
                {"security", eq.security}, {"corner", corner_name(eq.corner)}};
}

std::string equilibrium_text(const EquilibriumResult& eq, double W) {
    std::ostringstream os;
    os << "corner    " << corner_name(eq.corner) << "\n"
       << "cstar     " << fmt(eq.cstar, 6) << "\n"
       << "P         " << fmt(eq.P, 6) << "\n"
       << "D         " << fmt(eq.D, 6) << "\n"
       << "I         " << fmt(eq.I, 6) << "\n"
       << "s         " << fmt(eq.s, 6) << "\n"
       << "r         " << fmt(eq.r, 6) << "\n"
       << "security  " << fmt(eq.security, 6) << "\n"
       << "welfare   " << fmt(W, 6) << "\n";
    return os.str();
}

double induced_mu(const GameParams& p, const EquilibriumResult& eq) {
    const double denom = eq.P + p.M;
    return denom > 0.0 ? p.M * p.lambda / denom : 0.0;
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const Scenario& sc) {
    const GameParams p = sc.params();
    const DistPtr dist = sc.dist();
    const EquilibriumResult eq = solve_threshold_equilibrium(p, *dist);
    const double W = welfare(eq.cstar, p, *dist);

    if (eq.corner == Corner::NoInterior)
        std::cerr << "warning: lambda = " << fmt_trim(p.lambda, 6)
                  << " is below the pooling bound M/(H+M) = "
                  << fmt_trim(p.M / (p.H + p.M), 6)
                  << "; no agent opens a pool and security is zero\n";

    if (sc.as_json) {
        json j{{"schema_version", kSchemaVersion},
               {"command", "solve"},
               {"params", sc.params_json()},
               {"equilibrium", equilibrium_json(eq)},
               {"welfare", W}};
        emit(j.dump(2) + "\n", sc.out_path);
    } else {
        emit(equilibrium_text(eq, W), sc.out_path);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// design

int cmd_design(const Scenario& sc, const std::string& objective, bool floor_set, double floor) {
    const GameParams p = sc.params();
    const DistPtr dist = sc.dist();

    DesignResult res;
    if (objective == "security") {
        const EquilibriumResult eq = security_max_cstar(p, *dist);
        res.lambda = 1.0;
        res.cstar = eq.cstar;
        res.objective = eq.security;
        res.corner = eq.corner;
        res.equilibrium = eq;
    } else if (objective == "welfare") {
        res = welfare_optimal_cstar(p, *dist);
        if (res.lambda > 1.0)
            std::cerr << "warning: " << res.note << "\n";
    } else if (objective == "min-malicious") {
        res = minimize_malicious_reward(p, *dist, floor_set ? floor : p.lambda_bound());
    } else {
        throw ValidationError("--objective must be one of: security, welfare, min-malicious");
    }

    GameParams induced = p;
    induced.lambda = std::min(res.lambda, 1.0);
    const EquilibriumResult eq = res.equilibrium;
    const double W = welfare(eq.cstar, induced, *dist);
    const double mu = induced_mu(induced, eq);

    if (sc.as_json) {
        json j{{"schema_version", kSchemaVersion},
               {"command", "design"},
               {"objective", objective},
               {"params", sc.params_json()},
               {"result",
                {{"lambda", res.lambda},
                 {"cstar", res.cstar},
                 {"objective_value", res.objective},
                 {"heuristic", res.heuristic}}},
               {"induced", {{"mu", mu}, {"security", eq.security}, {"welfare", W}}},
               {"equilibrium", equilibrium_json(eq)}};
        if (!res.note.empty()) j["note"] = res.note;
        emit(j.dump(2) + "\n", sc.out_path);
    } else {
        std::ostringstream os;
        os << "objective        " << objective << "\n"
           << "lambda           " << fmt(res.lambda, 6) << "\n"
           << "cstar            " << fmt(res.cstar, 6) << "\n"
           << "objective value  " << fmt(res.objective, 6) << "\n"
           << "mu               " << fmt(mu, 6) << "\n"
           << "security         " << fmt(eq.security, 6) << "\n"
           << "welfare          " << fmt(W, 6) << "\n";
        if (res.heuristic) os << "heuristic        yes\n";
        if (!res.note.empty()) os << "note             " << res.note << "\n";
        emit(os.str(), sc.out_path);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const Scenario& sc, int points, const std::string& lambdas_csv) {
    const GameParams p = sc.params();
    const DistPtr dist = sc.dist();

    std::vector<double> grid;
    if (!lambdas_csv.empty()) {
        grid = parse_double_list(lambdas_csv, "--lambdas");
    } else {
        if (points < 2) throw ValidationError("--points must be at least 2");
        const double lo = p.M / (p.H + p.M);
        for (int i = 0; i < points; ++i)
            grid.push_back(lo + (1.0 - lo) * static_cast<double>(i) / (points - 1));
        grid.back() = 1.0;
    }

    const RewardShareCurve sw = sweep_lambda(p, *dist, grid);

    if (sc.as_json) {
        json pts = json::array();
        for (const auto& pt : sw.points)
            pts.push_back(json{{"lambda", pt.lambda},
                               {"cstar", pt.cstar},
                               {"P", pt.P},
                               {"mu", pt.mu},
                               {"security", pt.security},
                               {"welfare", pt.welfare}});
        json j{{"schema_version", kSchemaVersion},
               {"command", "sweep"},
               {"params", sc.params_json()},
               {"points", pts},
               {"shape", sw.shape == MuShape::Increasing ? "Increasing"
                                                         : "IncreasingThenDecreasing"},
               {"unimodal_verified", sw.unimodal_verified},
               {"min_lambda", sw.min_lambda},
               {"min_mu", sw.min_mu}};
        emit(j.dump(2) + "\n", sc.out_path);
    } else {
        std::ostringstream os;
        os << "lambda,cstar,P,mu,security,welfare\n";
        for (const auto& pt : sw.points)
            os << fmt(pt.lambda, 6) << ',' << fmt(pt.cstar, 6) << ',' << fmt(pt.P, 6) << ','
               << fmt(pt.mu, 6) << ',' << fmt(pt.security, 6) << ',' << fmt(pt.welfare, 6)
               << "\n";
        emit(os.str(), sc.out_path);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// tables: recompute the published benchmark tables and self-check the cells.

struct CellFail {
    std::string where;
    double got = 0, want = 0, tol = 0;
};

void check(std::vector<CellFail>& fails, const std::string& where, double got, double want,
           double tol) {
    if (!(std::abs(got - want) <= tol)) fails.push_back({where, got, want, tol});
}

int cmd_tables(const Scenario& sc) {
    struct MRow {
        const char* label;
        double M;
    };
    const MRow Ms[] = {{"0.5", 0.5}, {"0.4", 0.4}, {"1/3", 1.0 / 3.0}};

    const auto uniform = make_uniform(1.0);
    std::vector<CellFail> fails;
    json jt;

    // Table 1: security-maximizing split (lambda = 1).
    const double t1_c[] = {0.78, 0.82, 0.85};
    const double t1_w[] = {0.305, 0.336, 0.359};
    std::ostringstream t1;
    t1 << "Table 1: security-maximizing reward split\n";
    t1 << "H  M    R  lambda  c*    P     W\n";
    json j1 = json::array();
    for (int i = 0; i < 3; ++i) {
        const GameParams p{1.0, Ms[i].M, 1.0, 1.0};
        const EquilibriumResult eq = security_max_cstar(p, *uniform);
        const double W = welfare(eq.cstar, p, *uniform);
        check(fails, std::string("table1 c* (M=") + Ms[i].label + ")", eq.cstar, t1_c[i], 5e-3);
        check(fails, std::string("table1 W (M=") + Ms[i].label + ")", W, t1_w[i], 5e-3);
        t1 << "1  " << Ms[i].label << "  1  1       " << fmt(eq.cstar, 2) << "  "
           << fmt(eq.P, 2) << "  " << fmt(W, 3) << "\n";
        j1.push_back(json{{"M", Ms[i].M}, {"cstar", eq.cstar}, {"P", eq.P}, {"W", W}});
    }
    jt["table1"] = j1;

    // Table 2: welfare-optimal split.
    const double t2_l[] = {0.83, 0.8, 0.77};
    const double t2_c[] = {0.5, 0.497, 0.491};
    const double t2_w[] = {0.375, 0.431, 0.475};
    std::ostringstream t2;
    t2 << "\nTable 2: welfare-maximizing reward split\n";
    t2 << "H  M    R  lambda  c*     W\n";
    json j2 = json::array();
    for (int i = 0; i < 3; ++i) {
        const GameParams p{1.0, Ms[i].M, 1.0, 1.0};
        const DesignResult d = welfare_optimal_cstar(p, *uniform);
        check(fails, std::string("table2 lambda (M=") + Ms[i].label + ")", d.lambda, t2_l[i], 5e-3);
        check(fails, std::string("table2 c* (M=") + Ms[i].label + ")", d.cstar, t2_c[i], 5e-3);
        check(fails, std::string("table2 W (M=") + Ms[i].label + ")", d.objective, t2_w[i], 5e-3);
        t2 << "1  " << Ms[i].label << "  1  " << pad(fmt_trim(d.lambda, 2), 6) << "  "
           << pad(fmt_trim(d.cstar, 3), 5) << "  " << fmt(d.objective, 3) << "\n";
        j2.push_back(json{{"M", Ms[i].M},
                          {"lambda", d.lambda},
                          {"cstar", d.cstar},
                          {"W", d.objective}});
    }
    jt["table2"] = j2;

    // Table 3: malicious share of rewards at the security-maximizing split.
    const double t3_share[] = {0.390388, 0.327922, 0.282376};
    std::ostringstream t3;
    t3 << "\nTable 3: malicious share of rewards (lambda = 1)\n";
    t3 << "H  M    R  Share of Reward\n";
    json j3 = json::array();
    for (int i = 0; i < 3; ++i) {
        const GameParams p{1.0, Ms[i].M, 1.0, 1.0};
        const double share = malicious_reward_share(1.0, p, *uniform);
        check(fails, std::string("table3 share (M=") + Ms[i].label + ")", share, t3_share[i],
              5e-7);
        t3 << "1  " << Ms[i].label << "  1  " << fmt(share, 6) << "\n";
        j3.push_back(json{{"M", Ms[i].M}, {"share", share}});
    }
    jt["table3"] = j3;

    // Table 4: malicious share at interior splits.  The published cells were
    // computed from thresholds rounded to six decimals, so the self-check
    // applies the same convention.
    struct T4Row {
        const char* label;
        double M, lambda, share;
    };
    const T4Row t4[] = {
        {"0.5", 0.5, 0.99, 0.395647}, {"0.5", 0.5, 0.9, 0.414172},
        {"0.5", 0.5, 0.8, 0.416164},  {"0.5", 0.5, 0.7, 0.409608},
        {"0.5", 0.5, 0.6, 0.396822},  {"0.5", 0.5, 0.5, 0.378318},
        {"0.4", 0.4, 0.9, 0.35305},   {"0.4", 0.4, 0.8, 0.357138},
        {"0.4", 0.4, 0.6, 0.345172},  {"0.4", 0.4, 0.5, 0.331877},
        {"0.4", 0.4, 0.4, 0.313697},  {"1/3", 1.0 / 3.0, 0.9, 0.307422},
        {"1/3", 1.0 / 3.0, 0.5, 0.294599}, {"1/3", 1.0 / 3.0, 0.4, 0.28047},
        {"1/3", 1.0 / 3.0, 0.3, 0.261626},
    };
    std::ostringstream t4os;
    t4os << "\nTable 4: malicious share of rewards at interior splits\n";
    t4os << "H  M    R  lambda  Share of Reward\n";
    json j4 = json::array();
    for (const auto& row : t4) {
        const GameParams p{1.0, row.M, 1.0, row.lambda};
        const CubicSolution cs = equilibrium_cubic(p.H, p.M, p.R, p.lambda);
        const double c_cubic = cs.feasible_root.value();
        const EquilibriumResult eq = solve_threshold_equilibrium(p, *uniform);
        const std::string tag =
            std::string("(M=") + row.label + ", lambda=" + fmt_trim(row.lambda, 2) + ")";
        check(fails, "table4 cubic-vs-bisection " + tag, c_cubic, eq.cstar, 1e-8);
        const double share = row.M * row.lambda / (round6(c_cubic) + row.M);
        check(fails, "table4 share " + tag, share, row.share, 5e-7);
        t4os << "1  " << row.label << "  1  " << pad(fmt_trim(row.lambda, 2), 6) << "  "
             << fmt_trim(round6(share), 6) << "\n";
        j4.push_back(json{{"M", row.M},
                          {"lambda", row.lambda},
                          {"cstar", c_cubic},
                          {"share", share}});
    }
    jt["table4"] = j4;

    if (sc.as_json) {
        json j{{"schema_version", kSchemaVersion},
               {"command", "tables"},
               {"tables", jt},
               {"all_match", fails.empty()}};
        if (!fails.empty()) {
            json jf = json::array();
            for (const auto& f : fails)
                jf.push_back(json{{"cell", f.where}, {"got", f.got}, {"want", f.want}});
            j["mismatches"] = jf;
        }
        emit(j.dump(2) + "\n", sc.out_path);
    } else {
        std::ostringstream os;
        os << t1.str() << t2.str() << t3.str() << t4os.str();
        if (fails.empty()) os << "\nall cells match the published values\n";
        emit(os.str(), sc.out_path);
    }

    if (!fails.empty()) {
        std::cerr << "table self-check failed (" << fails.size() << " cell"
                  << (fails.size() == 1 ? "" : "s") << "):\n";
        for (const auto& f : fails)
            std::cerr << "  " << f.where << ": got " << fmt(f.got, 9) << ", expected "
                      << fmt(f.want, 9) << " (tol " << f.tol << ")\n";
        return 4;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const Scenario& sc, std::int64_t n, std::int64_t m_raw, std::uint64_t reps,
                 std::uint64_t seed, bool threshold_set, double threshold,
                 const std::string& convergence_csv, bool per_replication) {
    const DistPtr dist = sc.dist();

    if (!convergence_csv.empty()) {
        const auto sizes = parse_size_list(convergence_csv);
        const GameParams p = sc.params();
        const auto study = convergence_study(p, dist, sizes, reps, seed);
        if (sc.as_json) {
            json pts = json::array();
            for (const auto& pt : study)
                pts.push_back(json{{"n", pt.n},
                                   {"m", pt.m},
                                   {"discrete_threshold", pt.discrete_threshold},
                                   {"continuum_threshold", pt.continuum_threshold},
                                   {"deviation", pt.deviation},
                                   {"mean_gap", pt.mean_gap},
                                   {"gap_std_error", pt.gap_std_error}});
            json j{{"schema_version", kSchemaVersion},
                   {"command", "simulate"},
                   {"params", sc.params_json()},
                   {"replications", reps},
                   {"seed", seed},
                   {"convergence", pts}};
            emit(j.dump(2) + "\n", sc.out_path);
        } else {
            std::ostringstream os;
            os << "n,m,discrete_threshold,continuum_threshold,deviation,mean_gap,gap_std_error\n";
            for (const auto& pt : study)
                os << pt.n << ',' << pt.m << ',' << fmt(pt.discrete_threshold, 6) << ','
                   << fmt(pt.continuum_threshold, 6) << ',' << fmt(pt.deviation, 6) << ','
                   << fmt(pt.mean_gap, 6) << ',' << fmt(pt.gap_std_error, 6) << "\n";
            emit(os.str(), sc.out_path);
        }
        return 0;
    }

    if (n < 1) throw ValidationError("--n must be a positive agent count");
    DiscreteConfig cfg;
    cfg.n = static_cast<std::uint64_t>(n);
    cfg.m = m_raw >= 0 ? static_cast<std::uint64_t>(m_raw)
                       : static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * sc.M / sc.H));
    cfg.R = sc.R;
    cfg.lambda = sc.lambda;
    cfg.dist = dist;
    cfg.replications = reps;
    cfg.seed = seed;

    std::optional<double> thr;
    if (threshold_set) thr = threshold;
    const SimulationSummary sum = simulate(cfg, thr, per_replication);

    if (sum.unsustainable)
        std::cerr << "warning: lambda is at or below the pooling bound m/(n+m); "
                     "simulating the no-pooling outcome (threshold 0)\n";

    if (sc.as_json) {
        json j{{"schema_version", kSchemaVersion},
               {"command", "simulate"},
               {"config",
                {{"n", cfg.n},
                 {"m", cfg.m},
                 {"R", cfg.R},
                 {"lambda", cfg.lambda},
                 {"dist", sc.dist_spec},
                 {"replications", cfg.replications},
                 {"seed", cfg.seed}}},
               {"threshold", sum.threshold},
               {"unsustainable", sum.unsustainable},
               {"aggregates",
                {{"mean_k", sum.mean_k},
                 {"mean_security", sum.mean_security},
                 {"mean_gap", sum.mean_gap},
                 {"gap_std_error", sum.gap_std_error},
                 {"degenerate_count", sum.degenerate_count}}}};
        if (per_replication) {
            json rj = json::array();
            for (const auto& r : sum.per_replication) {
                json e{{"k", r.k},
                       {"security", r.security},
                       {"degenerate", r.degenerate},
                       {"proposer_pool", r.proposer_pool},
                       {"reward",
                        {{"owner", r.reward_owner_paid},
                         {"delegators", r.reward_delegators_paid},
                         {"burned", r.reward_burned}}}};
                if (r.owner_utility_at_threshold)
                    e["owner_utility_at_threshold"] = *r.owner_utility_at_threshold;
                if (r.mean_delegator_utility)
                    e["mean_delegator_utility"] = *r.mean_delegator_utility;
                if (r.indifference_gap) e["indifference_gap"] = *r.indifference_gap;
                rj.push_back(std::move(e));
            }
            j["per_replication"] = std::move(rj);
        }
        emit(j.dump(2) + "\n", sc.out_path);
    } else {
        std::ostringstream os;
        os << "n                 " << cfg.n << "\n"
           << "m                 " << cfg.m << "\n"
           << "threshold         " << fmt(sum.threshold, 6) << "\n"
           << "replications      " << sum.replications << "\n"
           << "mean pools        " << fmt(sum.mean_k, 3) << "\n"
           << "mean security     " << fmt(sum.mean_security, 6) << "\n"
           << "mean gap          " << fmt(sum.mean_gap, 6) << "\n"
           << "gap std error     " << fmt(sum.gap_std_error, 6) << "\n"
           << "degenerate runs   " << sum.degenerate_count << "\n";
        emit(os.str(), sc.out_path);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// costly

int cmd_costly(const Scenario& sc, double cd, bool optimize) {
    CostlyDelegationParams cp;
    cp.base = sc.params();
    cp.c_d = cd;
    const DistPtr dist = sc.dist();

    if (optimize) {
        cp.base.lambda = 1.0;  // placeholder; the search chooses lambda
        const DesignResult d = max_security_costly(cp, *dist);
        if (sc.as_json) {
            json j{{"schema_version", kSchemaVersion},
                   {"command", "costly"},
                   {"optimize", true},
                   {"params", sc.params_json()},
                   {"c_d", cd},
                   {"result",
                    {{"lambda", d.lambda},
                     {"cstar", d.cstar},
                     {"security", d.objective}}},
                   {"equilibrium", equilibrium_json(d.equilibrium)}};
            if (!d.note.empty()) j["note"] = d.note;
            emit(j.dump(2) + "\n", sc.out_path);
        } else {
            std::ostringstream os;
            os << "objective  security (costly delegation)\n"
               << "lambda     " << fmt(d.lambda, 6) << "\n"
               << "cstar      " << fmt(d.cstar, 6) << "\n"
               << "security   " << fmt(d.objective, 6) << "\n";
            if (!d.note.empty()) os << "note       " << d.note << "\n";
            emit(os.str(), sc.out_path);
        }
        return 0;
    }

    const CostlyResult res = solve_costly_delegation(cp, *dist);
    const bool participates = delegation_participation_check(res.cstar, cp, *dist);
    const double idle_floor = costly_lambda_bound(cp);
    const double delegate_floor = cp.base.M / (cp.base.H + cp.base.M);
    const char* regime = res.regime == CostlyRegime::Delegation ? "Delegation"
                         : res.regime == CostlyRegime::Idle     ? "Idle"
                                                                : "NoPooling";

    if (sc.as_json) {
        json j{{"schema_version", kSchemaVersion},
               {"command", "costly"},
               {"optimize", false},
               {"params", sc.params_json()},
               {"c_d", cd},
               {"regime", regime},
               {"cstar", res.cstar},
               {"participation_ok", participates},
               {"bounds", {{"idle_floor", idle_floor}, {"delegation_floor", delegate_floor}}}};
        emit(j.dump(2) + "\n", sc.out_path);
    } else {
        std::ostringstream os;
        os << "regime            " << regime << "\n"
           << "cstar             " << fmt(res.cstar, 6) << "\n"
           << "participation     " << (participates ? "yes" : "no") << "\n"
           << "idle floor        " << fmt(idle_floor, 6) << "\n"
           << "delegation floor  " << fmt(delegate_floor, 6) << "\n";
        emit(os.str(), sc.out_path);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// endogenous

int cmd_endogenous(const Scenario& sc, double theta, bool lambda_set) {
    EndogenousParams ep;
    ep.base = sc.params();
    ep.theta = theta;
    const DistPtr dist = sc.dist();

    const double c_theta = endogenous_threshold_cost(ep, *dist);
    const EndogenousDesign d = endogenous_lambda_bound(ep, *dist);

    json j{{"schema_version", kSchemaVersion},
           {"command", "endogenous"},
           {"params", sc.params_json()},
           {"theta", theta},
           {"c_theta", c_theta},
           {"lambda_min", d.lambda_min},
           {"achievable", d.achievable}};
    std::ostringstream os;
    os << "c_theta      " << fmt(c_theta, 6) << "\n"
       << "lambda_min   " << fmt(d.lambda_min, 6) << "\n"
       << "achievable   " << (d.achievable ? "yes" : "no") << "\n";
    if (!d.achievable)
        os << "note         no reward share in [0,1] sustains the target threshold\n";

    if (lambda_set) {
        const EquilibriumResult eq = solve_threshold_equilibrium(ep.base, *dist);
        const double esec = endogenous_security(eq.security, theta);
        const bool meets = eq.cstar >= c_theta;
        j["at_lambda"] = json{{"lambda", ep.base.lambda},
                              {"cstar", eq.cstar},
                              {"meets_target", meets},
                              {"security", eq.security},
                              {"endogenous_security", esec}};
        os << "at lambda = " << fmt_trim(ep.base.lambda, 6) << ":\n"
           << "  cstar               " << fmt(eq.cstar, 6) << "\n"
           << "  meets target        " << (meets ? "yes" : "no") << "\n"
           << "  security            " << fmt(eq.security, 6) << "\n"
           << "  endogenous security " << fmt(esec, 6) << "\n";
    }

    if (sc.as_json)
        emit(j.dump(2) + "\n", sc.out_path);
    else
        emit(os.str(), sc.out_path);
    return 0;
}

// ---------------------------------------------------------------------------
// compete

int cmd_compete(const Scenario& sc, bool floor_set, double floor) {
    GameParams p = sc.params();
    const DistPtr dist = sc.dist();
    std::optional<double> fl;
    if (floor_set) fl = floor;

    const CompetitionOutcome out = classify_return_competition(p, *dist, fl);
    const bool disrupted = out.regime == CompetitionRegime::Disrupted;

    if (sc.as_json) {
        json j{{"schema_version", kSchemaVersion},
               {"command", "compete"},
               {"params", sc.params_json()},
               {"regime", disrupted ? "Disrupted" : "FixedEquivalent"},
               {"effective_lambda", out.effective_lambda}};
        if (floor_set) j["floor"] = floor;
        if (out.equilibrium) j["equilibrium"] = equilibrium_json(*out.equilibrium);
        emit(j.dump(2) + "\n", sc.out_path);
    } else {
        std::ostringstream os;
        os << "regime            " << (disrupted ? "Disrupted" : "FixedEquivalent") << "\n";
        if (disrupted) {
            os << "note              competition bids the owner share to the pooling bound;\n"
                  "                  no stable pool structure survives\n";
        } else {
            os << "effective lambda  " << fmt(out.effective_lambda, 6) << "\n";
            GameParams eff = p;
            eff.lambda = out.effective_lambda;
            os << equilibrium_text(*out.equilibrium,
                                   welfare(out.equilibrium->cstar, eff, *dist));
        }
        emit(os.str(), sc.out_path);
    }
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    std::vector<std::string> raw(argv + 1, argv + argc);
    std::vector<std::string> args;
    try {
        args = apply_config(std::move(raw));
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"staking-pool formation: equilibria, reward design, and simulation"};
    app.footer("Any subcommand also accepts --config FILE with flat key=value lines\n"
               "(# comments allowed); explicit command-line flags take precedence.");
    app.require_subcommand(1);

    Scenario sc;

    auto* solve = app.add_subcommand("solve", "threshold equilibrium for a fixed reward split");
    add_common(solve, sc, true);
    solve->get_option("--lambda")->required();

    auto* design = app.add_subcommand("design", "choose the reward split for an objective");
    add_common(design, sc, false);
    std::string objective = "security";
    design->add_option("--objective", objective, "security | welfare | min-malicious")
        ->capture_default_str();
    double design_floor = 0.0;
    auto* floor_opt_design =
        design->add_option("--floor", design_floor, "lower bound on lambda (min-malicious)");

    auto* sweep = app.add_subcommand("sweep", "sweep lambda and tabulate the malicious share");
    add_common(sweep, sc, false);
    int points = 25;
    sweep->add_option("--points", points, "grid size from the pooling bound to 1")
        ->capture_default_str();
    std::string lambdas_csv;
    sweep->add_option("--lambdas", lambdas_csv, "explicit comma-separated lambda grid");

    auto* tables = app.add_subcommand("tables", "recompute the benchmark tables and self-check");
    add_common(tables, sc, false);

    auto* simulate_cmd = app.add_subcommand("simulate", "discrete agent-based Monte Carlo");
    add_common(simulate_cmd, sc, true);
    std::int64_t sim_n = 0, sim_m = -1;
    std::uint64_t reps = 100, seed = 42;
    simulate_cmd->add_option("--n", sim_n, "number of honest agents");
    simulate_cmd->add_option("--m", sim_m, "malicious units (default: round(n*M/H))");
    simulate_cmd->add_option("--reps", reps, "Monte Carlo replications")->capture_default_str();
    simulate_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
    double sim_threshold = 0.0;
    auto* thr_opt = simulate_cmd->add_option("--threshold", sim_threshold,
                                             "pool-opening cost threshold (default: best response)");
    std::string convergence_csv;
    simulate_cmd->add_option("--convergence", convergence_csv,
                             "comma-separated agent counts for a convergence study");
    bool per_replication = false;
    simulate_cmd->add_flag("--per-replication", per_replication,
                           "include per-replication stats in JSON output");

    auto* costly = app.add_subcommand("costly", "equilibria with costly delegation");
    add_common(costly, sc, true);
    double cd = 0.0;
    costly->add_option("--cd", cd, "per-unit delegation cost")->required();
    bool optimize = false;
    costly->add_flag("--optimize", optimize, "search the security-maximizing feasible lambda");

    auto* endo = app.add_subcommand("endogenous", "reward splits for an attack-level target");
    add_common(endo, sc, true);
    double theta = 0.0;
    endo->add_option("--theta", theta, "tolerated malicious proposer share in [0, 1/2]")
        ->required();

    auto* compete = app.add_subcommand("compete", "pool-return competition classification");
    add_common(compete, sc, false);
    double compete_floor = 0.0;
    auto* floor_opt_compete =
        compete->add_option("--floor", compete_floor, "protocol floor on the owner share");

    std::vector<const char*> ptrs;
    ptrs.reserve(args.size() + 1);
    ptrs.push_back("stakepool");
    for (const auto& a : args) ptrs.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(sc);
        if (design->parsed())
            return cmd_design(sc, objective, floor_opt_design->count() > 0, design_floor);
        if (sweep->parsed()) return cmd_sweep(sc, points, lambdas_csv);
        if (tables->parsed()) return cmd_tables(sc);
        if (simulate_cmd->parsed())
            return cmd_simulate(sc, sim_n, sim_m, reps, seed, thr_opt->count() > 0, sim_threshold,
                                convergence_csv, per_replication);
        if (costly->parsed()) return cmd_costly(sc, cd, optimize);
        if (endo->parsed())
            return cmd_endogenous(sc, theta, endo->get_option("--lambda")->count() > 0);
        if (compete->parsed())
            return cmd_compete(sc, floor_opt_compete->count() > 0, compete_floor);
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
