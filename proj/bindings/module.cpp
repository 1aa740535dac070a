// Python bindings: a thin functional layer over the C++ core. Scalar
// arguments in, plain dicts/lists out; distributions are passed as the same
// spec strings the CLI accepts ("uniform", "power:alpha=0.5", ...).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stakepool/closed_form.hpp"
#include "stakepool/continuum.hpp"
#include "stakepool/discrete_sim.hpp"
#include "stakepool/distribution.hpp"
#include "stakepool/errors.hpp"
#include "stakepool/extensions.hpp"
#include "stakepool/reward_design.hpp"

namespace py = pybind11;
using namespace stakepool;

namespace {

GameParams make_params(double H, double M, double R, double lam) {
    return GameParams{H, M, R, lam};
}

py::dict eq_dict(const EquilibriumResult& eq) {
    py::dict d;
    d["cstar"] = eq.cstar;
    d["P"] = eq.P;
    d["D"] = eq.D;
    d["I"] = eq.I;
    d["s"] = eq.s;
    d["r"] = eq.r;
    d["security"] = eq.security;
    d["corner"] = corner_name(eq.corner);
    return d;
}

py::dict design_dict(const DesignResult& res) {
    py::dict d;
    d["lambda"] = res.lambda;
    d["cstar"] = res.cstar;
    d["objective"] = res.objective;
    d["corner"] = corner_name(res.corner);
    d["heuristic"] = res.heuristic;
    d["note"] = res.note;
    d["equilibrium"] = eq_dict(res.equilibrium);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "staking-pool formation: threshold equilibria, reward design, simulation";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    m.def(
        "solve",
        [](double H, double M, double R, double lam, const std::string& dist) {
            const GameParams p = make_params(H, M, R, lam);
            const DistPtr d = parse_distribution(dist);
            const EquilibriumResult eq = solve_threshold_equilibrium(p, *d);
            py::dict out = eq_dict(eq);
            out["welfare"] = welfare(eq.cstar, p, *d);
            return out;
        },
        py::arg("H"), py::arg("M"), py::arg("R") = 1.0, py::arg("lam") = 1.0,
        py::arg("dist") = "uniform",
        "Threshold equilibrium of the base game at a fixed reward split.");

    m.def(
        "lambda_from_cstar",
        [](double cstar, double H, double M, double R, const std::string& dist) {
            const GameParams p = make_params(H, M, R, 1.0);
            return lambda_from_cstar(cstar, p, *parse_distribution(dist));
        },
        py::arg("cstar"), py::arg("H"), py::arg("M"), py::arg("R") = 1.0,
        py::arg("dist") = "uniform",
        "Reward share that implements a given interior threshold.");

    m.def(
        "security_max",
        [](double H, double M, double R, const std::string& dist) {
            const GameParams p = make_params(H, M, R, 1.0);
            const DistPtr d = parse_distribution(dist);
            const EquilibriumResult eq = security_max_cstar(p, *d);
            py::dict out = eq_dict(eq);
            out["welfare"] = welfare(eq.cstar, p, *d);
            return out;
        },
        py::arg("H"), py::arg("M"), py::arg("R") = 1.0, py::arg("dist") = "uniform",
        "Equilibrium at lambda = 1, the security-maximizing split.");

    m.def(
        "welfare_optimal",
        [](double H, double M, double R, const std::string& dist) {
            const GameParams p = make_params(H, M, R, 1.0);
            return design_dict(welfare_optimal_cstar(p, *parse_distribution(dist)));
        },
        py::arg("H"), py::arg("M"), py::arg("R") = 1.0, py::arg("dist") = "uniform",
        "Welfare-maximizing threshold and the share implementing it.");

    m.def(
        "malicious_reward_share",
        [](double lam, double H, double M, double R, const std::string& dist) {
            const GameParams p = make_params(H, M, R, lam);
            return malicious_reward_share(lam, p, *parse_distribution(dist));
        },
        py::arg("lam"), py::arg("H"), py::arg("M"), py::arg("R") = 1.0,
        py::arg("dist") = "uniform",
        "Share of rewards captured by malicious pools at the equilibrium of lam.");

    m.def(
        "sweep",
        [](double H, double M, double R, const std::vector<double>& grid,
           const std::string& dist) {
            const GameParams p = make_params(H, M, R, 1.0);
            const RewardShareCurve sw = sweep_lambda(p, *parse_distribution(dist), grid);
            py::list pts;
            for (const auto& pt : sw.points) {
                py::dict e;
                e["lambda"] = pt.lambda;
                e["cstar"] = pt.cstar;
                e["P"] = pt.P;
                e["mu"] = pt.mu;
                e["security"] = pt.security;
                e["welfare"] = pt.welfare;
                pts.append(std::move(e));
            }
            py::dict out;
            out["points"] = std::move(pts);
            out["shape"] = sw.shape == MuShape::Increasing ? "Increasing"
                                                           : "IncreasingThenDecreasing";
            out["unimodal_verified"] = sw.unimodal_verified;
            out["min_lambda"] = sw.min_lambda;
            out["min_mu"] = sw.min_mu;
            return out;
        },
        py::arg("H"), py::arg("M"), py::arg("R"), py::arg("grid"),
        py::arg("dist") = "uniform",
        "Evaluate the reward-share curve over an explicit lambda grid.");

    m.def(
        "minimize_malicious_reward",
        [](double H, double M, double R, double lambda_floor, const std::string& dist) {
            const GameParams p = make_params(H, M, R, 1.0);
            return design_dict(
                minimize_malicious_reward(p, *parse_distribution(dist), lambda_floor));
        },
        py::arg("H"), py::arg("M"), py::arg("R"), py::arg("lambda_floor"),
        py::arg("dist") = "uniform",
        "Smallest malicious reward share over [lambda_floor, 1].");

    m.def(
        "solve_costly",
        [](double H, double M, double R, double lam, double c_d, const std::string& dist) {
            CostlyDelegationParams cp{make_params(H, M, R, lam), c_d};
            const CostlyResult res = solve_costly_delegation(cp, *parse_distribution(dist));
            py::dict out;
            out["cstar"] = res.cstar;
            out["regime"] = res.regime == CostlyRegime::Delegation ? "Delegation"
                            : res.regime == CostlyRegime::Idle     ? "Idle"
                                                                   : "NoPooling";
            return out;
        },
        py::arg("H"), py::arg("M"), py::arg("R"), py::arg("lam"), py::arg("c_d"),
        py::arg("dist") = "uniform",
        "Equilibrium threshold when each delegation costs c_d.");

    m.def(
        "max_security_costly",
        [](double H, double M, double R, double c_d, const std::string& dist) {
            CostlyDelegationParams cp{make_params(H, M, R, 1.0), c_d};
            return design_dict(max_security_costly(cp, *parse_distribution(dist)));
        },
        py::arg("H"), py::arg("M"), py::arg("R"), py::arg("c_d"),
        py::arg("dist") = "uniform",
        "Security-maximizing feasible share under costly delegation.");

    m.def(
        "endogenous_design",
        [](double H, double M, double R, double theta, const std::string& dist) {
            EndogenousParams ep{make_params(H, M, R, 1.0), theta};
            const DistPtr d = parse_distribution(dist);
            const EndogenousDesign res = endogenous_lambda_bound(ep, *d);
            py::dict out;
            out["c_theta"] = res.c_theta;
            out["lambda_min"] = res.lambda_min;
            out["achievable"] = res.achievable;
            return out;
        },
        py::arg("H"), py::arg("M"), py::arg("R"), py::arg("theta"),
        py::arg("dist") = "uniform",
        "Smallest share meeting a tolerated-attack target theta.");

    m.def(
        "classify_competition",
        [](double H, double M, double R, std::optional<double> floor,
           const std::string& dist) {
            const GameParams p = make_params(H, M, R, 1.0);
            const CompetitionOutcome out =
                classify_return_competition(p, *parse_distribution(dist), floor);
            py::dict res;
            res["regime"] = out.regime == CompetitionRegime::Disrupted ? "Disrupted"
                                                                       : "FixedEquivalent";
            res["effective_lambda"] = out.effective_lambda;
            if (out.equilibrium) res["equilibrium"] = eq_dict(*out.equilibrium);
            return res;
        },
        py::arg("H"), py::arg("M"), py::arg("R") = 1.0,
        py::arg("floor") = std::optional<double>{}, py::arg("dist") = "uniform",
        "Outcome of pool-return competition, with or without a share floor.");

    m.def(
        "best_response_threshold",
        [](std::uint64_t n, std::uint64_t m_, double R, double lam, const std::string& dist,
           double damping) {
            DiscreteConfig cfg;
            cfg.n = n;
            cfg.m = m_;
            cfg.R = R;
            cfg.lambda = lam;
            cfg.dist = parse_distribution(dist);
            return best_response_threshold(cfg, damping);
        },
        py::arg("n"), py::arg("m"), py::arg("R"), py::arg("lam") = 1.0,
        py::arg("dist") = "uniform", py::arg("damping") = 0.5,
        "Mean-field best-response threshold of the discrete population.");

    m.def(
        "simulate",
        [](std::uint64_t n, std::uint64_t m_, double R, double lam, const std::string& dist,
           std::uint64_t replications, std::uint64_t seed, std::optional<double> threshold) {
            DiscreteConfig cfg;
            cfg.n = n;
            cfg.m = m_;
            cfg.R = R;
            cfg.lambda = lam;
            cfg.dist = parse_distribution(dist);
            cfg.replications = replications;
            cfg.seed = seed;
            const SimulationSummary sum = simulate(cfg, threshold, false);
            py::dict out;
            out["threshold"] = sum.threshold;
            out["unsustainable"] = sum.unsustainable;
            out["replications"] = sum.replications;
            out["mean_k"] = sum.mean_k;
            out["mean_security"] = sum.mean_security;
            out["mean_gap"] = sum.mean_gap;
            out["gap_std_error"] = sum.gap_std_error;
            out["degenerate_count"] = sum.degenerate_count;
            return out;
        },
        py::arg("n"), py::arg("m"), py::arg("R"), py::arg("lam") = 1.0,
        py::arg("dist") = "uniform", py::arg("replications") = 100,
        py::arg("seed") = 42, py::arg("threshold") = std::optional<double>{},
        "Monte Carlo simulation of the discrete pool-formation game.");

    m.def(
        "convergence_study",
        [](double H, double M, double R, const std::vector<std::uint64_t>& sizes,
           const std::string& dist, std::uint64_t replications, std::uint64_t seed) {
            const GameParams p = make_params(H, M, R, 1.0);
            const auto pts =
                convergence_study(p, parse_distribution(dist), sizes, replications, seed);
            py::list out;
            for (const auto& pt : pts) {
                py::dict e;
                e["n"] = pt.n;
                e["m"] = pt.m;
                e["discrete_threshold"] = pt.discrete_threshold;
                e["continuum_threshold"] = pt.continuum_threshold;
                e["deviation"] = pt.deviation;
                e["mean_gap"] = pt.mean_gap;
                e["gap_std_error"] = pt.gap_std_error;
                out.append(std::move(e));
            }
            return out;
        },
        py::arg("H"), py::arg("M"), py::arg("R"), py::arg("sizes"),
        py::arg("dist") = "uniform", py::arg("replications") = 100, py::arg("seed") = 42,
        "Discrete best response vs the continuum threshold across population sizes.");

    m.def(
        "describe_distribution",
        [](const std::string& spec) { return parse_distribution(spec)->describe(); },
        py::arg("spec"), "Parse a distribution spec string and echo its canonical form.");
}
