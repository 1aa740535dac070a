"""Staking-pool formation: threshold equilibria, reward design, simulation.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its functional surface.  Distributions are spec strings shared
with the CLI: ``"uniform"``, ``"uniform:T=2"``, ``"power:alpha=0.5"``,
``"table:<knots-or-csv>"``.
"""

from ._core import (
    NumericError,
    ValidationError,
    best_response_threshold,
    classify_competition,
    convergence_study,
    describe_distribution,
    endogenous_design,
    lambda_from_cstar,
    malicious_reward_share,
    max_security_costly,
    minimize_malicious_reward,
    security_max,
    simulate,
    solve,
    solve_costly,
    sweep,
    welfare_optimal,
)

__all__ = [
    "NumericError",
    "ValidationError",
    "best_response_threshold",
    "classify_competition",
    "convergence_study",
    "describe_distribution",
    "endogenous_design",
    "lambda_from_cstar",
    "malicious_reward_share",
    "max_security_costly",
    "minimize_malicious_reward",
    "security_max",
    "simulate",
    "solve",
    "solve_costly",
    "sweep",
    "welfare_optimal",
]

__version__ = "0.1.0"
