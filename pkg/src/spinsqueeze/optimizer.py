"""Deterministic derivative-free optimization of squeezing objectives.

A coarse grid scan (including the bound corners) followed by
coordinate-wise golden-section refinement.  No stochastic search: results
are reproducible bit for bit.  Ties on the grid resolve toward smaller
parameter values, so a coordinate the objective ignores comes back at its
lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from . import protocol
from .protocol import ModelConfig, PulseSequence

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

PARAMETER_NAMES = ("mu", "theta", "duty_cycle", "kappa2", "tau_gap")


@dataclass(frozen=True)
class OptimizationProblem:
    """Named bounded intervals and an evaluation budget.

    parameters maps a subset of {mu, theta, duty_cycle, kappa2, tau_gap}
    to (lower, upper) bounds.  The objective is the combined squeezing in
    dB, minimized.
    """

    parameters: dict
    budget: int = 10_000
    grid_points: int = 16
    tol: float = 1e-6

    def __post_init__(self):
        if not self.parameters:
            raise ValueError("need at least one parameter")
        for name, (lo, hi) in self.parameters.items():
            if name not in PARAMETER_NAMES:
                raise ValueError(f"unknown parameter {name!r}")
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"bounds for {name} must be finite")
            if lo > hi:
                raise ValueError(f"bounds for {name} must satisfy lower <= upper")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")


@dataclass(frozen=True)
class EngineSetup:
    """Everything the objective needs besides the swept parameters."""

    sequence: PulseSequence = PulseSequence()
    n_atoms: int = 100_000_000_000
    mode: str = "two_pulse"
    model: ModelConfig = ModelConfig()

    def with_params(self, params: dict) -> tuple[PulseSequence, ModelConfig]:
        seq, model = self.sequence, self.model
        for name, value in params.items():
            seq, model = protocol._apply_axis(seq, model, name, float(value))
        return seq, model

    def xi2_tot_db(self, params: dict) -> float:
        seq, model = self.with_params(params)
        return protocol.run_analytic(seq, self.n_atoms, self.mode, model).xi2_tot_db

    def xi2_nl_db(self, params: dict) -> float:
        seq, model = self.with_params(params)
        return protocol.run_analytic(seq, self.n_atoms, self.mode, model).xi2_nl_db


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spent(self) -> bool:
        return self.used >= self.limit


def _grid_values(lo: float, hi: float, n: int) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _golden_refine(fun, lo, hi, x0, f0, tol, budget):
    """Golden-section around x0 within [lo, hi]; returns (x, f)."""
    h = max((hi - lo) * 1e-2, tol)
    a, b = max(lo, x0 - h), min(hi, x0 + h)
    if b <= a:
        return x0, f0
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > tol and not budget.spent():
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    fx = fun(x)
    if fx <= f0:
        return x, fx
    return x0, f0


def optimize(
    problem: OptimizationProblem, engine: EngineSetup, objective=None
) -> tuple[dict, float, list]:
    """Minimize the squeezing objective over the named parameters.

    Returns (best_params, best_value_db, trace) where trace lists every
    (params, value) evaluated in order.  Points where the objective raises
    are skipped and recorded in the trace with value = nan; if every point
    fails the optimization errors out.
    """
    if objective is None:
        objective = engine.xi2_tot_db
    names = sorted(problem.parameters)
    budget = _Budget(problem.budget)
    trace: list[tuple[dict, float]] = []

    def evaluate(params: dict) -> float:
        budget.used += 1
        try:
            value = float(objective(params))
        except Exception:  # noqa: BLE001 - failed points are skipped by contract
            trace.append((dict(params), math.nan))
            return math.nan
        trace.append((dict(params), value))
        return value

    # coarse grid including all corners; lexicographic order makes the
    # smaller-coordinate point win ties
    axes = [_grid_values(*problem.parameters[n], problem.grid_points) for n in names]

    best_params: dict | None = None
    best_value = math.inf

    def walk(i: int, current: dict):
        nonlocal best_params, best_value
        if budget.spent():
            return
        if i == len(names):
            value = evaluate(dict(current))
            if not math.isnan(value) and value < best_value:
                best_value = value
                best_params = dict(current)
            return
        for v in axes[i]:
            current[names[i]] = v
            walk(i + 1, current)

    walk(0, {})
    if best_params is None:
        raise RuntimeError("objective failed at every grid point")

    # coordinate-wise golden-section refinement
    for name in names:
        lo, hi = problem.parameters[name]
        if hi == lo or budget.spent():
            continue

        def fun(x, _name=name):
            params = dict(best_params)
            params[_name] = x
            v = evaluate(params)
            return math.inf if math.isnan(v) else v

        x, fx = _golden_refine(
            fun, lo, hi, best_params[name], best_value, problem.tol, budget
        )
        if fx <= best_value:
            best_value = fx
            best_params[name] = x

    return best_params, best_value, trace


def find_optimal_oat(
    mu_range: tuple[float, float],
    engine: EngineSetup,
    grid_points: int = 256,
    tol: float = 1e-9,
) -> tuple[float, float]:
    """Best twisting phase for internal squeezing within mu_range.

    Returns (mu_star, xi2_nl_db).  With decoherence per unit phase the
    optimum moves below the lossless one; a degenerate range returns its
    single point.
    """
    lo, hi = float(mu_range[0]), float(mu_range[1])
    if not 0.0 <= lo <= hi <= math.pi:
        raise ValueError("mu_range must satisfy 0 <= lo <= hi <= pi")
    if hi == lo:
        return lo, engine.xi2_nl_db({"mu": lo})
    problem = OptimizationProblem(
        parameters={"mu": (lo, hi)}, budget=100_000, grid_points=grid_points, tol=tol
    )
    params, value, _ = optimize(problem, engine, objective=engine.xi2_nl_db)
    return params["mu"], value
