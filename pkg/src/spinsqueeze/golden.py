"""Brute-force reference values for the internal-squeezing optimum.

The golden record pins the lossless twisting optimum (mu*, theta*,
minimal variance) for spin F, computed the slow, independent way: a dense
outer grid over the twisting phase crossed with a dense quadrature-angle
grid, followed by golden-section refinement of the outer phase with a
fully converged inner angle search.  Optimization code is validated
against this record, never the other way around.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from . import qudit

GOLDEN_RESOURCE = "internal_oat_golden.json"
DEFAULT_MU_POINTS = 20_000
DEFAULT_THETA_POINTS = 3_600
DEFAULT_MU_MAX = math.pi / 2.0


def _states_for_mus(f: float, mus: np.ndarray) -> np.ndarray:
    """Twisted stretched states, one column per mu."""
    ops = qudit.make_spin_operators(f)
    evals, evecs = np.linalg.eigh(np.asarray(ops.fy))
    psi0 = qudit.stretched_state(f)
    coeff = evecs.conj().T @ psi0
    phases = np.exp(1j * np.outer(evals**2, mus))
    return evecs @ (phases * coeff[:, None])


def _cov_entries(f: float, states: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ops = qudit.make_spin_operators(f)
    fy_s = np.asarray(ops.fy) @ states
    fz_s = np.asarray(ops.fz) @ states
    ey = np.einsum("ij,ij->j", states.conj(), fy_s).real
    ez = np.einsum("ij,ij->j", states.conj(), fz_s).real
    vy = np.einsum("ij,ij->j", fy_s.conj(), fy_s).real - ey**2
    vz = np.einsum("ij,ij->j", fz_s.conj(), fz_s).real - ez**2
    cyz = np.einsum("ij,ij->j", fy_s.conj(), fz_s).real - ey * ez
    return vy, vz, cyz


def brute_force_scan(
    f: float = 2.0,
    mu_points: int = DEFAULT_MU_POINTS,
    theta_points: int = DEFAULT_THETA_POINTS,
    mu_max: float = DEFAULT_MU_MAX,
    chunk: int = 2_000,
) -> dict:
    """Dense (mu, theta) scan plus refinement; returns the golden record."""
    mus = np.linspace(0.0, mu_max, mu_points)
    thetas = np.linspace(0.0, math.pi, theta_points, endpoint=False)
    ct2 = np.cos(thetas) ** 2
    st2 = np.sin(thetas) ** 2
    cs2 = 2.0 * np.sin(thetas) * np.cos(thetas)

    best_value = math.inf
    best_mu = 0.0
    best_theta = 0.0
    for start in range(0, mu_points, chunk):
        block = mus[start : start + chunk]
        states = _states_for_mus(f, block)
        vy, vz, cyz = _cov_entries(f, states)
        grid = np.outer(ct2, vz) + np.outer(st2, vy) + np.outer(cs2, cyz)
        idx = np.unravel_index(int(grid.argmin()), grid.shape)
        if grid[idx] < best_value:
            best_value = float(grid[idx])
            best_theta = float(thetas[idx[0]])
            best_mu = float(block[idx[1]])

    def aligned_var(mu: float) -> float:
        state = qudit.oat_evolve(qudit.stretched_state(f), qudit.OatParams(mu=mu))
        _, vmin = qudit.optimal_internal_quadrature(state, tol=1e-13)
        return vmin

    # the grid argmin can sit a few cells off the true optimum (the angle
    # grid contributes ~(pi/theta_points)^2 of variance noise while the
    # outer landscape is very flat), so refine over a generous bracket
    h = 8.0 * (mu_max - 0.0) / (mu_points - 1)
    mu_star = qudit._golden_minimize(
        aligned_var, max(0.0, best_mu - h), min(mu_max, best_mu + h), 1e-12
    )
    state = qudit.oat_evolve(qudit.stretched_state(f), qudit.OatParams(mu=mu_star))
    theta_star, var_min = qudit.optimal_internal_quadrature(state, tol=1e-13)
    return {
        "f": f,
        "mu_points": mu_points,
        "theta_points": theta_points,
        "mu_max": mu_max,
        "grid_mu": best_mu,
        "grid_theta": best_theta,
        "grid_var": best_value,
        "mu_star": mu_star,
        "theta_star": theta_star,
        "var_min": var_min,
        "xi2_nl_db": 10.0 * math.log10(var_min / (f / 2.0)),
    }


def golden_path() -> Path:
    return Path(str(resources.files("spinsqueeze").joinpath("data", GOLDEN_RESOURCE)))


def load_golden() -> dict:
    """Load the stored golden record, regenerating it if absent."""
    path = golden_path()
    if not path.exists():
        record = brute_force_scan()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
        return record
    return json.loads(path.read_text())


def main():
    record = brute_force_scan()
    path = golden_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")
    for key in ("mu_star", "theta_star", "var_min", "xi2_nl_db"):
        print(f"  {key} = {record[key]:.12g}")


if __name__ == "__main__":
    main()
