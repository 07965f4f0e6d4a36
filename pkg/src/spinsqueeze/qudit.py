"""Exact single-atom spin-F algebra.

Operators, unitary propagators, one-axis-twisting (OAT) evolution,
Larmor rotations, transverse-quadrature analysis and the construction of
the coupled pair of internal states (the polarized state and the state
reached by one transverse spin flip).

Conventions (hbar = 1 throughout):

* Matrices act on amplitude vectors of length 2F+1 in the fz eigenbasis,
  ordered by decreasing magnetic quantum number, m = F, F-1, ..., -F.
* The atomic polarization axis is x.  The stretched state along +x plays
  the role of the single-atom coherent state; its transverse variance is
  F/2 for every quadrature in the y-z plane.
* OAT evolution applies exp(+i * mu * fy^2) (the twisting Hamiltonian
  carries a negative prefactor, hence the positive phase here).
* Transverse quadratures are F_theta = cos(theta) fz + sin(theta) fy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

NORM_TOL = 1e-12
HERMITICITY_TOL = 1e-10
ORTHO_COUPLING_TOL = 1e-12

# Thermal population ratio between successive imperfectly-pumped sublevels,
# chosen so that 97.4% polarization carries ~7% excess transverse variance.
DEFAULT_THERMAL_RATIO = 2.0 / 9.0


class NoOrthogonalCouplingError(ValueError):
    """The transverse component of fz|state> vanishes; no flipped state exists."""


@dataclass(frozen=True)
class SpinOperators:
    """Spin-F matrices in the fz eigenbasis (m descending from +F to -F)."""

    f: float
    fx: np.ndarray
    fy: np.ndarray
    fz: np.ndarray

    @property
    def dim(self) -> int:
        return self.fz.shape[0]


@dataclass(frozen=True)
class OatParams:
    """One-axis-twisting settings.

    mu is the accumulated dimensionless twisting phase; the propagator is
    exp(+i * mu * fy^2).  Only mu >= 0 is exposed (the mu -> -mu landscape
    is the mirror image under y -> -y).  degradation in [0, 1] is a
    phenomenological contrast loss applied at the ensemble level (the
    unitary here is always pure); 0 means no loss, 1 means the squeezing
    is fully washed out.
    """

    mu: float
    degradation: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.mu) or self.mu < 0.0:
            raise ValueError(f"mu must be finite and >= 0, got {self.mu}")
        if not 0.0 <= self.degradation <= 1.0:
            raise ValueError(f"degradation must be in [0, 1], got {self.degradation}")


@dataclass(frozen=True)
class InternalStatePair:
    """Polarized internal state and its orthogonal fz-coupled partner.

    delta_fz is the standard deviation of fz in `up`; it is also the
    norm of (fz - <fz>)|up>, so fz|up> = <fz>|up> + delta_fz |down>.
    """

    up: np.ndarray
    down: np.ndarray
    delta_fz: float


def _check_half_integer(f) -> float:
    f = float(f)
    if f < 0 or not math.isclose(2 * f, round(2 * f), abs_tol=1e-12):
        raise ValueError(f"F must be a non-negative half-integer, got {f}")
    return round(2 * f) / 2.0


@lru_cache(maxsize=32)
def _spin_operators_cached(two_f: int) -> SpinOperators:
    f = two_f / 2.0
    m = np.arange(f, -f - 1.0, -1.0)
    dim = len(m)
    fz = np.diag(m).astype(complex)
    # ladder coefficients: f+|m> = sqrt(F(F+1) - m(m+1)) |m+1>; with the
    # descending basis order f+ sits on the superdiagonal
    up_m = m[1:]
    coeff = np.sqrt(f * (f + 1.0) - up_m * (up_m + 1.0))
    fp = np.zeros((dim, dim), dtype=complex)
    fp[np.arange(dim - 1), np.arange(1, dim)] = coeff
    fm = fp.conj().T
    fx = 0.5 * (fp + fm)
    fy = -0.5j * (fp - fm)
    for a in (fx, fy, fz):
        a.setflags(write=False)
    return SpinOperators(f=f, fx=fx, fy=fy, fz=fz)


def make_spin_operators(f) -> SpinOperators:
    """Build the spin-F matrices fx, fy, fz.

    Satisfies [fx, fy] = i fz (and cyclic) and fx^2 + fy^2 + fz^2 = F(F+1).
    Rejects negative or non-half-integer F.
    """
    f = _check_half_integer(f)
    return _spin_operators_cached(int(round(2 * f)))


def operators_for(state: np.ndarray) -> SpinOperators:
    """Spin operators matching the dimension of an amplitude vector."""
    dim = int(np.asarray(state).shape[0])
    if dim < 1:
        raise ValueError("empty state vector")
    return make_spin_operators((dim - 1) / 2.0)


def as_state(amplitudes) -> np.ndarray:
    """Validate and normalize an amplitude vector."""
    vec = np.asarray(amplitudes, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(vec)
    if nrm < NORM_TOL:
        raise ValueError("state vector has (near-)zero norm")
    return vec / nrm


def stretched_state(f) -> np.ndarray:
    """Coherent (stretched) state along +x: the top eigenvector of fx.

    Closed form in the fz basis: amplitude 2^-F sqrt(C(2F, F+m)) at level m.
    """
    f = _check_half_integer(f)
    m = np.arange(f, -f - 1.0, -1.0)
    amps = np.array(
        [2.0 ** (-f) * math.sqrt(math.comb(int(2 * f), int(round(f + mm)))) for mm in m],
        dtype=complex,
    )
    return amps / np.linalg.norm(amps)


def hermitian_propagator(generator: np.ndarray, angle: float) -> np.ndarray:
    """exp(-i * angle * G) for Hermitian G, via eigendecomposition.

    Exact to machine precision for the small dimensions used here; rejects
    non-Hermitian input.
    """
    g = np.asarray(generator, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("generator must be a square matrix")
    dev = np.abs(g - g.conj().T).max()
    if dev > HERMITICITY_TOL:
        raise ValueError(f"generator is not Hermitian (max |G - G^dag| = {dev:.3e})")
    evals, evecs = np.linalg.eigh(g)
    return (evecs * np.exp(-1j * angle * evals)) @ evecs.conj().T


@lru_cache(maxsize=32)
def _fy_eig(two_f: int):
    ops = _spin_operators_cached(two_f)
    evals, evecs = np.linalg.eigh(ops.fy)
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


@lru_cache(maxsize=32)
def _fx_eig(two_f: int):
    ops = _spin_operators_cached(two_f)
    evals, evecs = np.linalg.eigh(ops.fx)
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


def oat_evolve(state: np.ndarray, params: OatParams) -> np.ndarray:
    """Apply the twisting propagator exp(+i * mu * fy^2).

    params.degradation is carried along for ensemble-level models and does
    not alter this pure-state evolution.
    """
    state = np.asarray(state, dtype=complex)
    two_f = state.shape[0] - 1
    evals, evecs = _fy_eig(two_f)
    return evecs @ (np.exp(1j * params.mu * evals**2) * (evecs.conj().T @ state))


def rotate_x(state: np.ndarray, phi: float) -> np.ndarray:
    """Larmor rotation about the polarization axis: exp(-i * phi * fx)."""
    state = np.asarray(state, dtype=complex)
    evals, evecs = _fx_eig(state.shape[0] - 1)
    return evecs @ (np.exp(-1j * phi * evals) * (evecs.conj().T @ state))


def _expectation(state, op) -> float:
    return float(np.vdot(state, op @ state).real)


def transverse_covariance(state: np.ndarray) -> np.ndarray:
    """Symmetrized 2x2 covariance of (fy, fz) in a pure state."""
    ops = operators_for(state)
    sy = ops.fy @ state
    sz = ops.fz @ state
    ey = float(np.vdot(state, sy).real)
    ez = float(np.vdot(state, sz).real)
    vy = float(np.vdot(sy, sy).real) - ey * ey
    vz = float(np.vdot(sz, sz).real) - ez * ez
    cyz = float(np.vdot(sy, sz).real) - ey * ez  # Re<fy fz> symmetrizes itself
    return np.array([[vy, cyz], [cyz, vz]])


def quadrature_variance(state: np.ndarray, theta: float) -> float:
    """Variance of F_theta = cos(theta) fz + sin(theta) fy."""
    cov = transverse_covariance(state)
    c, s = math.cos(theta), math.sin(theta)
    var = c * c * cov[1, 1] + s * s * cov[0, 0] + 2.0 * s * c * cov[0, 1]
    return max(var, 0.0)


def _variance_on_grid(cov: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    c, s = np.cos(thetas), np.sin(thetas)
    return c * c * cov[1, 1] + s * s * cov[0, 0] + 2.0 * s * c * cov[0, 1]


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_minimize(fun, lo: float, hi: float, tol: float) -> float:
    """Deterministic golden-section search; flat stretches collapse leftward."""
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def optimal_quadrature_from_cov(
    cov: np.ndarray, grid_points: int = 3600, tol: float = 1e-10
) -> tuple[float, float]:
    """Minimizing quadrature angle for a given (fy, fz) covariance.

    Deterministic: a uniform grid scan over [0, pi) followed by
    golden-section refinement around the best grid point.  Isotropic
    (flat) profiles tie-break to theta = 0.
    """
    cov = np.asarray(cov, dtype=float)
    thetas = np.linspace(0.0, math.pi, grid_points, endpoint=False)
    vals = _variance_on_grid(cov, thetas)
    vmax = float(vals.max())
    vmin = float(vals.min())
    if vmax - vmin <= 1e-12 * max(abs(vmax), 1.0):
        return 0.0, max(float(_variance_on_grid(cov, np.array([0.0]))[0]), 0.0)
    i = int(vals.argmin())
    h = math.pi / grid_points

    def fun(th):
        return float(_variance_on_grid(cov, np.array([th]))[0])

    theta = _golden_minimize(fun, thetas[i] - h, thetas[i] + h, tol) % math.pi
    return theta, max(fun(theta), 0.0)


def optimal_internal_quadrature(
    state: np.ndarray, grid_points: int = 3600, tol: float = 1e-10
) -> tuple[float, float]:
    """Quadrature angle in [0, pi) minimizing a state's transverse variance."""
    return optimal_quadrature_from_cov(transverse_covariance(state), grid_points, tol)


def make_up_down(oat_state: np.ndarray, phi: float) -> InternalStatePair:
    """Rotate the twisted state and attach its fz-flipped partner.

    up = exp(-i phi fx)|oat_state>, down = (fz - <fz>)|up> normalized,
    delta_fz = ||(fz - <fz>)|up>||.  Raises NoOrthogonalCouplingError when
    |up> is an fz eigenstate (no transverse coupling exists).
    """
    up = rotate_x(np.asarray(oat_state, dtype=complex), phi)
    ops = operators_for(up)
    mean = _expectation(up, ops.fz)
    dvec = ops.fz @ up - mean * up
    delta = float(np.linalg.norm(dvec))
    if delta < ORTHO_COUPLING_TOL:
        raise NoOrthogonalCouplingError(
            "no orthogonal coupling: fz|state> is parallel to |state>"
        )
    return InternalStatePair(up=up, down=dvec / delta, delta_fz=delta)


def flipped_partner_state(f) -> np.ndarray:
    """Unit vector along fz|stretched>, phased so a +z rotation of the
    stretched state displaces it with a real positive coefficient."""
    psi0 = stretched_state(f)
    ops = make_spin_operators(f)
    vec = ops.fz @ psi0
    nrm = np.linalg.norm(vec)
    return -1j * vec / nrm


def mean_spin_response(mu: float, phi: float, f: float = 2.0) -> tuple[float, float, float]:
    """Linear response of the transverse mean spin to a small displacement.

    Twisting rotates a small displaced mean-spin component in the y-z
    plane.  Returns (jy_ratio, jz_ratio, rotation_angle) where the ratios
    are the overlap matrix elements of fy and fz between the evolved
    displaced component and the evolved polarized state, and
    rotation_angle = atan2(jz_ratio, jy_ratio).  Independent of the
    displacement amplitude by construction.
    """
    ops = make_spin_operators(f)
    psi0 = stretched_state(f)
    psi1 = flipped_partner_state(f)
    params = OatParams(mu=mu)
    u = oat_evolve(psi0, params)
    v = oat_evolve(psi1, params)
    if phi != 0.0:
        u = rotate_x(u, phi)
        v = rotate_x(v, phi)
    jz_ratio = float(np.vdot(v, ops.fz @ u).real)
    jy_ratio = float(np.vdot(v, ops.fy @ u).real)
    return jy_ratio, jz_ratio, math.atan2(jz_ratio, jy_ratio)


def displaced_state_angle(
    mu: float, phi: float, epsilon: float = 1e-4, f: float = 2.0
) -> float:
    """Independent cross-check of mean_spin_response.

    Displaces the stretched state by a small z-rotation, evolves it
    exactly, and reads the rotation angle from the exact transverse means.
    Agrees with mean_spin_response to O(epsilon^2).
    """
    ops = make_spin_operators(f)
    psi0 = stretched_state(f)
    displaced = hermitian_propagator(ops.fz, epsilon) @ psi0
    state = oat_evolve(displaced, OatParams(mu=mu))
    if phi != 0.0:
        state = rotate_x(state, phi)
    ey = _expectation(state, ops.fy)
    ez = _expectation(state, ops.fz)
    return math.atan2(ez, ey)


def polarization_parity_weights(state: np.ndarray) -> tuple[float, float]:
    """Population on even- and odd-m sublevels of the polarization (x) axis.

    Twisting conserves this parity; the flipped partner state is odd.
    """
    state = np.asarray(state, dtype=complex)
    evals, evecs = _fx_eig(state.shape[0] - 1)
    f = (state.shape[0] - 1) / 2.0
    amps = evecs.conj().T @ state
    odd_mask = (np.rint(f - evals).astype(int) % 2) == 1
    odd = float(np.sum(np.abs(amps[odd_mask]) ** 2))
    even = float(np.sum(np.abs(amps[~odd_mask]) ** 2))
    return even, odd


def polarized_basis(f) -> tuple[np.ndarray, np.ndarray]:
    """(eigenvalues, eigenvectors) of fx, eigenvalues ascending -F..+F."""
    f = _check_half_integer(f)
    return _fx_eig(int(round(2 * f)))


def pumped_mixture(
    f: float, polarization: float, thermal_ratio: float = DEFAULT_THERMAL_RATIO
) -> list[tuple[float, np.ndarray]]:
    """Imperfectly pumped single-atom state as a classical mixture.

    `polarization` is the mean-spin fraction <fx>/F.  The residual
    population sits on the two sublevels just below the stretched state
    (quantized along x), with a fixed thermal ratio between them.  Returns
    [(weight, state), ...]; a single entry for polarization = 1.

    The default thermal_ratio is tuned so that 97.4% polarization carries
    about 7% excess transverse variance over the perfect coherent state.
    """
    f = _check_half_integer(f)
    if not 0.0 < polarization <= 1.0:
        raise ValueError(f"polarization must be in (0, 1], got {polarization}")
    if not 0.0 <= thermal_ratio < 1.0:
        raise ValueError(f"thermal_ratio must be in [0, 1), got {thermal_ratio}")
    if polarization == 1.0:
        return [(1.0, stretched_state(f))]
    if f < 1.0:
        raise ValueError("imperfect pumping model needs F >= 1 (three sublevels)")
    # populations p0, q1, q2 = r*q1 on m_x = F, F-1, F-2 solving
    #   p0 + q1 + q2 = 1  and  F p0 + (F-1) q1 + (F-2) q2 = F * polarization
    r = thermal_ratio
    a = np.array([[1.0, 1.0 + r], [f, (f - 1.0) + r * (f - 2.0)]])
    p0, q1 = np.linalg.solve(a, np.array([1.0, f * polarization]))
    q2 = r * q1
    pops = np.array([p0, q1, q2])
    if np.any(pops < -1e-12):
        raise ValueError(
            f"polarization {polarization} not reachable with thermal_ratio {thermal_ratio}"
        )
    pops = np.clip(pops, 0.0, None)
    pops = pops / pops.sum()
    evals, evecs = _fx_eig(int(round(2 * f)))
    # eigenvalues ascend, so m_x = F, F-1, F-2 are the last three columns
    states = [evecs[:, -1], evecs[:, -2], evecs[:, -3]]
    return [(float(w), as_state(s)) for w, s in zip(pops, states) if w > 0.0]


def pump_excess_variance(
    f: float, polarization: float, thermal_ratio: float = DEFAULT_THERMAL_RATIO
) -> float:
    """Fractional excess of the pumped mixture's transverse variance over F/2."""
    comps = pumped_mixture(f, polarization, thermal_ratio)
    var = 0.0
    for w, state in comps:
        var += w * quadrature_variance(state, 0.0)
    return var / (float(f) / 2.0) - 1.0


def mixture_transverse_covariance(
    components: list[tuple[float, np.ndarray]],
) -> np.ndarray:
    """(fy, fz) covariance of a classical mixture of pure states.

    Valid when every component has zero transverse mean (true for all
    x-quantized sublevels and their twisted/rotated images).
    """
    cov = np.zeros((2, 2))
    for w, state in components:
        cov += w * transverse_covariance(state)
    return cov


def mixture_mean_fx(components: list[tuple[float, np.ndarray]]) -> float:
    """Mean fx of a classical mixture."""
    total = 0.0
    for w, state in components:
        total += w * _expectation(state, operators_for(state).fx)
    return total


def product_variance_moments(state: np.ndarray) -> tuple[float, float]:
    """(variance, fourth central moment) of fz in a pure state.

    Used to quantify how far a state's fz statistics are from Gaussian.
    """
    ops = operators_for(state)
    mean = _expectation(state, ops.fz)
    dz = ops.fz - mean * np.eye(ops.dim)
    v = _expectation(state, dz @ dz)
    m4 = _expectation(state, dz @ dz @ dz @ dz)
    return v, m4
