"""Gaussian-moment model of the collective spin under QND measurement.

Tracks the means and 2x2 covariance of the transverse collective
quadratures (Jy, Jz) for N independent atoms around a macroscopic Jx,
applies Larmor rotation, relaxation and Gaussian measurement
conditioning, and evaluates the squeezing metrics (Wineland coefficient,
measurement-only coefficient, combined coefficient, scattering limit).

Units: angular momentum in units of hbar; measurement outcomes in
detector units fixed by QndCoupling.gain and QndCoupling.shot_var.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .qudit import InternalStatePair, operators_for, transverse_covariance

PSD_TOL = 1e-9
CONSISTENCY_TOL = 1e-9
SINGULAR_TOL = 1e-12


def db(linear: float) -> float:
    """10 log10 of a linear power-like ratio."""
    return 10.0 * math.log10(linear)


def from_db(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True)
class GaussianEnsemble:
    """Collective transverse Gaussian state of an N-atom ensemble.

    mean and cov describe (Jy, Jz); jx is the macroscopic spin; pnl is the
    coherent-state reference Var(Jz) = N F / 2.
    """

    n_atoms: int
    jx: float
    mean: np.ndarray
    cov: np.ndarray
    pnl: float

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        cov = 0.5 * (cov + cov.T)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be >= 1")
        if self.pnl <= 0.0:
            raise ValueError("pnl must be positive")
        evals = np.linalg.eigvalsh(cov)
        if evals.min() < -PSD_TOL * max(np.trace(cov), 1.0):
            raise ValueError(f"covariance not positive semidefinite: eigs {evals}")

    @property
    def var_jz(self) -> float:
        return float(self.cov[1, 1])

    @property
    def var_jy(self) -> float:
        return float(self.cov[0, 0])


@dataclass(frozen=True)
class QndCoupling:
    """Dimensionless measurement strength and detector calibration.

    kappa2 is normalized so that one pulse on a coherent ensemble gives a
    conditional variance reduced by 1/(1 + kappa2).  gain maps Jz to
    detector units; shot_var is the detection shot noise in those units.
    The three are linked by kappa2 = gain^2 * pnl / shot_var, checked
    against a reference pnl when one is supplied.

    stroboscopic=True models back-action-evading probing: measuring Jz
    adds no noise anywhere.  With stroboscopic=False each pulse dumps the
    conjugate back-action kappa2 * pnl into Var(Jy), which later Larmor
    rotation mixes into Jz.
    """

    kappa2: float
    shot_var: float = 1.0
    gain: float | None = None
    stroboscopic: bool = True

    def __post_init__(self):
        if self.kappa2 < 0.0:
            raise ValueError("kappa2 must be >= 0")
        if self.shot_var <= 0.0:
            raise ValueError("shot_var must be positive")

    @classmethod
    def from_kappa2(
        cls, kappa2: float, pnl: float, shot_var: float = 1.0, stroboscopic: bool = True
    ) -> "QndCoupling":
        """Derive the detector gain from (kappa2, pnl, shot_var)."""
        gain = math.sqrt(kappa2 * shot_var / pnl)
        return cls(kappa2=kappa2, shot_var=shot_var, gain=gain, stroboscopic=stroboscopic)

    def validate_against(self, pnl: float):
        if self.gain is None:
            return
        implied = self.gain**2 * pnl / self.shot_var
        if abs(implied - self.kappa2) > CONSISTENCY_TOL * max(self.kappa2, 1.0):
            raise ValueError(
                f"inconsistent coupling: gain^2*pnl/shot_var = {implied:.12g} "
                f"but kappa2 = {self.kappa2:.12g}"
            )

    def gain_for(self, pnl: float) -> float:
        if self.gain is not None:
            return self.gain
        return math.sqrt(self.kappa2 * self.shot_var / pnl)


@dataclass(frozen=True)
class SqueezingReport:
    """Squeezing coefficients (linear and dB) plus the decay bookkeeping.

    decay_penalty is the macroscopic-spin decay factor exp(2 T / T1);
    mean_spin_loss_db is the additional contrast penalty from pumping and
    coherent twisting, 20 log10(N F / <Jx>) with decay excluded.
    """

    xi2_nl: float
    xi2_qnd: float
    xi2_tot: float
    decay_penalty: float
    mean_spin_loss_db: float

    def __post_init__(self):
        for name in ("xi2_nl", "xi2_qnd", "xi2_tot"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")

    @property
    def xi2_nl_db(self) -> float:
        return db(self.xi2_nl)

    @property
    def xi2_qnd_db(self) -> float:
        return db(self.xi2_qnd)

    @property
    def xi2_tot_db(self) -> float:
        return db(self.xi2_tot)


def ensemble_from_internal(
    n_atoms: int, pair: InternalStatePair, internal_cov: np.ndarray
) -> GaussianEnsemble:
    """Scale a single-atom transverse state up to N independent atoms.

    internal_cov is the single-atom (fy, fz) covariance of pair.up (it may
    include mixing or degradation corrections, so it is passed explicitly
    rather than recomputed).
    """
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    cov = np.asarray(internal_cov, dtype=float).reshape(2, 2)
    cov = 0.5 * (cov + cov.T)
    evals = np.linalg.eigvalsh(cov)
    if evals.min() < -PSD_TOL * max(np.trace(cov), 1.0):
        raise ValueError("internal covariance not positive semidefinite")
    ops = operators_for(pair.up)
    ey = float(np.vdot(pair.up, ops.fy @ pair.up).real)
    ez = float(np.vdot(pair.up, ops.fz @ pair.up).real)
    ex = float(np.vdot(pair.up, ops.fx @ pair.up).real)
    return GaussianEnsemble(
        n_atoms=n_atoms,
        jx=n_atoms * ex,
        mean=np.array([n_atoms * ey, n_atoms * ez]),
        cov=n_atoms * cov,
        pnl=n_atoms * ops.f / 2.0,
    )


def larmor_rotate(ens: GaussianEnsemble, angle: float) -> GaussianEnsemble:
    """Rotate the transverse plane about x; spectrum of cov is preserved."""
    c, s = math.cos(angle), math.sin(angle)
    # matches the single-atom convention: a rotation by phi shifts the
    # minimal-variance quadrature angle theta* to theta* - phi
    rot = np.array([[c, s], [-s, c]])
    return replace(ens, mean=rot @ ens.mean, cov=rot @ ens.cov @ rot.T)


def qnd_condition(
    ens: GaussianEnsemble, coupling: QndCoupling, outcome: float | None = None
) -> tuple[GaussianEnsemble, float]:
    """Condition the ensemble on one Gaussian Jz measurement.

    Returns (updated ensemble, predicted outcome variance).  The covariance
    update is the Schur complement of the joint (Jy, Jz, outcome) Gaussian;
    when an outcome value is given the means shift accordingly, otherwise
    they are left at the prior (the update is outcome-independent for the
    covariance).  kappa2 = 0 returns the input unchanged.
    """
    coupling.validate_against(ens.pnl)
    gain = coupling.gain_for(ens.pnl)
    predicted = coupling.shot_var + gain**2 * ens.var_jz
    if coupling.kappa2 == 0.0:
        return ens, predicted
    cross = gain * ens.cov[:, 1]  # Cov((Jy,Jz), m)
    cov = ens.cov - np.outer(cross, cross) / predicted
    mean = ens.mean
    if outcome is not None:
        mean = mean + cross * (outcome - gain * ens.mean[1]) / predicted
    if not coupling.stroboscopic:
        backaction = np.array([[coupling.kappa2 * ens.pnl, 0.0], [0.0, 0.0]])
        cov = cov + backaction
    return replace(ens, mean=mean, cov=cov), predicted


def decay_channel(ens: GaussianEnsemble, dt: float, t1: float) -> GaussianEnsemble:
    """Relax toward isotropic coherent-state noise with rate 2/T1.

    Means and the macroscopic spin shrink by exp(-dt/T1); the covariance
    relaxes as cov -> e^(-2 dt/T1) cov + (1 - e^(-2 dt/T1)) pnl I.
    """
    if dt < 0.0:
        raise ValueError("dt must be >= 0")
    if t1 <= 0.0:
        raise ValueError("t1 must be positive")
    if dt == 0.0:
        return ens
    k = math.exp(-dt / t1)
    cov = k * k * ens.cov + (1.0 - k * k) * ens.pnl * np.eye(2)
    return replace(ens, jx=k * ens.jx, mean=k * ens.mean, cov=cov)


def conditional_variance_two_pulse(v1: float, v2: float, c12: float) -> float:
    """Var(m2 | m1) = V2 - C12^2 / V1 for jointly Gaussian outcomes."""
    if v1 <= 0.0:
        raise ValueError("v1 must be positive")
    if v2 < 0.0:
        raise ValueError("v2 must be >= 0")
    if c12 * c12 > v1 * v2 * (1.0 + 1e-12):
        raise ValueError(f"covariance violates Cauchy-Schwarz: c12^2={c12*c12} > v1*v2={v1*v2}")
    return max(v2 - c12 * c12 / v1, 0.0)


def conditional_variance_three_pulse(cov3: np.ndarray, return_info: bool = False):
    """Retrodicted Var(m2 | m1, m3) from the 3x3 outcome covariance.

    Gaussian conditioning of the middle outcome on the flanking pair:
    V2 - [C12 C23] S^-1 [C12 C23]^T with S the (m1, m3) sub-block.  Never
    exceeds the two-pulse value.  A singular sub-block falls back to the
    pseudo-inverse (tolerance 1e-12); pass return_info=True to receive a
    metadata dict recording that fallback.
    """
    cov = np.asarray(cov3, dtype=float).reshape(3, 3)
    cov = 0.5 * (cov + cov.T)
    evals = np.linalg.eigvalsh(cov)
    if evals.min() < -PSD_TOL * max(np.trace(cov), 1.0):
        raise ValueError("cov3 must be positive semidefinite")
    sub = cov[np.ix_([0, 2], [0, 2])]
    vec = np.array([cov[0, 1], cov[2, 1]])
    det = sub[0, 0] * sub[1, 1] - sub[0, 1] ** 2
    used_pinv = det <= SINGULAR_TOL * max(sub[0, 0] * sub[1, 1], 1.0)
    if used_pinv:
        solve = np.linalg.pinv(sub, rcond=SINGULAR_TOL) @ vec
    else:
        solve = np.linalg.solve(sub, vec)
    value = max(float(cov[1, 1] - vec @ solve), 0.0)
    if return_info:
        return value, {"used_pseudoinverse": bool(used_pinv)}
    return value


def wineland_xi2(
    var_sss: float, var_pnl: float, t_elapsed: float, t1: float, mean_spin_loss_db: float
) -> float:
    """Wineland squeezing coefficient with spin-decay and contrast penalties.

    exp(2 T / T1) * 10^(loss_db/10) * Var_SSS / Var_PNL.
    """
    if var_pnl <= 0.0:
        raise ValueError("var_pnl must be positive")
    if t1 <= 0.0:
        raise ValueError("t1 must be positive")
    return math.exp(2.0 * t_elapsed / t1) * from_db(mean_spin_loss_db) * var_sss / var_pnl


def xi2_qnd(kappa2: float) -> float:
    """Measurement-only squeezing coefficient on a coherent ensemble."""
    if kappa2 < 0.0:
        raise ValueError("kappa2 must be >= 0")
    return 1.0 / (1.0 + kappa2)


def xi2_tot(xi2_nl: float, kappa2: float) -> float:
    """Combined coefficient when measurement follows internal squeezing.

    xi2_nl / (1 + kappa2 * xi2_nl); the internal squeezing also scales the
    effective measurement strength, so this is worse than the plain
    product xi2_nl * xi2_qnd except at xi2_nl = 1.
    """
    if xi2_nl <= 0.0:
        raise ValueError("xi2_nl must be positive")
    if kappa2 < 0.0:
        raise ValueError("kappa2 must be >= 0")
    return xi2_nl / (1.0 + kappa2 * xi2_nl)


def scattering_limit(xi2_nl: float, alpha0: float) -> float:
    """Photon-scattering bound on the combined squeezing: 2/sqrt(1/xi2_nl + alpha0)."""
    if xi2_nl <= 0.0:
        raise ValueError("xi2_nl must be positive")
    if alpha0 < 0.0:
        raise ValueError("alpha0 must be >= 0")
    return 2.0 / math.sqrt(1.0 / xi2_nl + alpha0)


@dataclass(frozen=True)
class ThreePulseBracket:
    """Bounds for combined squeezing with a retrodictive third pulse.

    The combined-coefficient formula gives the pessimistic bound (the
    internal squeezing suppresses the effective coupling); the plain dB
    sum of the separate squeezings gives the optimistic bound.  A measured
    value is consistent when its error interval overlaps [sum, formula].
    """

    formula_db: float
    db_sum_db: float

    def overlaps(self, measured_db: float, measured_err_db: float) -> bool:
        lo, hi = self.db_sum_db, self.formula_db
        return (measured_db - measured_err_db) <= hi and (measured_db + measured_err_db) >= lo


def three_pulse_bracket(xi2_nl: float, kappa2_retro: float) -> ThreePulseBracket:
    """Bracket the retrodictive combined squeezing between its two bounds."""
    formula = xi2_tot(xi2_nl, kappa2_retro)
    product = xi2_nl * xi2_qnd(kappa2_retro)
    return ThreePulseBracket(formula_db=db(formula), db_sum_db=db(product))
