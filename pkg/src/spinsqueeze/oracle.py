"""Brute-force small-N many-body validation of the Gaussian model.

Simulates up to six spin-2 atoms in the full tensor-product space (no
symmetric-subspace shortcut, so permutation symmetry is a checkable
property rather than an assumption), applies the weak-measurement Kraus
operator for a null readout, and compares the resulting collective
statistics against the pair-excitation expansion and the Gaussian
conditioning formulas.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy import sparse

from .qudit import InternalStatePair, NORM_TOL, make_spin_operators, operators_for

MAX_DIMENSION = 20000
KRAUS_NORM_TOL = 1e-10


@dataclass(frozen=True)
class ManyBodyState:
    """Amplitudes over the full (2F+1)^N product basis."""

    n_atoms: int
    f: float
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        dim_single = int(round(2 * self.f + 1))
        if amps.shape[0] != dim_single**self.n_atoms:
            raise ValueError("amplitude length does not match (2F+1)^N")
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > 1e-6:
            raise ValueError(f"state not normalized: |psi| = {nrm}")


@dataclass(frozen=True)
class WeakMeasurementParams:
    """Gaussian Kraus exponent for a null collective-readout outcome.

    The Kraus operator is exp(-lam * Jz^2).  kappa2_equiv is the
    measurement strength producing the same first-order information gain
    in the Gaussian model: kappa2 = 4 * lam * pnl with pnl = N F / 2 (see
    docs/model_notes.md for the derivation).
    """

    lam: float
    kappa2_equiv: float

    def __post_init__(self):
        if self.lam < 0.0:
            raise ValueError("lam must be >= 0")

    @classmethod
    def from_lambda(cls, lam: float, n_atoms: int, f: float) -> "WeakMeasurementParams":
        return cls(lam=lam, kappa2_equiv=4.0 * lam * n_atoms * f / 2.0)

    @classmethod
    def from_kappa2(cls, kappa2: float, n_atoms: int, f: float) -> "WeakMeasurementParams":
        pnl = n_atoms * f / 2.0
        return cls(lam=kappa2 / (4.0 * pnl), kappa2_equiv=kappa2)

    def check_consistency(self, n_atoms: int, f: float):
        expected = 4.0 * self.lam * n_atoms * f / 2.0
        if abs(expected - self.kappa2_equiv) > 1e-12 * max(expected, 1.0):
            raise ValueError("lam and kappa2_equiv are inconsistent")


def _guard_dimension(n_atoms: int, dim_single: int):
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    if dim_single**n_atoms > MAX_DIMENSION:
        raise ValueError(
            f"tensor space too large: {dim_single}^{n_atoms} > {MAX_DIMENSION}"
        )


def product_state(n_atoms: int, single: np.ndarray) -> ManyBodyState:
    """Tensor power |single>^(x N), normalized."""
    single = np.asarray(single, dtype=complex).reshape(-1)
    _guard_dimension(n_atoms, single.shape[0])
    nrm = np.linalg.norm(single)
    if nrm < NORM_TOL:
        raise ValueError("single-atom state has zero norm")
    single = single / nrm
    amps = reduce(np.kron, [single] * n_atoms)
    f = (single.shape[0] - 1) / 2.0
    return ManyBodyState(n_atoms=n_atoms, f=f, amplitudes=amps)


def collective_operator(n_atoms: int, single_op: np.ndarray) -> sparse.csr_matrix:
    """Sum of single-site embeddings, as a sparse matrix."""
    op = np.asarray(single_op, dtype=complex)
    d = op.shape[0]
    _guard_dimension(n_atoms, d)
    op_s = sparse.csr_matrix(op)
    total = None
    for site in range(n_atoms):
        left = sparse.identity(d**site, format="csr", dtype=complex)
        right = sparse.identity(d ** (n_atoms - site - 1), format="csr", dtype=complex)
        term = sparse.kron(sparse.kron(left, op_s), right, format="csr")
        total = term if total is None else total + term
    return total.tocsr()


def jz_eigenvalues(n_atoms: int, f: float) -> np.ndarray:
    """Diagonal of the collective Jz in the product basis."""
    dim_single = int(round(2 * f + 1))
    _guard_dimension(n_atoms, dim_single)
    m = np.arange(f, -f - 1.0, -1.0)
    return reduce(np.add.outer, [m] * n_atoms).ravel()


def collective_jz_moments(state: ManyBodyState) -> tuple[float, float]:
    """(mean, variance) of the collective Jz."""
    w = jz_eigenvalues(state.n_atoms, state.f)
    p = np.abs(state.amplitudes) ** 2
    mean = float(np.dot(p, w))
    var = float(np.dot(p, w * w)) - mean * mean
    return mean, var


def apply_outcome_zero_kraus(
    state: ManyBodyState, params: WeakMeasurementParams
) -> ManyBodyState:
    """Apply exp(-lam * Jz^2) and renormalize.

    Jz is diagonal in the product basis, so this is an elementwise
    reweighting.  Raises when the surviving norm is below 1e-10.
    """
    params.check_consistency(state.n_atoms, state.f)
    w = jz_eigenvalues(state.n_atoms, state.f)
    amps = np.exp(-params.lam * w * w) * state.amplitudes
    nrm = np.linalg.norm(amps)
    if nrm < KRAUS_NORM_TOL:
        raise ValueError("Kraus projection annihilated the state (norm < 1e-10)")
    return ManyBodyState(n_atoms=state.n_atoms, f=state.f, amplitudes=amps / nrm)


def swap_sites(state: ManyBodyState, i: int, j: int) -> ManyBodyState:
    """Exchange two atoms."""
    if i == j:
        return state
    d = int(round(2 * state.f + 1))
    tensor = state.amplitudes.reshape([d] * state.n_atoms)
    return ManyBodyState(
        n_atoms=state.n_atoms,
        f=state.f,
        amplitudes=np.swapaxes(tensor, i, j).reshape(-1).copy(),
    )


def _pair_arrangement(n_atoms: int, up: np.ndarray, down: np.ndarray, i: int, j: int) -> np.ndarray:
    factors = [up] * n_atoms
    factors[i] = down
    factors[j] = down
    return reduce(np.kron, factors)


def pair_excitation_check(
    n_atoms: int, pair: InternalStatePair, kappa2: float
) -> tuple[float, float]:
    """Compare the exact null-outcome collapse against its pair-excitation form.

    The weak-collapse ansatz keeps, besides the unexcited product state, a
    sum over ordered pairs of sites carrying two flipped atoms with
    coefficient -kappa2 * delta_fz^2 / (4 N) each (each unordered
    arrangement therefore appears with twice that weight).

    Returns (overlap_error, amplitude_ratio):
      overlap_error   = 1 - |<ansatz|exact>| with both sides normalized;
                        scales as the square of kappa2.
      amplitude_ratio = extracted ordered-pair coefficient divided by the
                        predicted one; 1 by convention at kappa2 = 0.
    """
    if n_atoms < 2:
        raise ValueError("pair excitation needs at least two atoms")
    if kappa2 < 0.0:
        raise ValueError("kappa2 must be >= 0")
    up = np.asarray(pair.up, dtype=complex)
    down = np.asarray(pair.down, dtype=complex)
    f = operators_for(up).f
    base = product_state(n_atoms, up)
    if kappa2 == 0.0:
        return 0.0, 1.0
    params = WeakMeasurementParams.from_kappa2(kappa2, n_atoms, f)
    exact = apply_outcome_zero_kraus(base, params).amplitudes

    coeff_ordered = -kappa2 * pair.delta_fz**2 / (4.0 * n_atoms)
    ansatz = base.amplitudes.copy()
    one_arrangement = None
    for i, j in itertools.combinations(range(n_atoms), 2):
        arr = _pair_arrangement(n_atoms, up, down, i, j)
        if one_arrangement is None:
            one_arrangement = arr
        ansatz = ansatz + 2.0 * coeff_ordered * arr
    ansatz = ansatz / np.linalg.norm(ansatz)

    overlap_error = 1.0 - abs(np.vdot(ansatz, exact))
    base_amp = np.vdot(base.amplitudes, exact)
    pair_amp = np.vdot(one_arrangement, exact)
    extracted_ordered = (pair_amp / base_amp) / 2.0
    amplitude_ratio = float((extracted_ordered / coeff_ordered).real)
    return float(overlap_error), amplitude_ratio


def variance_formula_check(
    n_atoms: int, pair: InternalStatePair, kappa2: float
) -> tuple[float, float]:
    """Exact post-collapse Var(Jz) against the first-order reduction formula.

    The first-order prediction is N * dfz^2 - kappa2 * N * dfz^4 (valid in
    the regime where the single-atom fz statistics are close to Gaussian;
    the residual is set by the excess kurtosis and by higher orders in
    kappa2).
    """
    up = np.asarray(pair.up, dtype=complex)
    f = operators_for(up).f
    base = product_state(n_atoms, up)
    if kappa2 == 0.0:
        _, var0 = collective_jz_moments(base)
        return var0, n_atoms * pair.delta_fz**2
    params = WeakMeasurementParams.from_kappa2(kappa2, n_atoms, f)
    post = apply_outcome_zero_kraus(base, params)
    _, exact_var = collective_jz_moments(post)
    b2 = pair.delta_fz**2
    predicted = n_atoms * b2 - kappa2 * n_atoms * b2 * b2
    return exact_var, predicted


def site_parity_sector_weights(state: ManyBodyState) -> np.ndarray:
    """Population by number of odd-parity sites (parity along the x axis).

    Entry k is the total probability on basis states with exactly k atoms
    in an odd-m sublevel of the polarization axis.  Twisting plus a null
    collective readout only populates even k; the pair-excitation
    component is the k = 2 sector.
    """
    d = int(round(2 * state.f + 1))
    ops = make_spin_operators(state.f)
    evals, evecs = np.linalg.eigh(np.asarray(ops.fx))
    parities = np.rint(state.f - evals).astype(int) % 2  # 1 = odd sublevel
    tensor = state.amplitudes.reshape([d] * state.n_atoms)
    for site in range(state.n_atoms):
        tensor = np.tensordot(evecs.conj().T, tensor, axes=([1], [site]))
        tensor = np.moveaxis(tensor, 0, site)
    probs = np.abs(tensor.reshape(-1)) ** 2
    odd_count = reduce(np.add.outer, [parities] * state.n_atoms).reshape(-1)
    return np.bincount(odd_count, weights=probs, minlength=state.n_atoms + 1)
