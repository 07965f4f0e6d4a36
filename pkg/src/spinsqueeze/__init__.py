"""Cooperative internal and collective spin squeezing, simulated.

A numpy/scipy toolkit for an ensemble of spin-F atoms whose individual
(qudit) spins are squeezed by one-axis twisting while the collective spin
is squeezed by quantum-nondemolition readout.  Includes exact small-N
validation of the Gaussian ensemble model, a pulse-sequence engine with
analytic and Monte Carlo modes, prediction and retrodiction conditioning,
parameter sweeps, and a deterministic optimizer.
"""

from .collective import (
    GaussianEnsemble,
    QndCoupling,
    SqueezingReport,
    ThreePulseBracket,
    conditional_variance_three_pulse,
    conditional_variance_two_pulse,
    db,
    decay_channel,
    ensemble_from_internal,
    from_db,
    larmor_rotate,
    qnd_condition,
    scattering_limit,
    three_pulse_bracket,
    wineland_xi2,
    xi2_qnd,
    xi2_tot,
)
from .oracle import (
    ManyBodyState,
    WeakMeasurementParams,
    apply_outcome_zero_kraus,
    collective_jz_moments,
    collective_operator,
    pair_excitation_check,
    product_state,
    variance_formula_check,
)
from .optimizer import EngineSetup, OptimizationProblem, find_optimal_oat, optimize
from .protocol import (
    DecaySettings,
    GapSettings,
    MeasurementRecord,
    ModelConfig,
    OatPulse,
    ProbeWindow,
    PulseSequence,
    PumpSettings,
    ideal_model,
    ideal_sequence,
    rotation_angle_scan,
    run_analytic,
    run_monte_carlo,
    sweep,
)
from .qudit import (
    InternalStatePair,
    NoOrthogonalCouplingError,
    OatParams,
    SpinOperators,
    hermitian_propagator,
    make_spin_operators,
    make_up_down,
    mean_spin_response,
    oat_evolve,
    optimal_internal_quadrature,
    quadrature_variance,
    rotate_x,
    stretched_state,
)

__version__ = "0.1.0"
