"""Run configuration: YAML parsing, strict validation, canonical form.

The configuration format is YAML (nested sections, comments allowed).
Unknown keys are rejected unless lenient mode is selected; every
validation problem in the file is reported, each with the dotted path of
the offending field.  ``serialize_config`` writes the fully resolved
canonical form (all defaults filled in, keys sorted), which hashes and
round-trips stably.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields, replace

import yaml

from .protocol import (
    DecaySettings,
    GapSettings,
    ModelConfig,
    OatPulse,
    ProbeWindow,
    PulseSequence,
    PumpSettings,
)

DEFAULT_SEED = 12345
DEFAULT_N_ATOMS = 100_000_000_000
DEFAULT_N_CYCLES = 100_000


class ConfigError(ValueError):
    """Carries every validation problem found in a configuration."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class RunConfig:
    n_atoms: int = DEFAULT_N_ATOMS
    spin_f: float = 2.0
    mode: str = "two_pulse"
    n_cycles: int = DEFAULT_N_CYCLES
    seed: int = DEFAULT_SEED
    sequence: PulseSequence = PulseSequence()
    model: ModelConfig = ModelConfig()
    output_directory: str = "runs"


class _Validator:
    def __init__(self, lenient: bool):
        self.lenient = lenient
        self.errors: list[str] = []
        self.warnings: list[str] = []

    def fail(self, path: str, message: str):
        self.errors.append(f"{path}: {message}")

    def unknown(self, path: str):
        if self.lenient:
            self.warnings.append(f"{path}: unknown key ignored")
        else:
            self.errors.append(f"{path}: unknown key")

    def section(self, raw, path: str, known: dict) -> dict:
        """Check a mapping against known keys; returns the pruned mapping."""
        if raw is None:
            return {}
        if not isinstance(raw, dict):
            self.fail(path or "<root>", f"expected a mapping, got {type(raw).__name__}")
            return {}
        out = {}
        for key, value in raw.items():
            child = f"{path}.{key}" if path else str(key)
            if key not in known:
                self.unknown(child)
                continue
            out[key] = value
        return out

    def number(self, raw, path: str, lo=None, hi=None, lo_open=False, allow_inf=False):
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            self.fail(path, f"expected a number, got {type(raw).__name__}")
            return None
        value = float(raw)
        if math.isnan(value) or (not allow_inf and math.isinf(value)):
            self.fail(path, "must be finite")
            return None
        if lo is not None and (value <= lo if lo_open else value < lo):
            self.fail(path, f"must be {'>' if lo_open else '>='} {lo}")
            return None
        if hi is not None and value > hi:
            self.fail(path, f"must be <= {hi}")
            return None
        return value

    def integer(self, raw, path: str, lo=None):
        if isinstance(raw, bool) or not isinstance(raw, int):
            self.fail(path, f"expected an integer, got {type(raw).__name__}")
            return None
        if lo is not None and raw < lo:
            self.fail(path, f"must be >= {lo}")
            return None
        return raw

    def boolean(self, raw, path: str):
        if not isinstance(raw, bool):
            self.fail(path, f"expected a boolean, got {type(raw).__name__}")
            return None
        return raw

    def choice(self, raw, path: str, options: tuple):
        if raw not in options:
            self.fail(path, f"must be one of {list(options)}")
            return None
        return raw

    def string(self, raw, path: str):
        if not isinstance(raw, str):
            self.fail(path, f"expected a string, got {type(raw).__name__}")
            return None
        return raw


def _build(cls, kwargs: dict, path: str, v: _Validator):
    try:
        return cls(**kwargs)
    except ValueError as exc:
        v.fail(path, str(exc))
        return cls()


def parse_config(text: str, lenient: bool = False) -> RunConfig:
    """Parse and fully validate a YAML configuration.

    Raises ConfigError carrying every problem found (not only the first).
    Missing keys take their documented defaults.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"not valid YAML: {exc}"]) from exc
    if raw is None:
        raw = {}
    v = _Validator(lenient)

    top = v.section(
        raw,
        "",
        dict.fromkeys(
            ("n_atoms", "spin_f", "mode", "n_cycles", "seed", "pump", "w1", "gap", "w2", "decay", "model", "output")
        ),
    )

    kw: dict = {}
    if "n_atoms" in top:
        val = v.integer(top["n_atoms"], "n_atoms", lo=1)
        if val is not None:
            kw["n_atoms"] = val
    if "spin_f" in top:
        val = v.number(top["spin_f"], "spin_f", lo=0.5)
        if val is not None:
            if abs(2 * val - round(2 * val)) > 1e-12:
                v.fail("spin_f", "must be a half-integer")
            else:
                kw["spin_f"] = val
    if "mode" in top:
        val = v.choice(top["mode"], "mode", ("two_pulse", "three_pulse"))
        if val is not None:
            kw["mode"] = val
    if "n_cycles" in top:
        val = v.integer(top["n_cycles"], "n_cycles", lo=100)
        if val is not None:
            kw["n_cycles"] = val
    if "seed" in top:
        val = v.integer(top["seed"], "seed", lo=0)
        if val is not None and val >= 2**64:
            v.fail("seed", "must fit in 64 bits")
        elif val is not None:
            kw["seed"] = val

    pump_kw = {}
    sec = v.section(top.get("pump"), "pump", {"polarization": None})
    if "polarization" in sec:
        val = v.number(sec["polarization"], "pump.polarization", lo=0.0, hi=1.0, lo_open=True)
        if val is not None:
            pump_kw["polarization"] = val

    w1_kw = {}
    sec = v.section(top.get("w1"), "w1", dict.fromkeys(("mu", "duty_cycle", "duration", "degradation")))
    if "mu" in sec:
        val = v.number(sec["mu"], "w1.mu", lo=0.0)
        if val is not None:
            w1_kw["mu"] = val
    if "duty_cycle" in sec:
        val = v.number(sec["duty_cycle"], "w1.duty_cycle", lo=0.0, hi=1.0, lo_open=True)
        if val is not None:
            w1_kw["duty_cycle"] = val
    if "duration" in sec:
        val = v.number(sec["duration"], "w1.duration", lo=0.0)
        if val is not None:
            w1_kw["duration"] = val
    if "degradation" in sec:
        if sec["degradation"] is not None:
            val = v.number(sec["degradation"], "w1.degradation", lo=0.0, hi=1.0)
            if val is not None:
                w1_kw["degradation"] = val

    gap_kw = {}
    sec = v.section(top.get("gap"), "gap", dict.fromkeys(("tau_gap", "larmor_frequency")))
    if "tau_gap" in sec:
        val = v.number(sec["tau_gap"], "gap.tau_gap", lo=0.0)
        if val is not None:
            gap_kw["tau_gap"] = val
    if "larmor_frequency" in sec:
        val = v.number(sec["larmor_frequency"], "gap.larmor_frequency", lo=0.0)
        if val is not None:
            gap_kw["larmor_frequency"] = val

    windows = None
    delta_tau = None
    sec = v.section(top.get("w2"), "w2", dict.fromkeys(("delta_tau", "windows")))
    if "delta_tau" in sec:
        delta_tau = v.number(sec["delta_tau"], "w2.delta_tau", lo=0.0)
    if "windows" in sec:
        raw_windows = sec["windows"]
        if not isinstance(raw_windows, list):
            v.fail("w2.windows", f"expected a list, got {type(raw_windows).__name__}")
        elif not 1 <= len(raw_windows) <= 3:
            v.fail("w2.windows", f"need 1 to 3 windows, got {len(raw_windows)}")
        else:
            windows = []
            for i, item in enumerate(raw_windows):
                wpath = f"w2.windows[{i}]"
                wsec = v.section(item, wpath, dict.fromkeys(("duration", "kappa2")))
                wkw = {}
                if "duration" in wsec:
                    val = v.number(wsec["duration"], f"{wpath}.duration", lo=0.0)
                    if val is not None:
                        wkw["duration"] = val
                if "kappa2" in wsec:
                    val = v.number(wsec["kappa2"], f"{wpath}.kappa2", lo=0.0)
                    if val is not None:
                        wkw["kappa2"] = val
                windows.append(_build(ProbeWindow, wkw, wpath, v))

    decay_kw = {}
    sec = v.section(top.get("decay"), "decay", {"t1": None})
    if "t1" in sec:
        val = v.number(sec["t1"], "decay.t1", lo=0.0, lo_open=True, allow_inf=True)
        if val is not None:
            decay_kw["t1"] = val

    model_fields = {f.name: f for f in fields(ModelConfig)}
    model_kw = {}
    sec = v.section(top.get("model"), "model", dict.fromkeys(model_fields))
    for key, value in sec.items():
        path = f"model.{key}"
        if key in ("stroboscopic", "gap_rotation", "mean_spin_penalty"):
            val = v.boolean(value, path)
        elif key == "theta_convention":
            val = v.choice(value, path, ("ellipse_aligned", "gap_angle"))
        elif key == "decay_time_basis":
            val = v.choice(value, path, ("cycle", "probe"))
        elif key == "rotation_denominator":
            val = v.choice(value, path, ("evolved", "bare"))
        elif key in ("duty_degradation_zero", "duty_degradation_one"):
            val = v.number(value, path, lo=0.0, hi=1.0)
        elif key == "thermal_ratio":
            val = v.number(value, path, lo=0.0)
            if val is not None and val >= 1.0:
                v.fail(path, "must be < 1")
                val = None
        elif key in ("oat_decoherence_rate", "scattering_eta", "theta_offset"):
            val = v.number(value, path, lo=0.0 if key != "theta_offset" else None)
        elif key == "shot_var":
            val = v.number(value, path, lo=0.0, lo_open=True)
        elif key == "spin_f":
            v.fail(path, "set spin_f at the top level")
            val = None
        else:
            val = value
        if val is not None:
            model_kw[key] = val

    output_dir = None
    sec = v.section(top.get("output"), "output", {"directory": None})
    if "directory" in sec:
        output_dir = v.string(sec["directory"], "output.directory")

    if v.errors:
        raise ConfigError(v.errors)

    pump = _build(PumpSettings, pump_kw, "pump", v)
    w1 = _build(OatPulse, w1_kw, "w1", v)
    gap = _build(GapSettings, gap_kw, "gap", v)
    decay = _build(DecaySettings, decay_kw, "decay", v)
    seq_kw = {"pump": pump, "w1": w1, "gap": gap, "decay": decay}
    if windows is not None:
        seq_kw["windows"] = tuple(windows)
    if delta_tau is not None:
        seq_kw["delta_tau"] = delta_tau
    sequence = _build(PulseSequence, seq_kw, "w2", v)
    model_kw["spin_f"] = kw.get("spin_f", 2.0)
    model = _build(ModelConfig, model_kw, "model", v)
    if v.errors:
        raise ConfigError(v.errors)

    cfg_kw = dict(kw)
    cfg_kw["sequence"] = sequence
    cfg_kw["model"] = model
    if output_dir is not None:
        cfg_kw["output_directory"] = output_dir
    return RunConfig(**cfg_kw)


def config_to_mapping(cfg: RunConfig) -> dict:
    """Fully resolved plain mapping (every default made explicit)."""
    seq = cfg.sequence
    model = cfg.model
    return {
        "n_atoms": cfg.n_atoms,
        "spin_f": cfg.spin_f,
        "mode": cfg.mode,
        "n_cycles": cfg.n_cycles,
        "seed": cfg.seed,
        "pump": {"polarization": seq.pump.polarization},
        "w1": {
            "mu": seq.w1.mu,
            "duty_cycle": seq.w1.duty_cycle,
            "duration": seq.w1.duration,
            "degradation": seq.w1.degradation,
        },
        "gap": {
            "tau_gap": seq.gap.tau_gap,
            "larmor_frequency": seq.gap.larmor_frequency,
        },
        "w2": {
            "delta_tau": seq.delta_tau,
            "windows": [
                {"duration": w.duration, "kappa2": w.kappa2} for w in seq.windows
            ],
        },
        "decay": {"t1": seq.decay.t1},
        "model": {
            "stroboscopic": model.stroboscopic,
            "gap_rotation": model.gap_rotation,
            "theta_convention": model.theta_convention,
            "theta_offset": model.theta_offset,
            "decay_time_basis": model.decay_time_basis,
            "rotation_denominator": model.rotation_denominator,
            "mean_spin_penalty": model.mean_spin_penalty,
            "thermal_ratio": model.thermal_ratio,
            "duty_degradation_zero": model.duty_degradation_zero,
            "duty_degradation_one": model.duty_degradation_one,
            "oat_decoherence_rate": model.oat_decoherence_rate,
            "scattering_eta": model.scattering_eta,
            "shot_var": model.shot_var,
        },
        "output": {"directory": cfg.output_directory},
    }


def serialize_config(cfg: RunConfig) -> str:
    """Canonical YAML form: defaults explicit, keys sorted."""
    return yaml.safe_dump(config_to_mapping(cfg), sort_keys=True, default_flow_style=False)


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()
