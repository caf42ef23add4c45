"""Run configuration: flat `key = value` text files with `#` comments.

The canonical key set is fixed; unknown keys are rejected and every physical
bound is revalidated on load.  `n_inside` may be given instead of `nu` and is
converted on load (nu = n_inside / sinh^2 r1).  The fully-populated defaults
describe the strongly unbalanced setup (r1 = 2.1, |r2| = 5.2, 4.5 photons
inside, 3% internal loss, 77% detection transmission, 97% visibility,
1000-photon detector noise).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

from .detection import DetectorModel
from .errors import ConfigError
from .interferometer import InterferometerConfig
from .montecarlo import PumpModel

__all__ = ["RunConfig", "load_config", "parse_config_text", "serialize_config", "config_hash"]

_N_INSIDE_DEFAULT = 4.5
_R1_DEFAULT = 2.1

DEFAULTS: dict[str, float] = {
    # interferometer
    "r1": _R1_DEFAULT,
    "r2_abs": 5.2,
    "mu": 0.97,
    "eta": 0.77,
    "nu": _N_INSIDE_DEFAULT / math.sinh(_R1_DEFAULT) ** 2,
    "visibility": 0.97,
    "detector_noise": 1000.0,
    # detector (the constant near-dark-fringe noise keeps the Monte-Carlo
    # ensemble consistent with the analytic detector_noise above)
    "det_gain": 1.0,
    "det_knee": 2000.0,
    "det_deficit": 0.5,
    "det_noise_linear": 1000.0,
    "det_noise_dark": 1000.0,
    # pump and monitor channel
    "pump_mean_energy_uj": 20.0,
    "pump_g2": 1.00001,
    "pump_coupling_exponent": 0.5,
    "pump_monitor_r": 3.0,
    "pump_monitor_gain": 1e4,
    # scan geometry and post-selection
    "lambda_p_nm": 400.0,
    "delta_n_air": 1.5385e-5,
    "phi0_rad": 0.0,
    "scan_start_mm": 0.5,
    "scan_stop_mm": 27.0,
    "scan_points": 20,
    "scan_pulses": 4000,
    "window_lo": -math.inf,
    "window_hi": math.inf,
    # grids
    "phi_lo_rad": 0.0,
    "phi_hi_rad": math.pi,
    "sweep_eta_lo": 0.1,
    "sweep_eta_hi": 1.0,
    # reproducibility
    "seed": 12345,
}

_INT_KEYS = {"scan_points", "scan_pulses", "seed"}
_ALIAS_KEYS = {"n_inside"}


@dataclass
class RunConfig:
    """Validated, typed view of one configuration document."""

    values: dict[str, float]

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    @property
    def interferometer(self) -> InterferometerConfig:
        v = self.values
        return InterferometerConfig(
            r1=v["r1"],
            r2_abs=v["r2_abs"],
            mu=v["mu"],
            eta=v["eta"],
            nu=v["nu"],
            visibility=v["visibility"],
            detector_noise=v["detector_noise"],
        )

    @property
    def detector(self) -> DetectorModel:
        v = self.values
        return DetectorModel(
            gain=v["det_gain"],
            knee=v["det_knee"],
            deficit=v["det_deficit"],
            noise_linear=v["det_noise_linear"],
            noise_dark=v["det_noise_dark"],
        )

    @property
    def pump(self) -> PumpModel:
        v = self.values
        return PumpModel.from_g2(
            v["pump_g2"],
            mean_energy_uj=v["pump_mean_energy_uj"],
            coupling_exponent=v["pump_coupling_exponent"],
            monitor_r=v["pump_monitor_r"],
            monitor_gain=v["pump_monitor_gain"],
        )

    @property
    def period_mm(self) -> float:
        return 2.0 * self.values["lambda_p_nm"] * 1e-6 / self.values["delta_n_air"]

    @property
    def seed(self) -> int:
        return int(self.values["seed"])

    def scan_positions(self) -> list[float]:
        v = self.values
        n = int(v["scan_points"])
        start, stop = v["scan_start_mm"], v["scan_stop_mm"]
        step = (stop - start) / (n - 1) if n > 1 else 0.0
        return [start + i * step for i in range(n)]


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate a configuration document; raise ConfigError on any fault."""
    values = dict(DEFAULTS)
    n_inside = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source} line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in values and key not in _ALIAS_KEYS:
            raise ConfigError(f"{source} line {lineno}: unknown key {key!r}")
        try:
            num = float(val)
        except ValueError as exc:
            raise ConfigError(f"{source} line {lineno}: key {key!r}: {exc}") from None
        if key == "n_inside":
            n_inside = num
        else:
            values[key] = num
    if n_inside is not None:
        r1 = values["r1"]
        if r1 <= 0.0:
            raise ConfigError(f"{source}: n_inside requires r1 > 0")
        values["nu"] = n_inside / math.sinh(r1) ** 2
    cfg = RunConfig(values)
    _validate(cfg, source)
    return cfg


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Load a config file (or the defaults when path is None) plus CLI overrides."""
    if path is None:
        cfg = parse_config_text("", "<defaults>")
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        cfg = parse_config_text(text, str(path))
    if overrides:
        for key, num in overrides.items():
            if key not in cfg.values:
                raise ConfigError(f"unknown override key {key!r}")
            cfg.values[key] = float(num)
        _validate(cfg, "<overrides>")
    return cfg


def _validate(cfg: RunConfig, source: str) -> None:
    v = cfg.values
    for key in _INT_KEYS:
        if v[key] != int(v[key]):
            raise ConfigError(f"{source}: key {key!r} must be an integer, got {v[key]!r}")
    try:
        cfg.interferometer
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    try:
        cfg.detector
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    try:
        cfg.pump
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if v["delta_n_air"] <= 0.0 or v["lambda_p_nm"] <= 0.0:
        raise ConfigError(f"{source}: key 'delta_n_air'/'lambda_p_nm' must be positive")
    if not v["window_lo"] < v["window_hi"]:
        raise ConfigError(f"{source}: key 'window_lo' must be below 'window_hi'")
    if v["scan_points"] < 1:
        raise ConfigError(f"{source}: key 'scan_points' must be >= 1")
    if v["scan_points"] > 1 and not v["scan_start_mm"] < v["scan_stop_mm"]:
        raise ConfigError(f"{source}: key 'scan_start_mm' must be below 'scan_stop_mm'")
    if v["scan_pulses"] < 100:
        raise ConfigError(f"{source}: key 'scan_pulses' must be >= 100")
    if not (0.0 < v["sweep_eta_lo"] <= v["sweep_eta_hi"] <= 1.0):
        raise ConfigError(f"{source}: keys 'sweep_eta_lo'/'sweep_eta_hi' must satisfy 0 < lo <= hi <= 1")
    if not v["phi_lo_rad"] < v["phi_hi_rad"]:
        raise ConfigError(f"{source}: key 'phi_lo_rad' must be below 'phi_hi_rad'")


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form: sorted keys, repr-exact floats."""
    lines = []
    for key in sorted(cfg.values):
        val = cfg.values[key]
        if key in _INT_KEYS:
            lines.append(f"{key} = {int(val)}")
        else:
            lines.append(f"{key} = {val!r}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: RunConfig) -> str:
    """Stable sha256 of the canonical serialization (first 16 hex digits)."""
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()[:16]
