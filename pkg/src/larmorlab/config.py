"""Run configuration: flat ``section.key = value`` text files, strictly parsed.

Unknown keys are rejected rather than ignored so that a typo cannot silently
fall back to a default.  Values are plain scalars or comma-separated float
lists; there is no nesting and no quoting.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields, replace


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    # barrier geometry (rectangular; other shapes go through the library API)
    barrier_a: float = 100.0
    barrier_b: float = 101.0
    barrier_v0: float = 2.0
    # incident packet
    packet_k0: float = math.sqrt(2.0)
    packet_l0: float = 20.0
    packet_truncation: float = 5.0
    # magnetic field inside the barrier
    field_omega_l: float = 1e-3
    # grids
    grids_nx: int = 4001
    grids_nk: int = 801
    grids_nb: int = 257
    grids_x_pad: float = 40.0
    grids_dt: float = 0.0  # 0 = choose from the spectral content
    # stationary sweep
    stationary_k_min: float = 0.2
    stationary_k_max: float = 3.0
    stationary_nk: int = 601
    # opacity sweep (kappa*d values; E is held at V0/2)
    hartman_kappa_d: tuple = (2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0)
    # direct-evolution verification protocol
    verify_omega_sweep: tuple = (4e-3, 2e-3, 1e-3)
    verify_dx: float = 0.1
    verify_dt: float = 0.02
    # field-placement probe (region [b+offset, b+offset+width])
    probe_offset: float = 1.0
    probe_width: float = 1.0


#: config-file key -> dataclass field
_KEYMAP = {
    "barrier.a": "barrier_a",
    "barrier.b": "barrier_b",
    "barrier.v0": "barrier_v0",
    "packet.k0": "packet_k0",
    "packet.l0": "packet_l0",
    "packet.truncation": "packet_truncation",
    "field.omega_L": "field_omega_l",
    "grids.nx": "grids_nx",
    "grids.nk": "grids_nk",
    "grids.nb": "grids_nb",
    "grids.x_pad": "grids_x_pad",
    "grids.dt": "grids_dt",
    "stationary.k_min": "stationary_k_min",
    "stationary.k_max": "stationary_k_max",
    "stationary.nk": "stationary_nk",
    "hartman.kappa_d": "hartman_kappa_d",
    "verify.omega_sweep": "verify_omega_sweep",
    "verify.dx": "verify_dx",
    "verify.dt": "verify_dt",
    "probe.offset": "probe_offset",
    "probe.width": "probe_width",
}

_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(field_name: str, raw: str):
    kind = _TYPES[field_name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "tuple":
            return tuple(float(p) for p in raw.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"bad value for {field_name}: {raw!r}") from None
    raise ConfigError(f"unhandled field type for {field_name}")


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines into a field->value dict; strict keys."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _KEYMAP:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        field_name = _KEYMAP[key]
        if field_name in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[field_name] = _convert(field_name, raw)
    return out


def load_config(path=None) -> RunConfig:
    """RunConfig from a config file (defaults when path is None), validated."""
    cfg = RunConfig()
    if path is not None:
        with open(path) as fh:
            cfg = replace(cfg, **parse_config(fh.read()))
    validate(cfg)
    return cfg


def validate(cfg: RunConfig):
    checks = [
        (cfg.barrier_a > 0, "barrier.a must be > 0"),
        (cfg.barrier_b > cfg.barrier_a, "barrier.b must exceed barrier.a"),
        (cfg.packet_k0 > 0, "packet.k0 must be > 0"),
        (cfg.packet_l0 > 0, "packet.l0 must be > 0"),
        (cfg.packet_truncation > 0, "packet.truncation must be > 0"),
        (cfg.field_omega_l >= 0, "field.omega_L must be >= 0"),
        (cfg.grids_nx >= 3, "grids.nx must be >= 3"),
        (cfg.grids_nk >= 3, "grids.nk must be >= 3"),
        (cfg.grids_nb >= 3, "grids.nb must be >= 3"),
        (cfg.grids_x_pad > 0, "grids.x_pad must be > 0"),
        (cfg.grids_dt >= 0, "grids.dt must be >= 0"),
        (cfg.stationary_k_min > 0, "stationary.k_min must be > 0"),
        (cfg.stationary_k_max > cfg.stationary_k_min, "stationary.k_max must exceed k_min"),
        (cfg.stationary_nk >= 5, "stationary.nk must be >= 5"),
        (all(v > 0 for v in cfg.hartman_kappa_d), "hartman.kappa_d entries must be > 0"),
        (all(v > 0 for v in cfg.verify_omega_sweep), "verify.omega_sweep entries must be > 0"),
        (cfg.verify_dx > 0, "verify.dx must be > 0"),
        (cfg.verify_dt > 0, "verify.dt must be > 0"),
        (cfg.probe_offset > 0, "probe.offset must be > 0"),
        (cfg.probe_width > 0, "probe.width must be > 0"),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(message)
    if cfg.packet_l0 > 0.2 * cfg.barrier_a:
        warnings.warn(
            "packet.l0 is not small against barrier.a; the packet may overlap "
            "the barrier at t=0",
            stacklevel=2,
        )


def refine_config(cfg: RunConfig, factor: int) -> RunConfig:
    """Scale all grids by an integer factor (for convergence checks)."""
    if factor < 1:
        raise ConfigError("refine factor must be >= 1")
    return replace(
        cfg,
        grids_nx=(cfg.grids_nx - 1) * factor + 1,
        grids_nk=(cfg.grids_nk - 1) * factor + 1,
        grids_nb=(cfg.grids_nb - 1) * factor + 1,
        grids_dt=cfg.grids_dt / factor if cfg.grids_dt > 0 else 0.0,
        stationary_nk=(cfg.stationary_nk - 1) * factor + 1,
        verify_dx=cfg.verify_dx / factor,
        verify_dt=cfg.verify_dt / factor,
    )


def config_items(cfg: RunConfig) -> list:
    """(config-key, value-string) pairs of the fully resolved configuration."""
    inverse = {v: k for k, v in _KEYMAP.items()}
    items = []
    for f in fields(RunConfig):
        value = getattr(cfg, f.name)
        # repr keeps the shortest exact round-trip form of each float
        if isinstance(value, tuple):
            text = ",".join(repr(float(v)) for v in value)
        else:
            text = repr(value) if isinstance(value, float) else str(value)
        items.append((inverse[f.name], text))
    return sorted(items)
