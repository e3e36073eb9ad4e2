"""Direct time-domain spinor evolution (Crank-Nicolson, hard walls).

This evolver is deliberately independent of the spectral machinery: it
integrates i dPsi/dt = H Psi on a uniform grid with the implicit midpoint
(Crank-Nicolson) scheme, which is unitary up to solver tolerance.  The two
spin channels never couple (the field is along z), so each evolves under its
own effective barrier.  Hard walls plus a generous domain keep the norm
bookkeeping exact; the edge density is monitored, not assumed small.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .model import BarrierSpec, ComplexField, FieldSpec, SpinorField, integrate


class DomainTooSmall(Exception):
    pass


class NotAsymptotic(Exception):
    pass


@dataclass(frozen=True)
class EvolverConfig:
    x_lo: float
    x_hi: float
    dx: float
    dt: float
    snapshot_times: tuple[float, ...]
    # a discontinuous barrier emits a genuine fast high-momentum precursor
    # (momentum density ~ 1/k^4), so some 1e-9-scale density reaches any
    # affordable wall; the tolerance only needs to stay far below the
    # measurement scales, not at machine level
    edge_tol: float = 1e-8

    def grid(self) -> np.ndarray:
        n = int(round((self.x_hi - self.x_lo) / self.dx)) + 1
        return self.x_lo + self.dx * np.arange(n)


def gaussian_spinor(xgrid, k0: float, l0: float, center: float = 0.0) -> SpinorField:
    """Equal-weight up/down spinor on a free Gaussian with the standard moments.

    Each channel is unit-normalized; <x> = center, <p> = k0, <x^2> - <x>^2 = l0^2.
    """
    x = np.asarray(xgrid, dtype=float)
    psi = (2.0 * np.pi * l0**2) ** (-0.25) * np.exp(
        -((x - center) ** 2) / (4.0 * l0**2) + 1j * k0 * x
    )
    psi = psi / np.sqrt(integrate(np.abs(psi) ** 2, x))
    f = ComplexField(x, psi)
    return SpinorField(up=f, down=f)


class _ChannelStepper:
    """Crank-Nicolson stepper for one spin channel (fixed potential)."""

    def __init__(self, x: np.ndarray, v: np.ndarray, dt: float):
        n = x.size
        dx = x[1] - x[0]
        # H = -(1/2) d2/dx2 + V with Dirichlet walls
        h_diag = 1.0 / dx**2 + v
        h_off = -0.5 / dx**2
        z = 0.5j * dt
        self._ab = np.zeros((3, n), dtype=complex)
        self._ab[0, 1:] = z * h_off
        self._ab[1, :] = 1.0 + z * h_diag
        self._ab[2, :-1] = z * h_off
        self._b_diag = 1.0 - z * h_diag
        self._b_off = -z * h_off

    def step(self, psi: np.ndarray) -> np.ndarray:
        rhs = self._b_diag * psi
        rhs[:-1] += self._b_off * psi[1:]
        rhs[1:] += self._b_off * psi[:-1]
        return solve_banded((1, 1), self._ab, rhs)


def _averaged_profile(x: np.ndarray, dx: float, intervals) -> np.ndarray:
    """Cell averages of a piecewise-constant profile over [x-dx/2, x+dx/2].

    Node-sampling a discontinuous potential effectively widens each slab by
    about one cell (half a cell per edge), an O(dx) bias; averaging over the
    cell restores O(dx^2) convergence of the discretized Hamiltonian.
    """
    v = np.zeros(x.size)
    for lo, hi, h in intervals:
        if h == 0.0:
            continue
        overlap = np.minimum(x + 0.5 * dx, hi) - np.maximum(x - 0.5 * dx, lo)
        v += h * np.clip(overlap, 0.0, None) / dx
    return v


def evolve(
    initial: SpinorField,
    spec: BarrierSpec,
    fieldspec: FieldSpec,
    cfg: EvolverConfig,
    field_region: tuple[float, float] | None = None,
) -> list[tuple[float, SpinorField]]:
    """Evolve a spinor from t = 0, returning (time, snapshot) pairs.

    ``field_region`` overrides the interval on which the magnetic term acts
    (default: the barrier interval [a, b]); the potential V is unchanged.
    """
    x = cfg.grid()
    if initial.xgrid.shape != x.shape or np.any(np.abs(initial.xgrid - x) > 1e-9):
        raise ValueError("initial state must live on the evolver grid")
    lo, hi = field_region if field_region is not None else (spec.a, spec.b)
    zee = _averaged_profile(x, cfg.dx, [(lo, hi, 0.5 * fieldspec.omega_L)])
    v0 = _averaged_profile(x, cfg.dx, spec.pieces())
    steppers = {
        "up": _ChannelStepper(x, v0 - zee, cfg.dt),
        "down": _ChannelStepper(x, v0 + zee, cfg.dt),
    }
    psi = {"up": initial.up.values.copy(), "down": initial.down.values.copy()}

    snap_times = sorted(cfg.snapshot_times)
    snap_steps = [int(round(ts / cfg.dt)) for ts in snap_times]
    if any(s < 0 for s in snap_steps):
        raise ValueError("snapshot times must be >= 0")
    out = []
    if snap_steps and snap_steps[0] == 0:
        out.append((0.0, initial))
        snap_steps = snap_steps[1:]

    n_steps = max(snap_steps) if snap_steps else 0
    pending = iter(snap_steps)
    next_snap = next(pending, None)
    for n in range(1, n_steps + 1):
        for ch in ("up", "down"):
            psi[ch] = steppers[ch].step(psi[ch])
        if n % 200 == 0 or n == next_snap:
            edge = max(
                float(np.max(np.abs(psi["up"][[0, 1, -2, -1]]) ** 2)),
                float(np.max(np.abs(psi["down"][[0, 1, -2, -1]]) ** 2)),
            )
            if edge > cfg.edge_tol:
                raise DomainTooSmall("domain too small: edge density breached")
        if n == next_snap:
            out.append(
                (
                    n * cfg.dt,
                    SpinorField(
                        up=ComplexField(x, psi["up"].copy()),
                        down=ComplexField(x, psi["down"].copy()),
                    ),
                )
            )
            next_snap = next(pending, None)
    return out


@dataclass(frozen=True)
class AsymptoticSpin:
    phi_tr_inf: float
    phi_ref_inf: float
    theta_tr: float
    theta_ref: float
    Sz_tr: float
    Sz_ref: float
    T_up: float
    T_dn: float
    R_up: float
    R_dn: float


def asymptotic_spin_measurement(
    snapshot: SpinorField, x_c: float, barrier: tuple[float, float] | None = None
) -> AsymptoticSpin:
    """Region-split spin readout once the packet has left the barrier.

    Transmitted quantities come from x > x_c, reflected from x < x_c; the
    split is exact asymptotically because the reflection field vanishes at
    and beyond the midpoint.  The azimuths use the clock convention of the
    spin module (positive in the Larmor sense).
    """
    x = snapshot.xgrid
    fu = snapshot.up.values
    fd = snapshot.down.values
    if barrier is not None:
        lo, hi = barrier
        m = (x >= lo) & (x <= hi)
        occ = float(
            integrate(np.abs(fu[m]) ** 2 + np.abs(fd[m]) ** 2, x[m])
        )
        if occ > 1e-8:
            raise NotAsymptotic("not asymptotic: barrier occupancy not yet negligible")

    def _side(mask):
        nu = float(integrate(np.abs(fu[mask]) ** 2, x[mask]))
        nd = float(integrate(np.abs(fd[mask]) ** 2, x[mask]))
        ov = complex(integrate(np.conj(fu[mask]) * fd[mask], x[mask]))
        nw = nu + nd
        phi = float(np.arctan2(-ov.imag / nw, ov.real / nw))
        sz = 0.5 * (nu - nd) / nw
        theta = float(np.arccos(np.clip(2.0 * sz, -1.0, 1.0)))
        return phi, theta, sz, nu, nd

    phi_t, th_t, sz_t, tu, td = _side(x > x_c)
    phi_r, th_r, sz_r, ru, rd = _side(x < x_c)
    return AsymptoticSpin(
        phi_tr_inf=phi_t,
        phi_ref_inf=phi_r,
        theta_tr=th_t,
        theta_ref=th_r,
        Sz_tr=sz_t,
        Sz_ref=sz_r,
        T_up=tu,
        T_dn=td,
        R_up=ru,
        R_dn=rd,
    )


def field_placement_probe(
    initial: SpinorField,
    spec: BarrierSpec,
    fieldspec: FieldSpec,
    regions: list[tuple[float, float]],
    cfg: EvolverConfig,
):
    """Final-spin readout for the same dynamics with the field in each region.

    Returns one dict per region with the asymptotic measurement; whether a
    behind-barrier field shifts the reflected-subensemble azimuth is recorded
    as data, not asserted.
    """
    out = []
    for lo, hi in regions:
        snaps = evolve(initial, spec, fieldspec, cfg, field_region=(lo, hi))
        t_f, last = snaps[-1]
        meas = asymptotic_spin_measurement(last, spec.x_c, barrier=(spec.a, spec.b))
        out.append(
            {
                "region_lo": lo,
                "region_hi": hi,
                "t_final": t_f,
                "measurement": meas,
            }
        )
    return out
