"""Stationary scattering on piecewise-constant barriers.

The solver sweeps the solution from the transmitted side (x >= b) leftwards
through the constant-potential pieces, which is the numerically stable
direction for evanescent regions.  Scattering amplitudes come out exact up to
rounding; the spatial grid only affects where psi is sampled.  Very opaque
barriers are handled by factoring the running magnitude out of the sweep, so
kappa*d far beyond overflow territory stays finite in log form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BarrierSpec, ComplexField

#: below this |q| a piece is treated as the linear (q -> 0) limit
_Q_LINEAR = 1e-7
#: rescale the sweep once the state magnitude exceeds this
_RESCALE_AT = 1e50


@dataclass(frozen=True)
class _PieceCoeffs:
    x_left: float
    x_right: float
    q: complex
    c: complex  # coefficient of exp(+i q (x - x_right)), or value at x_right
    d: complex  # coefficient of exp(-i q (x - x_right)), or slope (linear piece)
    linear: bool
    logscale: float  # log of the factor divided out before c, d were recorded


def _sweep(pieces, E: float, psi: complex, dpsi: complex):
    """Propagate (psi, psi') right-to-left through ``pieces``.

    Returns the per-piece coefficient records and the final scaled state with
    its accumulated log-scale.  ``pieces`` must tile a contiguous interval.
    """
    records = []
    logscale = 0.0
    for x_l, x_r, v in reversed(list(pieces)):
        w = x_r - x_l
        q = np.sqrt(complex(2.0 * (E - v)))
        if abs(q) < _Q_LINEAR:
            c, d = psi, dpsi
            records.append(_PieceCoeffs(x_l, x_r, q, c, d, True, logscale))
            psi = c - d * w
            dpsi = d
        else:
            c = 0.5 * (psi + dpsi / (1j * q))
            d = 0.5 * (psi - dpsi / (1j * q))
            records.append(_PieceCoeffs(x_l, x_r, q, c, d, False, logscale))
            ep = np.exp(-1j * q * w)
            em = np.exp(1j * q * w)
            psi = c * ep + d * em
            dpsi = 1j * q * (c * ep - d * em)
        mag = max(abs(psi), abs(dpsi))
        if mag > _RESCALE_AT:
            psi /= mag
            dpsi /= mag
            logscale += np.log(mag)
    records.reverse()
    return records, psi, dpsi, logscale


class _Solution:
    """Backward-swept solution with exact amplitudes and piecewise samplers."""

    def __init__(self, spec: BarrierSpec, k: float):
        if k <= 0:
            raise ValueError("k must be positive")
        self.spec = spec
        self.k = float(k)
        E = 0.5 * k * k
        # reference wave exp(i k (x - b)) on the transmitted side
        records, psi_a, dpsi_a, sigma = _sweep(spec.pieces(), E, 1.0 + 0j, 1j * k)
        ik = 1j * k
        alpha_t = 0.5 * (psi_a + dpsi_a / ik)
        beta_t = 0.5 * (psi_a - dpsi_a / ik)
        a, b = spec.a, spec.b
        self.A_out = complex(np.exp(1j * k * (a - b) - sigma) / alpha_t)
        self.B_out = complex(np.exp(2j * k * a) * beta_t / alpha_t)
        self._records = records
        self._sigma = sigma
        self._alpha_t = alpha_t

    @property
    def T(self) -> float:
        return abs(self.A_out) ** 2

    @property
    def R(self) -> float:
        return abs(self.B_out) ** 2

    def _interior(self, x):
        """psi_full on barrier-interior points (vectorized)."""
        k, a = self.k, self.spec.a
        out = np.zeros(np.shape(x), dtype=complex)
        for rec in self._records:
            m = (x > rec.x_left) & (x <= rec.x_right)
            if not np.any(m):
                continue
            pref = np.exp(1j * k * a + (rec.logscale - self._sigma)) / self._alpha_t
            xi = x[m] - rec.x_right
            if rec.linear:
                out[m] = pref * (rec.c + rec.d * xi)
            else:
                out[m] = pref * (
                    rec.c * np.exp(1j * rec.q * xi) + rec.d * np.exp(-1j * rec.q * xi)
                )
        return out

    def sample(self, xgrid) -> np.ndarray:
        x = np.asarray(xgrid, dtype=float)
        k = self.k
        a, b = self.spec.a, self.spec.b
        out = np.empty(x.shape, dtype=complex)
        left = x <= a
        right = x >= b
        mid = ~(left | right)
        out[left] = np.exp(1j * k * x[left]) + self.B_out * np.exp(-1j * k * x[left])
        out[right] = self.A_out * np.exp(1j * k * x[right])
        if np.any(mid):
            out[mid] = self._interior(x[mid])
        return out

    def eval_interior(self, x: float):
        """(psi, psi') inside a given piece; used for continuity checks."""
        k, a = self.k, self.spec.a
        for rec in self._records:
            if rec.x_left - 1e-12 <= x <= rec.x_right + 1e-12:
                pref = np.exp(1j * k * a + (rec.logscale - self._sigma)) / self._alpha_t
                xi = x - rec.x_right
                if rec.linear:
                    return pref * (rec.c + rec.d * xi), pref * rec.d
                ep = np.exp(1j * rec.q * xi)
                em = np.exp(-1j * rec.q * xi)
                return (
                    pref * (rec.c * ep + rec.d * em),
                    pref * 1j * rec.q * (rec.c * ep - rec.d * em),
                )
        raise ValueError("x outside the barrier interior")


@dataclass(frozen=True)
class StationaryState:
    """Per-wavenumber scattering solution with unit incident amplitude."""

    k: float
    A_out: complex
    B_out: complex
    psi_full: ComplexField
    T: float
    R: float


def solve_stationary(spec: BarrierSpec, k: float, xgrid) -> StationaryState:
    sol = _Solution(spec, k)
    field = ComplexField(np.asarray(xgrid, dtype=float), sol.sample(xgrid))
    return StationaryState(
        k=float(k), A_out=sol.A_out, B_out=sol.B_out, psi_full=field, T=sol.T, R=sol.R
    )


def scattering_sweep(spec: BarrierSpec, kgrid):
    """Per-k (k, T, R, arg A_out) rows with the phase unwrapped along the sweep."""
    kgrid = np.asarray(kgrid, dtype=float)
    if kgrid.size == 0:
        raise ValueError("empty k grid")
    if np.any(kgrid <= 0):
        raise ValueError("all k must be positive")
    sols = [_Solution(spec, k) for k in kgrid]
    T = np.array([s.T for s in sols])
    R = np.array([s.R for s in sols])
    phase = np.unwrap(np.array([np.angle(s.A_out) for s in sols]))
    return [
        (float(k), float(t), float(r), float(p))
        for k, t, r, p in zip(kgrid, T, R, phase)
    ]
