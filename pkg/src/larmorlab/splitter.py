"""Transmission/reflection splitting of stationary states.

For a symmetric barrier every scattering state has a unique decomposition
psi_full = psi_tr + psi_ref in which psi_ref vanishes identically at and
beyond the barrier midpoint x_c.  The reflection field is built from the
auxiliary solution u of the stationary equation on (-inf, x_c] with
u(x_c) = 0, u'(x_c) = 1, rescaled so that its incoming-from-the-right
component reproduces the reflected amplitude B_out.  Because u has real
boundary data and the potential is real, u is a real solution and its
far-left plane-wave coefficients satisfy |alpha| = |beta| exactly; the
norm split |a_in|^2 = T, |b_in|^2 = R is then a consequence of the
symmetric-barrier construction and is tested, not assumed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BarrierSpec, ComplexField
from .stationary import StationaryState, _sweep


class DegenerateDecomposition(Exception):
    """Raised when the reflection channel is absent (R = 0)."""


class _BackwardSolution:
    """u on (-inf, x_c] with u(x_c)=0, u'(x_c)=1 and far-left coefficients."""

    def __init__(self, spec: BarrierSpec, k: float):
        if k <= 0:
            raise ValueError("k must be positive")
        self.spec = spec
        self.k = float(k)
        E = 0.5 * k * k
        records, psi_a, dpsi_a, sigma = _sweep(spec.left_pieces(), E, 0.0 + 0j, 1.0 + 0j)
        ik = 1j * k
        a = spec.a
        scale = np.exp(sigma)
        self.alpha = complex(scale * 0.5 * (psi_a + dpsi_a / ik) * np.exp(-1j * k * a))
        self.beta = complex(scale * 0.5 * (psi_a - dpsi_a / ik) * np.exp(1j * k * a))
        self._records = records
        self._sigma = sigma

    def sample(self, xgrid) -> np.ndarray:
        """u on points x <= x_c (values for x > x_c are returned as 0)."""
        x = np.asarray(xgrid, dtype=float)
        k, a, xc = self.k, self.spec.a, self.spec.x_c
        out = np.zeros(x.shape, dtype=complex)
        left = x <= a
        out[left] = self.alpha * np.exp(1j * k * x[left]) + self.beta * np.exp(
            -1j * k * x[left]
        )
        for rec in self._records:
            m = (x > rec.x_left) & (x <= rec.x_right) & ~left
            if not np.any(m):
                continue
            pref = np.exp(rec.logscale)
            xi = x[m] - rec.x_right
            if rec.linear:
                out[m] = pref * (rec.c + rec.d * xi)
            else:
                out[m] = pref * (
                    rec.c * np.exp(1j * rec.q * xi) + rec.d * np.exp(-1j * rec.q * xi)
                )
        # exact zero at the midpoint by construction
        out[np.isclose(x, xc, rtol=0.0, atol=1e-12)] = 0.0
        return out


def backward_solution(spec: BarrierSpec, k: float, xgrid=None):
    """(alpha, beta, u) for the midpoint-pinned auxiliary solution.

    ``u`` is sampled on the part of ``xgrid`` left of x_c (the whole grid is
    accepted; values beyond x_c are zero-filled).  beta == 0 signals a
    degenerate decomposition and is raised as such.
    """
    sol = _BackwardSolution(spec, k)
    if abs(sol.beta) == 0.0:
        raise DegenerateDecomposition("decomposition degenerate: R=0")
    if xgrid is None:
        xgrid = np.linspace(spec.a - 2.0, spec.x_c, 501)
    x = np.asarray(xgrid, dtype=float)
    x = x[x <= spec.x_c + 1e-12]
    return sol.alpha, sol.beta, ComplexField(x, sol.sample(x))


@dataclass(frozen=True)
class Decomposition:
    """psi_full = psi_tr + psi_ref with psi_ref == 0 for x >= x_c."""

    k: float
    psi_tr: ComplexField
    psi_ref: ComplexField
    a_in: complex
    b_in: complex


def _midpoint_index(xgrid, x_c: float) -> int:
    i = int(np.argmin(np.abs(xgrid - x_c)))
    if abs(xgrid[i] - x_c) > 1e-9:
        raise ValueError("grid must contain the barrier midpoint x_c")
    return i


def decompose(state: StationaryState, spec: BarrierSpec) -> Decomposition:
    """Split a stationary state; degenerate (R = 0) states get psi_ref == 0."""
    xgrid = state.psi_full.xgrid
    ic = _midpoint_index(xgrid, spec.x_c)
    full = state.psi_full.values
    if state.R < 1e-28:
        zeros = np.zeros_like(full)
        return Decomposition(
            k=state.k,
            psi_tr=ComplexField(xgrid, full.copy()),
            psi_ref=ComplexField(xgrid, zeros),
            a_in=1.0 + 0j,
            b_in=0.0 + 0j,
        )
    sol = _BackwardSolution(spec, state.k)
    if abs(sol.beta) == 0.0:
        raise DegenerateDecomposition("decomposition degenerate: R=0")
    ratio = state.B_out / sol.beta
    ref = np.zeros_like(full)
    ref[: ic + 1] = ratio * sol.sample(xgrid[: ic + 1])
    ref[ic] = 0.0
    tr = full - ref
    b_in = ratio * sol.alpha
    return Decomposition(
        k=state.k,
        psi_tr=ComplexField(xgrid, tr),
        psi_ref=ComplexField(xgrid, ref),
        a_in=1.0 - b_in,
        b_in=b_in,
    )
