"""Core data model: units, grids, barriers, confined fields, spectral amplitudes.

Everything downstream works in natural units hbar = m = 1, so energies are
E(k) = k^2/2 and wavenumbers double as momenta.  All types here are immutable
after construction and safe to share between threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

HBAR = 1.0
MASS = 1.0

#: smallest wavenumber kept on spectral grids (avoids the removable 1/k point)
K_FLOOR = 1e-6


def integrate(y, x):
    """Composite-trapezoid quadrature, the module-wide rule."""
    return np.trapezoid(y, x)


def trapezoid_weights(x):
    """Per-sample weights w such that sum(w*y) == trapezoid(y, x)."""
    x = np.asarray(x, dtype=float)
    w = np.empty_like(x)
    w[0] = 0.5 * (x[1] - x[0])
    w[-1] = 0.5 * (x[-1] - x[-2])
    w[1:-1] = 0.5 * (x[2:] - x[:-2])
    return w


@dataclass(frozen=True)
class ComplexField:
    """Complex samples psi(x) on a strictly increasing grid."""

    xgrid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.xgrid, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.ndim != 1 or v.shape != x.shape:
            raise ValueError("xgrid and values must be matching 1-D arrays")
        if np.any(np.diff(x) <= 0):
            raise ValueError("xgrid must be strictly increasing")
        object.__setattr__(self, "xgrid", x)
        object.__setattr__(self, "values", v)

    def norm_sq(self) -> float:
        n = integrate(np.abs(self.values) ** 2, self.xgrid)
        if not np.isfinite(n):
            raise ValueError("field norm is not finite")
        return float(n)


@dataclass(frozen=True)
class SpinorField:
    """Two-component (up/down) field on one shared grid."""

    up: ComplexField
    down: ComplexField

    def __post_init__(self):
        if self.up.xgrid.shape != self.down.xgrid.shape or np.any(
            self.up.xgrid != self.down.xgrid
        ):
            raise ValueError("spinor components must share one grid")

    @property
    def xgrid(self) -> np.ndarray:
        return self.up.xgrid


@dataclass(frozen=True)
class BarrierSpec:
    """Symmetric piecewise-constant potential supported on [a, b].

    ``segments`` is a tuple of ``(offset, half_width, height)`` triples; each
    triple places a slab of the given height centred at ``x_c + offset`` and,
    for offset > 0, its mirror at ``x_c - offset``.  Symmetry about the barrier
    midpoint is therefore structural.  V(x) = 0 outside [a, b] and in any gap
    not covered by a slab.
    """

    a: float
    b: float
    segments: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("left edge a must be positive")
        if not self.b > self.a:
            raise ValueError("barrier width must be positive")
        segs = tuple(
            (float(o), float(w), float(h)) for o, w, h in self.segments
        )
        object.__setattr__(self, "segments", segs)
        half = 0.5 * (self.b - self.a)
        for off, hw, _ in segs:
            if off < 0 or hw <= 0:
                raise ValueError("segment offsets must be >= 0 and half-widths > 0")
            if 1e-12 < off < hw - 1e-12:
                raise ValueError("segment pair overlaps itself across the midpoint")
            if off + hw > half + 1e-12:
                raise ValueError("segment extends beyond [a, b]")
        # overlap check on the realized right-half intervals
        ivals = sorted((off - hw, off + hw) for off, hw, _ in segs)
        for (l0, r0), (l1, r1) in zip(ivals, ivals[1:]):
            if l1 < r0 - 1e-12:
                raise ValueError("segments overlap")

    @property
    def x_c(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def d(self) -> float:
        return self.b - self.a

    @classmethod
    def rectangular(cls, a: float, b: float, height: float) -> "BarrierSpec":
        """Single slab of the given height filling [a, b]."""
        if height == 0.0:
            return cls(a, b, ())
        return cls(a, b, ((0.0, 0.5 * (b - a), height),))

    @classmethod
    def staircase(cls, a: float, b: float, profile, n: int) -> "BarrierSpec":
        """Discretize a smooth symmetric profile into n equal-width slabs.

        ``profile`` is evaluated at slab midpoints; it is symmetrized about the
        barrier centre so mildly asymmetric inputs do not break the structural
        symmetry guarantee.
        """
        if n < 1:
            raise ValueError("need at least one slab")
        edges = np.linspace(a, b, n + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        xc = 0.5 * (a + b)
        heights = 0.5 * (
            np.asarray([profile(x) for x in mids])
            + np.asarray([profile(2 * xc - x) for x in mids])
        )
        segs = []
        hw = 0.5 * (edges[1] - edges[0])
        for m, h in zip(mids, heights):
            if m >= xc - 1e-12 and h != 0.0:
                segs.append((m - xc, hw, float(h)))
        return cls(a, b, tuple(segs))

    def pieces(self) -> list[tuple[float, float, float]]:
        """Full tiling of [a, b] as (x_left, x_right, height), gaps at V=0."""
        xc = self.x_c
        ivals = []
        for off, hw, h in self.segments:
            ivals.append((xc + off - hw, xc + off + hw, h))
            if off > 0:
                ivals.append((xc - off - hw, xc - off + hw, h))
        ivals.sort()
        out = []
        cursor = self.a
        for l, r, h in ivals:
            l = max(l, self.a)
            r = min(r, self.b)
            if l > cursor + 1e-12:
                out.append((cursor, l, 0.0))
            out.append((l, r, h))
            cursor = r
        if cursor < self.b - 1e-12:
            out.append((cursor, self.b, 0.0))
        return out

    def left_pieces(self) -> list[tuple[float, float, float]]:
        """Tiling of [a, x_c] only (pieces clipped at the midpoint)."""
        xc = self.x_c
        out = []
        for l, r, h in self.pieces():
            if l >= xc - 1e-12:
                break
            out.append((l, min(r, xc), h))
        return out

    def value(self, x):
        """Potential V(x); vectorized."""
        x = np.asarray(x, dtype=float)
        v = np.zeros_like(x)
        for l, r, h in self.pieces():
            if h != 0.0:
                v = np.where((x >= l) & (x <= r), h, v)
        return v if v.ndim else float(v)

    def shifted(self, delta: float) -> "BarrierSpec":
        """New spec with every height on [a, b] shifted by delta (gaps included)."""
        if delta == 0.0:
            return self
        xc = self.x_c
        segs = []
        for l, r, h in self.pieces():
            # emit right-half slabs only; left halves are implied mirrors
            lo = max(l, xc)
            if r <= lo + 1e-12:
                continue
            segs.append((0.5 * (lo + r) - xc, 0.5 * (r - lo), h + delta))
        return BarrierSpec(self.a, self.b, tuple(segs))


@dataclass(frozen=True)
class FieldSpec:
    """Magnetic field along z confined to the barrier interval [a, b].

    Only the Larmor frequency omega_L = 2*mu*B/hbar enters the dynamics.
    omega_L = 0 reproduces the spinless problem in both channels.
    """

    omega_L: float = 0.0

    def __post_init__(self):
        if self.omega_L < 0:
            raise ValueError("omega_L must be >= 0")


def effective_barrier(spec: BarrierSpec, fieldspec: FieldSpec, spin: str) -> BarrierSpec:
    """Channel barrier: heights shifted by -omega_L/2 (up) or +omega_L/2 (down)."""
    if spin not in ("up", "down"):
        raise ValueError("spin must be 'up' or 'down'")
    sign = -1.0 if spin == "up" else +1.0
    return spec.shifted(sign * 0.5 * fieldspec.omega_L)


def barrier_value(spec: BarrierSpec, x):
    return spec.value(x)


@dataclass(frozen=True)
class SpectralAmplitude:
    """Real, non-negative momentum weights A(k) with unit L2 norm.

    The packet assembled from these weights has mean momentum k0 and initial
    position half-width l0; sigma_k = 1/(2*l0) is the minimal-uncertainty
    completion of those two moments.
    """

    k0: float
    l0: float
    sigma_k: float
    kgrid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kgrid", np.asarray(self.kgrid, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if np.any(np.diff(self.kgrid) <= 0):
            raise ValueError("kgrid must be strictly increasing")
        if np.any(self.kgrid <= 0):
            raise ValueError("kgrid must be strictly positive")
        if np.any(self.values < 0):
            raise ValueError("A(k) must be non-negative")

    @property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.kgrid)

    @property
    def energies(self) -> np.ndarray:
        return 0.5 * self.kgrid**2

    def energy(self, k):
        return 0.5 * np.asarray(k) ** 2

    def norm_sq(self) -> float:
        return float(integrate(self.values**2, self.kgrid))

    def mean_k(self) -> float:
        return float(integrate(self.kgrid * self.values**2, self.kgrid))


def build_gaussian_amplitude(
    k0: float, l0: float, truncation: float = 5.0, nk: int = 801
) -> SpectralAmplitude:
    """Gaussian A(k) centred at k0, truncated at k0 +/- truncation*sigma_k."""
    if k0 <= 0:
        raise ValueError("k0 must be positive")
    if l0 <= 0:
        raise ValueError("l0 must be positive")
    if truncation < 4:
        raise ValueError("truncation must be >= 4")
    sigma = 1.0 / (2.0 * l0)
    k_lo = k0 - truncation * sigma
    if k_lo <= 0:
        raise ValueError(
            "packet spectrum reaches non-positive k; enlarge l0 or lower truncation"
        )
    k_lo = max(K_FLOOR, k_lo)
    k_hi = k0 + truncation * sigma
    kgrid = np.linspace(k_lo, k_hi, nk)
    a = np.exp(-((kgrid - k0) ** 2) / (4.0 * sigma**2))
    a /= np.sqrt(integrate(a**2, kgrid))
    return SpectralAmplitude(k0=k0, l0=l0, sigma_k=sigma, kgrid=kgrid, values=a)


def make_xgrid(x_lo: float, x_hi: float, nx: int, anchor: float) -> np.ndarray:
    """Uniform grid over roughly [x_lo, x_hi] with ``anchor`` exactly on-grid."""
    if nx < 3:
        raise ValueError("nx too small")
    h = (x_hi - x_lo) / (nx - 1)
    n_left = int(np.ceil((anchor - x_lo) / h))
    return anchor + (np.arange(nx) - n_left) * h


def make_barrier_grid(spec: BarrierSpec, n: int = 257) -> np.ndarray:
    """Grid over [a, b] containing x_c as an exact sample (n forced odd)."""
    if n % 2 == 0:
        n += 1
    g = np.linspace(spec.a, spec.b, n)
    g[n // 2] = spec.x_c  # exact midpoint regardless of rounding
    return g
