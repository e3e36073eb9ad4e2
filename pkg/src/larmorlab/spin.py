"""Bloch-vector observables for the full, transmitted and reflected subensembles.

Expectation values are the normalized forms
    Sx = Re<psi_up|psi_dn> / Nw,  Sy = Im<psi_up|psi_dn> / Nw,
    Sz = (||psi_up||^2 - ||psi_dn||^2) / (2 Nw),   Nw = ||psi_up||^2 + ||psi_dn||^2,
with the integration domain restricted to (-inf, x_c] for the reflected
subensemble.  At t = 0 the full ensemble sits at (1/2, 0, 0).

Azimuth convention: the Hamiltonian couples as -(omega_L/2)*sigma_z, under
which the standard azimuth atan2(Sy, Sx) *decreases* in time.  The clock
angle reported here is phi = atan2(-Sy, Sx), i.e. the rotation angle measured
in the sense of the Larmor precession, so phi grows monotonically during the
interaction and Delta_phi = omega_L * tau holds with positive signs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BarrierSpec, FieldSpec, SpectralAmplitude, effective_barrier, integrate, trapezoid_weights
from .packet import EPS_R, PacketFamily, build_family, kernel_overlap, overlap_kernel


class DegenerateSubensemble(Exception):
    pass


class AzimuthUndefined(Exception):
    pass


@dataclass
class SpinorPacket:
    """Up/down packet families sharing one spectral amplitude and grids."""

    up: PacketFamily
    down: PacketFamily
    omega_L: float

    def __post_init__(self):
        if self.up.xgrid.shape != self.down.xgrid.shape or np.any(
            self.up.xgrid != self.down.xgrid
        ):
            raise ValueError("channels must share the x grid")
        if np.any(self.up.amplitude.kgrid != self.down.amplitude.kgrid):
            raise ValueError("channels must share the k grid")


def build_spinor_packet(
    spec: BarrierSpec,
    fieldspec: FieldSpec,
    amplitude: SpectralAmplitude,
    xgrid=None,
    bgrid=None,
    **kw,
) -> SpinorPacket:
    up = build_family(
        effective_barrier(spec, fieldspec, "up"), amplitude, xgrid, bgrid, spin="up", **kw
    )
    down = build_family(
        effective_barrier(spec, fieldspec, "down"),
        amplitude,
        up.xgrid,
        up.bgrid,
        spin="down",
        **kw,
    )
    return SpinorPacket(up=up, down=down, omega_L=fieldspec.omega_L)


@dataclass(frozen=True)
class BlochState:
    Sx: float
    Sy: float
    Sz: float
    theta: float
    phi: float  # precession angle, positive in the Larmor sense (see module doc)


def _kernel_triplet(spinor: SpinorPacket, which: str):
    """(W_up_up, W_dn_dn, W_up_dn) overlap kernels for a subensemble."""
    up, dn = spinor.up, spinor.down
    return (
        overlap_kernel(up, up, which),
        overlap_kernel(dn, dn, which),
        overlap_kernel(up, dn, which),
    )


def _bloch_from_overlaps(nu, nd, ov):
    nw = nu + nd
    Sx = ov.real / nw
    Sy = ov.imag / nw
    Sz = 0.5 * (nu - nd) / nw
    theta = float(np.arccos(np.clip(2.0 * Sz, -1.0, 1.0)))
    phi = float(np.arctan2(-Sy, Sx))
    return BlochState(Sx=Sx, Sy=Sy, Sz=Sz, theta=theta, phi=phi), nw


def bloch(spinor: SpinorPacket, which: str, t: float) -> BlochState:
    """Bloch vector of a subensemble at time t."""
    W_uu, W_dd, W_ud = _kernel_triplet(spinor, which)
    if which == "ref":
        ru = spinor.up.R_k
        R_w = float(integrate(spinor.up.amplitude.values**2 * ru, spinor.up.amplitude.kgrid))
        if R_w <= EPS_R:
            raise DegenerateSubensemble("degenerate reflection subensemble")
    c = spinor.up.spectral_coeffs(t)
    nu = kernel_overlap(W_uu, c).real
    nd = kernel_overlap(W_dd, c).real
    ov = kernel_overlap(W_ud, c)
    state, _ = _bloch_from_overlaps(nu, nd, ov)
    return state


def bloch_trace(spinor: SpinorPacket, which: str, tgrid, chunk: int = 512):
    """Vectorized Bloch components over a time grid; phi unwrapped along t.

    Returns a dict of arrays: Sx, Sy, Sz, theta, phi, Nw.
    """
    tgrid = np.asarray(tgrid, dtype=float)
    W_uu, W_dd, W_ud = _kernel_triplet(spinor, which)
    nu = np.empty(tgrid.size)
    nd = np.empty(tgrid.size)
    ov = np.empty(tgrid.size, dtype=complex)
    for s in range(0, tgrid.size, chunk):
        C = spinor.up.spectral_coeffs(tgrid[s : s + chunk])
        nu[s : s + chunk] = kernel_overlap(W_uu, C).real
        nd[s : s + chunk] = kernel_overlap(W_dd, C).real
        ov[s : s + chunk] = kernel_overlap(W_ud, C)
    nw = nu + nd
    Sx = ov.real / nw
    Sy = ov.imag / nw
    Sz = 0.5 * (nu - nd) / nw
    theta = np.arccos(np.clip(2.0 * Sz, -1.0, 1.0))
    phi = np.unwrap(np.arctan2(-Sy, Sx))
    return {"t": tgrid, "Sx": Sx, "Sy": Sy, "Sz": Sz, "theta": theta, "phi": phi, "Nw": nw}


def initial_angles(spinor: SpinorPacket):
    """(phi_tr0, theta_tr0, phi_ref0, theta_ref0) at t = 0."""
    btr = bloch(spinor, "tr", 0.0)
    bref = bloch(spinor, "ref", 0.0)
    return btr.phi, btr.theta, bref.phi, bref.theta


def precession_rate(spinor: SpinorPacket, which: str, t: float) -> float:
    """d(phi)/dt of a subensemble from the barrier-region Ehrenfest integrals."""
    if which not in ("tr", "ref"):
        raise ValueError("which must be 'tr' or 'ref'")
    up, dn = spinor.up, spinor.down
    v = up.spectral_coeffs(t)
    if which == "tr":
        Bu, Bd = up.Mb_tr, dn.Mb_tr
        bg = up.bgrid
    else:
        ibc = up.ib_c
        Bu = up.Mb_full[: ibc + 1] - up.Mb_tr[: ibc + 1]
        Bd = dn.Mb_full[: ibc + 1] - dn.Mb_tr[: ibc + 1]
        bg = up.bgrid[: ibc + 1]

    fu_b, fd_b = Bu @ v, Bd @ v
    I_B = complex(trapezoid_weights(bg) @ (np.conj(fu_b) * fd_b))
    W_uu, W_dd, W_ud = _kernel_triplet(spinor, which)
    nu = kernel_overlap(W_uu, v).real
    nd = kernel_overlap(W_dd, v).real
    ov = kernel_overlap(W_ud, v)
    state, nw = _bloch_from_overlaps(nu, nd, ov)

    om = spinor.omega_L
    dSx = om * I_B.imag / nw          # standard orientation
    dSy = -om * I_B.real / nw
    sx, sy = state.Sx, state.Sy
    s2 = sx * sx + sy * sy
    if s2 < 1e-18:
        raise AzimuthUndefined("azimuth undefined")
    # clock components rotate opposite to the standard azimuth
    sxc, syc = sx, -sy
    dsxc, dsyc = dSx, -dSy
    if abs(sy) < 0.1 * abs(sx):
        return dsyc / sxc
    return (sxc * dsyc - syc * dsxc) / s2


def constant_sz_report(spinor: SpinorPacket):
    """(Sz_tr, Sz_ref) from the channel transmission/reflection coefficients."""
    amp = spinor.up.amplitude
    a2 = amp.values**2
    kg = amp.kgrid
    T_up = float(integrate(a2 * spinor.up.T_k, kg))
    T_dn = float(integrate(a2 * spinor.down.T_k, kg))
    R_up = float(integrate(a2 * spinor.up.R_k, kg))
    R_dn = float(integrate(a2 * spinor.down.R_k, kg))
    if R_up + R_dn <= EPS_R:
        raise DegenerateSubensemble("degenerate reflection subensemble")
    sz_tr = 0.5 * (T_up - T_dn) / (T_up + T_dn)
    sz_ref = 0.5 * (R_up - R_dn) / (R_up + R_dn)
    return sz_tr, sz_ref
