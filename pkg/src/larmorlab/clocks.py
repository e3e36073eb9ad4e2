"""Larmor, dwell and phase times for the transmitted and reflected subensembles.

Three routes are computed and cross-checked:

* time domain: tau = (1/C) * integral over t of the barrier-region occupancy
  of the subensemble, with C the packet channel coefficient;
* spectral: the same quantity after carrying out the time integral
  analytically, tau = I / C with
  I = integral dk (A(k)/k) * integral dx |psi_sub(x,k)|^2 over the region
  (the A(-k) counter-term vanishes on the default positive-k grids);
* stationary dwell: tau = (1/(k0*C(k0))) * integral dx |psi_sub(x,k0)|^2,
  the limit of both for delta-peaked spectra.

A Wigner phase-time baseline is included for the opaque-barrier contrast:
it saturates with barrier width while the transmission dwell/Larmor time
keeps growing.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import BarrierSpec, SpectralAmplitude, integrate, make_barrier_grid, trapezoid_weights
from .packet import EPS_OCC, EPS_R, OccupancyTrace, PacketFamily
from .spin import SpinorPacket, bloch_trace
from .splitter import Decomposition, decompose
from .stationary import solve_stationary


class DegenerateChannel(Exception):
    pass


class WindowTooShort(Exception):
    pass


@dataclass
class ClockReport:
    tau_L_tr: float
    tau_L_ref: float | None
    tau_L_tr_spectral: float
    tau_L_ref_spectral: float | None
    tau_dwell_tr: float
    tau_dwell_ref: float | None
    delta_phi_tr: float
    delta_phi_ref: float | None
    tau_phase: float
    tau_phase_delay: float
    omega_L: float
    T_packet: float
    R_packet: float
    diagnostics: dict = field(default_factory=dict)


def larmor_time_timedomain(
    trace: OccupancyTrace, T_packet: float, R_packet: float, eps: float = EPS_OCC
):
    """(tau_L_tr, tau_L_ref) by time quadrature of the occupancy trace.

    tau_L_ref is None when the reflection channel is degenerate.  ``eps``
    bounds the tolerated endpoint occupancy relative to the peak and should
    match the threshold used to pick the window.
    """
    peak = max(float(trace.P_tr.max()), float(trace.P_ref.max()))
    for P in (trace.P_tr, trace.P_ref):
        if max(P[0], P[-1]) > eps * peak:
            raise WindowTooShort("window too short: endpoint occupancy not negligible")
    tau_tr = float(integrate(trace.P_tr, trace.tgrid)) / T_packet
    if R_packet <= EPS_R:
        return tau_tr, None
    tau_ref = float(integrate(trace.P_ref, trace.tgrid)) / R_packet
    return tau_tr, tau_ref


def larmor_time_spectral(family: PacketFamily, T_packet: float, R_packet: float):
    """(tau_tr, tau_ref) from the per-wavenumber barrier-region integrals."""
    amp = family.amplitude
    kg = amp.kgrid
    a2k = amp.values**2 / kg
    wb = trapezoid_weights(family.bgrid)
    g_tr = wb @ (np.abs(family.Mb_tr) ** 2)  # per-k integral over [a, b]
    I_tr = float(integrate(a2k * g_tr, kg))
    tau_tr = I_tr / T_packet
    if R_packet <= EPS_R:
        return tau_tr, None
    ibc = family.ib_c
    Mb_ref = family.Mb_full[: ibc + 1] - family.Mb_tr[: ibc + 1]
    wbl = trapezoid_weights(family.bgrid[: ibc + 1])
    g_ref = wbl @ (np.abs(Mb_ref) ** 2)  # per-k integral over [a, x_c]
    I_ref = float(integrate(a2k * g_ref, kg))
    return tau_tr, I_ref / R_packet


def dwell_time_stationary(spec: BarrierSpec, k0: float, nb: int = 2001):
    """(tau_dwell_tr, tau_dwell_ref) at wavenumber k0 on a fine barrier grid."""
    if k0 <= 0:
        raise ValueError("k0 must be positive")
    bgrid = make_barrier_grid(spec, nb)
    state = solve_stationary(spec, k0, bgrid)
    dec = decompose(state, spec)
    if state.T <= 0.0:
        raise DegenerateChannel("transmission channel degenerate at k0")
    tau_tr = float(
        integrate(np.abs(dec.psi_tr.values) ** 2, bgrid) / (k0 * state.T)
    )
    if state.R <= EPS_R:
        return tau_tr, None
    ibc = len(bgrid) // 2
    tau_ref = float(
        integrate(np.abs(dec.psi_ref.values[: ibc + 1]) ** 2, bgrid[: ibc + 1])
        / (k0 * state.R)
    )
    return tau_tr, tau_ref


def phase_time_baseline(sweep, k0: float, d: float):
    """(tau_phase, tau_phase_delay) from an unwrapped transmission-phase sweep.

    ``sweep`` is the row list from scattering_sweep.  tau_phase is the raw
    traversal-time convention d(arg A_out)/dE + d/k0; tau_phase_delay is the
    bare energy derivative (barrier-referenced delay).
    """
    rows = np.asarray(sweep, dtype=float)
    if rows.shape[0] < 5:
        raise ValueError("sweep must bracket k0 with at least 5 points")
    k = rows[:, 0]
    phase = rows[:, 3]
    if np.any(np.abs(np.diff(phase)) > 0.5 * np.pi):
        raise ValueError("refine k-grid")
    if not (k[0] < k0 < k[-1]):
        raise ValueError("sweep must bracket k0")
    E = 0.5 * k**2
    dphi_dE = np.gradient(phase, E)
    delay = float(np.interp(0.5 * k0**2, E, dphi_dE))
    return delay + d / k0, delay


def rotation_angles(spinor: SpinorPacket, t_start: float, t_end: float, nt: int = 129):
    """(delta_phi_tr, delta_phi_ref): unwrapped azimuth change over the window."""
    tgrid = np.linspace(t_start, t_end, nt)
    tr = bloch_trace(spinor, "tr", tgrid)
    d_tr = float(tr["phi"][-1] - tr["phi"][0])
    amp = spinor.up.amplitude
    R_w = float(integrate(amp.values**2 * spinor.up.R_k, amp.kgrid))
    if R_w <= EPS_R:
        return d_tr, None
    ref = bloch_trace(spinor, "ref", tgrid)
    return d_tr, float(ref["phi"][-1] - ref["phi"][0])


def richardson_extrapolate(omegas, taus):
    """Extrapolate tau(omega) -> omega = 0 from a geometric omega sequence.

    Estimates the observed convergence order from the last three values and
    applies one Richardson step on the two finest.  Returns (tau0, order).
    """
    om = np.asarray(omegas, dtype=float)
    ta = np.asarray(taus, dtype=float)
    idx = np.argsort(om)[::-1]  # coarsest first
    om, ta = om[idx], ta[idx]
    if om.size < 2:
        return float(ta[-1]), float("nan")
    r = om[-2] / om[-1]
    if om.size >= 3:
        num = ta[-3] - ta[-2]
        den = ta[-2] - ta[-1]
        if den != 0.0 and num / den > 0:
            p = float(np.log(num / den) / np.log(om[-3] / om[-2]))
        else:
            p = 2.0
    else:
        p = 2.0
    tau0 = ta[-1] + (ta[-1] - ta[-2]) / (r**p - 1.0)
    return float(tau0), p
