"""Larmor-clock tunneling times for spin-1/2 packets on symmetric 1D barriers.

The package computes the unique transmission/reflection decomposition of
barrier-scattering states, assembles time-dependent packets from them, and
times the two subensembles with a spin-precession clock: Larmor times (time
domain and spectral), stationary dwell times, and a Wigner phase-time
baseline, plus an independent Crank-Nicolson evolver that verifies the
precession-clock relation without using the decomposition.
"""

__version__ = "0.1.0"

from .model import (
    BarrierSpec,
    FieldSpec,
    SpectralAmplitude,
    build_gaussian_amplitude,
    effective_barrier,
)
from .stationary import scattering_sweep, solve_stationary
from .splitter import decompose
from .packet import assemble, build_family, occupancy_trace, packet_norms
from .spin import bloch, bloch_trace, build_spinor_packet
from .clocks import (
    ClockReport,
    dwell_time_stationary,
    larmor_time_spectral,
    larmor_time_timedomain,
    phase_time_baseline,
)
from .tdse import EvolverConfig, asymptotic_spin_measurement, evolve, gaussian_spinor

__all__ = [
    "BarrierSpec",
    "FieldSpec",
    "SpectralAmplitude",
    "build_gaussian_amplitude",
    "effective_barrier",
    "scattering_sweep",
    "solve_stationary",
    "decompose",
    "assemble",
    "build_family",
    "occupancy_trace",
    "packet_norms",
    "bloch",
    "bloch_trace",
    "build_spinor_packet",
    "ClockReport",
    "dwell_time_stationary",
    "larmor_time_spectral",
    "larmor_time_timedomain",
    "phase_time_baseline",
    "EvolverConfig",
    "asymptotic_spin_measurement",
    "evolve",
    "gaussian_spinor",
    "__version__",
]
