"""Figure rendering for the report path.

Each scenario gets one or two PNGs rendered next to its CSV output.  The
plots are diagnostic companions to the delimited data, not publication
artwork; everything uses the Agg backend so runs work headless.
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _save(fig, outdir, name):
    path = os.path.join(outdir, name)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_stationary(figures, outdir):
    arr = figures["sweep"]
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    ax1.plot(arr[:, 0], arr[:, 1], label="T")
    ax1.plot(arr[:, 0], arr[:, 2], label="R")
    ax1.set_ylabel("coefficient")
    ax1.legend()
    ax2.plot(arr[:, 0], arr[:, 3])
    ax2.set_xlabel("k")
    ax2.set_ylabel("arg A_out")
    fig.tight_layout()
    return [_save(fig, outdir, "sweep.png")]


def plot_decompose(figures, outdir):
    x = figures["xgrid"]
    spec = figures["spec"]
    fig, ax = plt.subplots(figsize=(7, 4))
    for key, label in (("full", "|psi_full|^2"), ("tr", "|psi_tr|^2"), ("ref", "|psi_ref|^2")):
        ax.plot(x, np.abs(figures[key]) ** 2, label=label)
    ax.axvspan(spec.a, spec.b, color="0.85")
    ax.axvline(spec.x_c, color="0.5", linestyle=":")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.legend()
    fig.tight_layout()
    return [_save(fig, outdir, "decompose.png")]


def plot_packet(figures, outdir):
    trace = figures["trace"]
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    ax1.plot(trace.tgrid, trace.P_tr, label="P_tr")
    ax1.plot(trace.tgrid, trace.P_ref, label="P_ref")
    ax1.set_ylabel("barrier occupancy")
    ax1.legend()
    ax2.plot(trace.tgrid, trace.N_tr - trace.N_tr[0], label="N_tr drift")
    ax2.plot(trace.tgrid, trace.N_ref - trace.N_ref[0], label="N_ref drift")
    ax2.set_xlabel("t")
    ax2.set_ylabel("norm drift")
    ax2.legend()
    fig.tight_layout()
    return [_save(fig, outdir, "occupancy.png")]


def plot_larmor(figures, outdir):
    report = figures["report"]
    fig, ax = plt.subplots(figsize=(7, 4))
    labels = ["tau_L_tr", "tau_L_tr_spectral", "tau_dwell_tr", "tau_phase"]
    values = [
        report.tau_L_tr,
        report.tau_L_tr_spectral,
        report.tau_dwell_tr,
        report.tau_phase,
    ]
    if report.tau_L_ref is not None:
        labels += ["tau_L_ref", "tau_dwell_ref"]
        values += [report.tau_L_ref, report.tau_dwell_ref]
    ax.bar(range(len(values)), values)
    ax.set_xticks(range(len(values)), labels, rotation=30, ha="right")
    ax.set_ylabel("time")
    fig.tight_layout()
    paths = [_save(fig, outdir, "clocks.png")]
    if "traces" in figures:
        paths += plot_spintrace(figures, outdir)
    return paths


def plot_spintrace(figures, outdir):
    traces = figures["traces"]
    t = figures["tgrid"]
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    for which in ("tr", "ref", "full"):
        ax1.plot(t, traces[which]["phi"], label=f"phi_{which}")
        ax2.plot(t, traces[which]["Sz"], label=f"Sz_{which}")
    ax1.set_ylabel("azimuth")
    ax1.legend()
    ax2.set_xlabel("t")
    ax2.set_ylabel("Sz")
    ax2.legend()
    fig.tight_layout()
    return [_save(fig, outdir, "spin_trace.png")]


def plot_hartman(figures, outdir):
    arr = figures["sweep"]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(arr[:, 1], arr[:, 2], "o-", label="tau_dwell_tr")
    ax.plot(arr[:, 1], arr[:, 3], "s-", label="tau_phase")
    ax.set_xlabel("kappa * d")
    ax.set_ylabel("time")
    ax.legend()
    fig.tight_layout()
    return [_save(fig, outdir, "hartman.png")]


def plot_verify(figures, outdir):
    rows = figures["rows"]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(rows[:, 0], rows[:, 2], "o", label="phi_tr_inf (evolved)")
    ax.plot(rows[:, 0], rows[:, 3], "x", label="phi_tr_0 + omega*tau_L")
    ax.plot(rows[:, 0], rows[:, 6], "s", label="phi_ref_inf (evolved)")
    ax.plot(rows[:, 0], rows[:, 7], "+", label="phi_ref_0 + omega*tau_L")
    ax.set_xlabel("omega_L")
    ax.set_ylabel("azimuth")
    ax.legend()
    fig.tight_layout()
    return [_save(fig, outdir, "verify.png")]


def plot_probe(figures, outdir):
    rows = figures["rows"]
    fig, ax = plt.subplots(figsize=(7, 4))
    labels = [f"[{lo:g}, {hi:g}]" for lo, hi in rows[:, :2]]
    width = 0.35
    idx = np.arange(rows.shape[0])
    ax.bar(idx - width / 2, rows[:, 2], width, label="phi_tr_inf")
    ax.bar(idx + width / 2, rows[:, 3], width, label="phi_ref_inf")
    ax.set_xticks(idx, labels)
    ax.set_xlabel("field region")
    ax.set_ylabel("azimuth")
    ax.legend()
    fig.tight_layout()
    return [_save(fig, outdir, "probe.png")]


RENDERERS = {
    "stationary": plot_stationary,
    "decompose": plot_decompose,
    "packet": plot_packet,
    "larmor": plot_larmor,
    "hartman": plot_hartman,
    "verify": plot_verify,
    "probe": plot_probe,
}


def render(scenario, figures, outdir):
    renderer = RENDERERS.get(scenario)
    if renderer is None or not figures:
        return []
    return renderer(figures, outdir)
