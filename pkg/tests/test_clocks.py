import numpy as np
import pytest

from larmorlab.clocks import (
    WindowTooShort,
    dwell_time_stationary,
    larmor_time_spectral,
    larmor_time_timedomain,
    phase_time_baseline,
    richardson_extrapolate,
    rotation_angles,
)
from larmorlab.model import BarrierSpec
from larmorlab.packet import interaction_tgrid, occupancy_trace, packet_norms
from larmorlab.stationary import scattering_sweep

from conftest import K0


# short packets have a higher spectrum-truncation sidelobe floor; the
# window threshold must sit above it (see the packet module docs)
SMALL_EPS = 1e-6


@pytest.fixture(scope="module")
def small_times(small_family):
    T_p, R_p = packet_norms(small_family)
    tg = interaction_tgrid(small_family, eps=SMALL_EPS)
    trace = occupancy_trace(small_family, tg)
    return small_family, T_p, R_p, trace


def test_timedomain_matches_spectral(small_times):
    fam, T_p, R_p, trace = small_times
    td_tr, td_ref = larmor_time_timedomain(trace, T_p, R_p, eps=SMALL_EPS)
    sp_tr, sp_ref = larmor_time_spectral(fam, T_p, R_p)
    assert td_tr == pytest.approx(sp_tr, rel=1e-4)
    assert td_ref == pytest.approx(sp_ref, rel=1e-4)


def test_larmor_near_dwell_for_narrow_spectrum(small_times):
    fam, T_p, R_p, _ = small_times
    sp_tr, sp_ref = larmor_time_spectral(fam, T_p, R_p)
    dw_tr, dw_ref = dwell_time_stationary(fam.spec, K0)
    # l0 = 5 is only moderately monochromatic; percent-level agreement
    assert sp_tr == pytest.approx(dw_tr, rel=2e-2)
    assert sp_ref == pytest.approx(dw_ref, rel=2e-2)


def test_dwell_regression_default_barrier():
    # pinned first-run value for V0=2, E=1, d=1 (nb=2001)
    spec = BarrierSpec.rectangular(100.0, 101.0, 2.0)
    dw_tr, dw_ref = dwell_time_stationary(spec, np.sqrt(2.0))
    assert dw_tr == pytest.approx(0.9675335723, abs=1e-8)
    assert dw_ref == pytest.approx(0.1195614521, abs=1e-8)


def test_dwell_position_independent():
    k = np.sqrt(2.0)
    d1 = dwell_time_stationary(BarrierSpec.rectangular(100.0, 101.0, 2.0), k)
    d2 = dwell_time_stationary(BarrierSpec.rectangular(7.0, 8.0, 2.0), k)
    assert d1[0] == pytest.approx(d2[0], rel=1e-12)
    assert d1[1] == pytest.approx(d2[1], rel=1e-12)


def test_window_too_short_raises(small_times):
    fam, T_p, R_p, _ = small_times
    bad = occupancy_trace(fam, np.linspace(10.0, 40.0, 101), norm_samples=2)
    with pytest.raises(WindowTooShort):
        larmor_time_timedomain(bad, T_p, R_p)


def test_free_particle_phase_time():
    spec = BarrierSpec.rectangular(5.0, 6.5, 0.0)
    k0 = 1.3
    sweep = scattering_sweep(spec, np.linspace(0.9 * k0, 1.1 * k0, 41))
    tau, delay = phase_time_baseline(sweep, k0, spec.d)
    assert delay == pytest.approx(0.0, abs=1e-10)
    assert tau == pytest.approx(spec.d / k0, abs=1e-10)


def test_phase_time_requires_bracketing():
    spec = BarrierSpec.rectangular(5.0, 6.0, 2.0)
    sweep = scattering_sweep(spec, np.linspace(1.0, 1.2, 21))
    with pytest.raises(ValueError):
        phase_time_baseline(sweep, 2.0, spec.d)


def test_rotation_angles_signs(small_spinor):
    tg = interaction_tgrid(small_spinor.up, eps=SMALL_EPS)
    d_tr, d_ref = rotation_angles(small_spinor, tg[0], tg[-1])
    assert d_tr > 0.0
    assert d_ref > 0.0
    # both rotations are bounded by the total dwell scale
    om = small_spinor.omega_L
    assert d_tr < 5.0 * om
    assert d_ref < 5.0 * om


class TestRichardson:
    def test_recovers_quadratic_limit(self):
        omegas = [4e-3, 2e-3, 1e-3]
        taus = [0.7 + 3.0 * w**2 for w in omegas]
        tau0, order = richardson_extrapolate(omegas, taus)
        assert tau0 == pytest.approx(0.7, abs=1e-12)
        assert order == pytest.approx(2.0, abs=1e-6)

    def test_two_points_assume_second_order(self):
        tau0, order = richardson_extrapolate([2e-3, 1e-3], [0.7 + 4e-6, 0.7 + 1e-6])
        assert tau0 == pytest.approx(0.7, abs=1e-12)

    def test_single_point_passthrough(self):
        tau0, order = richardson_extrapolate([1e-3], [0.5])
        assert tau0 == 0.5
        assert np.isnan(order)
