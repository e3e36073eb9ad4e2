"""Shared fixtures: one small, fast scattering family reused across tests."""
import numpy as np
import pytest

from larmorlab.model import BarrierSpec, FieldSpec, build_gaussian_amplitude
from larmorlab.packet import build_family
from larmorlab.spin import build_spinor_packet

# small problem: k0 well above the spectrum floor, barrier close in, light grids
K0 = 1.2
L0 = 5.0
A, B = 30.0, 31.0
V0 = 2.0


@pytest.fixture(scope="session")
def small_spec():
    return BarrierSpec.rectangular(A, B, V0)


@pytest.fixture(scope="session")
def small_amplitude():
    return build_gaussian_amplitude(K0, L0, truncation=5.0, nk=241)


@pytest.fixture(scope="session")
def small_family(small_spec, small_amplitude):
    return build_family(small_spec, small_amplitude, x_pad=30.0, nx=1501, nb=129)


@pytest.fixture(scope="session")
def small_spinor(small_spec, small_amplitude):
    return build_spinor_packet(
        small_spec, FieldSpec(1e-3), small_amplitude, x_pad=30.0, nx=1501, nb=129
    )
