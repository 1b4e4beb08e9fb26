"""Property-based checks of the per-layer algebraic identities."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aptsim import (
    Layer,
    chain_matrix,
    characteristic_impedance,
    passive_layer_matrix,
    wavenumber,
)

# Phases clear of resonances and with bounded single-pass attenuation so
# the identities are evaluable in double precision (the cancellation in
# x11**2 - x12**2 grows as 1/sin^2 near resonance and as exp(2 Im k d)
# for strong loss).
phases = st.floats(min_value=0.2, max_value=12.0).filter(
    lambda t: abs(t - math.pi * round(t / math.pi)) > 0.08
)
impedances = st.floats(min_value=1e-2, max_value=1e8)
losses = st.one_of(st.just(0.0), st.floats(min_value=1e-5, max_value=0.1))


def layer_from(theta: float, z: float, eta: float) -> Layer:
    # k*d = theta at omega = 1 rad/s; S*rho*c = z.
    return Layer(thickness=theta, density=z, sound_speed=1.0, loss_tangent=eta, area=1.0)


@given(theta=phases, z=impedances, eta=losses)
@settings(max_examples=300, deadline=None)
def test_impedance_identity(theta, z, eta):
    layer = layer_from(theta, z, eta)
    m = passive_layer_matrix(layer, 1.0)
    z_char = characteristic_impedance(layer)
    assert abs(m.x11**2 - m.x12**2 - z_char**2) <= 1e-12 * abs(z_char**2)


@given(theta=st.floats(min_value=1e-3, max_value=30.0), z=impedances, eta=losses)
@settings(max_examples=300, deadline=None)
def test_chain_determinant(theta, z, eta):
    m = chain_matrix(layer_from(theta, z, eta), 1.0)
    assert abs(np.linalg.det(m) - 1.0) <= 1e-12


@given(theta=phases, z=impedances, eta=losses)
@settings(max_examples=200, deadline=None)
def test_chain_and_impedance_forms_agree(theta, z, eta):
    layer = layer_from(theta, z, eta)
    m = chain_matrix(layer, 1.0)
    imp = passive_layer_matrix(layer, 1.0)
    assert abs(m[0, 0] / m[1, 0] - imp.x11) <= 1e-10 * abs(imp.x11)
    assert abs(1.0 / m[1, 0] - imp.x12) <= 1e-10 * abs(imp.x12)


@given(theta=phases, z=impedances)
@settings(max_examples=200, deadline=None)
def test_lossless_entries_are_reactive(theta, z):
    m = passive_layer_matrix(layer_from(theta, z, 0.0), 1.0)
    assert abs(m.x11.real) <= 1e-12 * abs(m.x11.imag)
    assert abs(m.x12.real) <= 1e-12 * abs(m.x12.imag)


@given(
    scale=st.floats(min_value=1e-3, max_value=1e3),
    omega=st.floats(min_value=1.0, max_value=1e8),
    eta=losses,
)
@settings(max_examples=200, deadline=None)
def test_wavenumber_homogeneity(scale, omega, eta):
    layer = Layer(
        thickness=1.0, density=1.0, sound_speed=1500.0, loss_tangent=eta
    )
    lhs = wavenumber(scale * omega, layer)
    rhs = scale * wavenumber(omega, layer)
    assert cmath.isclose(lhs, rhs, rel_tol=1e-12)
