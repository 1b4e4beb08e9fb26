"""Per-layer wave physics: wavenumber, impedance, and two-port matrices.

Conventions (exp(+j*omega*t) time dependence):

* Loss enters through the complex sound speed ``c~ = c / (1 - j*eta/2)``,
  so the complex wavenumber is ``k~ = omega/c~ = (omega/c) * (1 - j*eta/2)``.
  Its imaginary part is <= 0, i.e. waves decay along +x; eta = 0 recovers
  the lossless case exactly.
* The characteristic mechanical impedance of a slab is ``Z~ = S*rho*c~``
  (force over velocity, already scaled by the cross-section area S).
* A slab of thickness d is a reciprocal symmetric two-port in the force /
  velocity variables of its two faces, with both face velocities directed
  into the slab:

      F1 = x11*u1 + x12*u2        x11 = Z~ / (j*tan(k~ d))
      F2 = x12*u1 + x11*u2        x12 = Z~ / (j*sin(k~ d))

  These entries satisfy the identity x11**2 - x12**2 = Z~**2 and are purely
  imaginary (reactive) for a lossless slab.
* The chain (ABCD) form maps (F, v) at the right face to the left face,
  with v measured in the propagation direction at both faces:

      [F_l]   [ cos(k~ d)        j*Z~*sin(k~ d) ] [F_r]
      [v_l] = [ j*sin(k~ d)/Z~   cos(k~ d)      ] [v_r]

  Its determinant is exactly 1 and every entry is an entire function of
  frequency, so it stays well behaved at thickness resonances where the
  impedance entries diverge.

The piezoelectric three-port adds an electrical column to the mechanical
two-port: x13 = h/(j*omega) and x33 = 1/(j*omega*C0) with the clamped
capacitance C0 = eps_S*S/d.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, LayerResonanceSingularity
from .layers import Layer, PiezoLayer

#: Lossless impedance-matrix entries are rejected when k*d is closer than
#: this to a multiple of pi.
RESONANCE_TOLERANCE = 1e-9


def complex_sound_speed(layer: Layer) -> complex:
    """Complex sound speed ``c / (1 - j*eta/2)`` carrying the loss tangent."""
    return layer.sound_speed / (1.0 - 0.5j * layer.loss_tangent)


def wavenumber(omega: float, layer: Layer) -> complex:
    """Complex wavenumber ``omega / c~`` of a slab (rad/m).

    Equals ``(omega/c) * (1 - j*eta/2)``; the imaginary part is <= 0
    (decaying-wave convention) and vanishes for a lossless slab.

    Raises:
        DomainError: if omega is not positive.
    """
    if not omega > 0.0:
        raise DomainError(f"omega must be > 0, got {omega!r}")
    return (omega / layer.sound_speed) * (1.0 - 0.5j * layer.loss_tangent)


def characteristic_impedance(layer: Layer) -> complex:
    """Characteristic mechanical impedance ``S * rho * c~`` (N*s/m).

    Real and positive for a lossless slab; carries a small positive
    imaginary part when the loss tangent is nonzero.
    """
    return layer.area * layer.density * complex_sound_speed(layer)


def propagation_phase(layer: Layer, omega: float) -> complex:
    """One-way complex phase ``k~ * d`` accumulated across the slab."""
    return wavenumber(omega, layer) * layer.thickness


def _check_resonance(layer: Layer, theta: complex) -> None:
    if layer.loss_tangent != 0.0:
        return
    distance = abs(theta.real - math.pi * round(theta.real / math.pi))
    if distance < RESONANCE_TOLERANCE:
        raise LayerResonanceSingularity(
            f"k*d = {theta.real!r} is within {RESONANCE_TOLERANCE} of a "
            "multiple of pi; impedance entries diverge there. Use "
            "chain_matrix instead."
        )


@dataclass(frozen=True)
class TwoPortImpedanceMatrix:
    """Symmetric impedance matrix [[x11, x12], [x12, x11]] of a slab."""

    x11: complex
    x12: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.x11, self.x12], [self.x12, self.x11]])


@dataclass(frozen=True)
class PiezoBlockMatrix:
    """3x3 block of a thickness-mode piezoelectric plate.

    Rows/columns are ordered (left face, right face, electrical port) with
    interface velocities measured in the propagation direction, which puts
    the coupling entries into the sign pattern

        [[x11,  x12,  x13],
         [x12,  x11, -x13],
         [x13, -x13,  x33]]

    The mechanical 2x2 sub-block equals the passive two-port of the plate.
    """

    x11: complex
    x12: complex
    x13: complex
    x33: complex

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                [self.x11, self.x12, self.x13],
                [self.x12, self.x11, -self.x13],
                [self.x13, -self.x13, self.x33],
            ]
        )

    @property
    def mechanical(self) -> TwoPortImpedanceMatrix:
        return TwoPortImpedanceMatrix(self.x11, self.x12)


def passive_layer_matrix(layer: Layer, omega: float) -> TwoPortImpedanceMatrix:
    """Impedance two-port of a passive slab.

    Returns x11 = Z~/(j*tan(k~ d)) and x12 = Z~/(j*sin(k~ d)).  The entries
    satisfy x11**2 - x12**2 = Z~**2 and are purely imaginary for a lossless
    slab.

    Raises:
        LayerResonanceSingularity: lossless k*d within 1e-9 of n*pi, where
            tan or sin vanishes; callers that must survive resonances should
            use :func:`chain_matrix`.
    """
    theta = propagation_phase(layer, omega)
    _check_resonance(layer, theta)
    z = characteristic_impedance(layer)
    x12 = z / (1j * cmath.sin(theta))
    x11 = x12 * cmath.cos(theta)
    return TwoPortImpedanceMatrix(x11=x11, x12=x12)


def chain_matrix(layer: Layer, omega: float) -> np.ndarray:
    """Chain (ABCD) matrix of a slab; entire in frequency, det = 1.

    Consistent with :func:`passive_layer_matrix` through x11 = A/C and
    x12 = 1/C wherever both forms are defined.
    """
    theta = propagation_phase(layer, omega)
    z = characteristic_impedance(layer)
    c = cmath.cos(theta)
    s = cmath.sin(theta)
    return np.array([[c, 1j * z * s], [1j * s / z, c]])


def piezo_clamped_capacitance(piezo: PiezoLayer) -> float:
    """Clamped (constant-strain) capacitance ``eps_S * S / d`` in farads."""
    return piezo.permittivity_clamped * piezo.area / piezo.thickness


def piezo_block_matrix(piezo: PiezoLayer, omega: float) -> PiezoBlockMatrix:
    """3x3 impedance block of a thickness-mode piezoelectric plate.

    The mechanical sub-block is the passive two-port of the plate; the
    electrical entries are x13 = h/(j*omega) and x33 = 1/(j*omega*C0).
    Setting h = 0 zeroes x13 and the block splits into a passive slab plus
    a lone clamped capacitance.

    Raises:
        LayerResonanceSingularity: propagated from the mechanical sub-block.
    """
    mech = passive_layer_matrix(piezo, omega)
    c0 = piezo_clamped_capacitance(piezo)
    x13 = piezo.h_coupling / (1j * omega)
    x33 = 1.0 / (1j * omega * c0)
    return PiezoBlockMatrix(x11=mech.x11, x12=mech.x12, x13=x13, x33=x33)
