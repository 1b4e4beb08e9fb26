"""Layer data types for the one-dimensional layered-stack model.

A stack is a sequence of plane-parallel slabs traversed by a longitudinal
plane wave at normal incidence.  Passive slabs are fully described by
thickness, density, sound speed, a loss tangent, and the common
cross-section area.  Piezoelectric slabs additionally carry the
thickness-mode coupling constant h and the clamped permittivity.

All quantities are strict SI.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class Layer:
    """A passive acoustic slab.

    Attributes:
        thickness: slab thickness along the propagation axis (m, > 0)
        density: mass density (kg/m3, > 0)
        sound_speed: longitudinal sound speed (m/s, > 0)
        loss_tangent: dimensionless loss tangent (>= 0; 0 means lossless)
        area: cross-section area (m2, > 0); uniform across a stack
    """

    thickness: float
    density: float
    sound_speed: float
    loss_tangent: float = 0.0
    area: float = 1.0

    def __post_init__(self):
        for field in ("thickness", "density", "sound_speed", "area"):
            value = getattr(self, field)
            if not value > 0.0:
                raise DomainError(f"{field} must be > 0, got {value!r}")
        if self.loss_tangent < 0.0:
            raise DomainError(
                f"loss_tangent must be >= 0, got {self.loss_tangent!r}"
            )


@dataclass(frozen=True)
class PiezoLayer(Layer):
    """A piezoelectric slab operated in thickness mode.

    Extends :class:`Layer` with the electromechanical constants needed by
    the Mason description of a thickness-mode plate:

    Attributes:
        h_coupling: piezoelectric constant h (V/m, >= 0; 0 decouples the
            electrical port and is useful in tests)
        permittivity_clamped: clamped (constant-strain) permittivity (F/m, > 0)

    The derived clamped capacitance ``permittivity_clamped * area / thickness``
    is finite and positive for every valid instance.
    """

    h_coupling: float = 0.0
    permittivity_clamped: float = 1.0e-8

    def __post_init__(self):
        super().__post_init__()
        if self.h_coupling < 0.0:
            raise DomainError(
                f"h_coupling must be >= 0, got {self.h_coupling!r}"
            )
        if not self.permittivity_clamped > 0.0:
            raise DomainError(
                "permittivity_clamped must be > 0, got "
                f"{self.permittivity_clamped!r}"
            )
