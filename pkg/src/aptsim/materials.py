"""Material presets for quick stack construction.

All numbers are representative handbook values for desk-scale simulation,
not measured data for any particular specimen.  Geometry (thickness, area)
is not a material property and must be supplied by the user.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .layers import Layer, PiezoLayer

PROVENANCE = (
    "Representative handbook values, not measured data; "
    "adjust to your own materials before trusting absolute numbers."
)


@dataclass(frozen=True)
class MaterialPreset:
    name: str
    kind: str  # "passive" or "piezo"
    density: float  # kg/m3
    sound_speed: float  # m/s, longitudinal
    loss_tangent: float
    h_coupling: float = 0.0  # V/m, piezo only
    permittivity_clamped: float = 0.0  # F/m, piezo only
    note: str = ""

    def layer(self, thickness: float, area: float) -> Layer:
        """Instantiate the preset with the given geometry."""
        if self.kind == "piezo":
            return PiezoLayer(
                thickness=thickness,
                density=self.density,
                sound_speed=self.sound_speed,
                loss_tangent=self.loss_tangent,
                area=area,
                h_coupling=self.h_coupling,
                permittivity_clamped=self.permittivity_clamped,
            )
        return Layer(
            thickness=thickness,
            density=self.density,
            sound_speed=self.sound_speed,
            loss_tangent=self.loss_tangent,
            area=area,
        )


PRESETS: dict[str, MaterialPreset] = {
    "steel": MaterialPreset(
        name="steel",
        kind="passive",
        density=7850.0,
        sound_speed=5900.0,
        loss_tangent=5e-4,
        note="structural steel, longitudinal mode",
    ),
    "aluminum": MaterialPreset(
        name="aluminum",
        kind="passive",
        density=2700.0,
        sound_speed=6320.0,
        loss_tangent=1e-4,
        note="wrought aluminum alloy",
    ),
    "glue": MaterialPreset(
        name="glue",
        kind="passive",
        density=1000.0,
        sound_speed=1500.0,
        loss_tangent=5e-2,
        note="water-like acoustic couplant layer",
    ),
    "pzt": MaterialPreset(
        name="pzt",
        kind="piezo",
        density=7500.0,
        sound_speed=4600.0,
        loss_tangent=1e-2,
        h_coupling=2.15e9,
        permittivity_clamped=7.35e-9,
        note="PZT-class piezoceramic, thickness mode",
    ),
}


def preset(name: str) -> MaterialPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise DomainError(
            f"unknown material {name!r}; known: {sorted(PRESETS)}"
        ) from None
