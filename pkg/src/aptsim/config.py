"""Stack configuration files: TOML schema, validation, and serialization.

A configuration document describes one complete simulation: the layer
sequence (first and last entries must be piezoelectric), the geometry,
the backings, the electrical source and load, and the sweep grid.  The
pydantic models double as the request schema of the HTTP service.

Example document::

    [geometry]
    area_m2 = 5.0671e-4

    [source]
    voltage_v = 1.0
    resistance_ohm = 0.0
    reactance_ohm = 0.0

    [load]
    resistance_ohm = 50.0
    reactance_ohm = 0.0

    [backing]
    tx_ohm_mech = 0.0
    rx_ohm_mech = 0.0

    [sweep]
    f_min_hz = 1.0e6
    f_max_hz = 1.25e6
    points = 1001
    scale = "linear"

    [[layer]]
    name = "driver"
    kind = "piezo"
    thickness_m = 2.0e-3
    density_kg_m3 = 7500.0
    speed_m_s = 4600.0
    loss_tangent = 0.01
    h_v_per_m = 2.15e9
    permittivity_f_per_m = 7.35e-9

    # ... passive layers: same fields without the piezo constants ...

An optional ``[optimize]`` table may pin the frequency used by the load
optimizer (``frequency_hz``); it defaults to the sweep center.
"""

from __future__ import annotations

import math
import sys
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .layers import Layer, PiezoLayer
from .solver import SweepGrid
from .stack import DriveCondition, Stack


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LayerModel(_StrictModel):
    name: str = ""
    kind: Literal["passive", "piezo"]
    thickness_m: float = Field(gt=0)
    density_kg_m3: float = Field(gt=0)
    speed_m_s: float = Field(gt=0)
    loss_tangent: float = Field(ge=0, default=0.0)
    h_v_per_m: Optional[float] = Field(ge=0, default=None)
    permittivity_f_per_m: Optional[float] = Field(gt=0, default=None)

    @model_validator(mode="after")
    def _piezo_fields(self):
        if self.kind == "piezo":
            if self.h_v_per_m is None or self.permittivity_f_per_m is None:
                raise ValueError(
                    "piezo layers need h_v_per_m and permittivity_f_per_m"
                )
        else:
            if self.h_v_per_m is not None or self.permittivity_f_per_m is not None:
                raise ValueError(
                    "passive layers must not carry piezoelectric constants"
                )
        return self


class SourceModel(_StrictModel):
    voltage_v: float = 1.0
    resistance_ohm: float = Field(ge=0, default=0.0)
    reactance_ohm: float = 0.0


class LoadModel(_StrictModel):
    resistance_ohm: float = Field(ge=0, default=0.0)
    reactance_ohm: float = 0.0


class GeometryModel(_StrictModel):
    area_m2: float = Field(gt=0)


class BackingModel(_StrictModel):
    tx_ohm_mech: float = Field(ge=0, default=0.0)
    rx_ohm_mech: float = Field(ge=0, default=0.0)


class SweepModel(_StrictModel):
    f_min_hz: float = Field(gt=0)
    f_max_hz: float = Field(gt=0)
    points: int = Field(ge=2)
    scale: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _ordered(self):
        if not self.f_min_hz < self.f_max_hz:
            raise ValueError("f_min_hz must be < f_max_hz")
        return self


class OptimizeModel(_StrictModel):
    frequency_hz: Optional[float] = Field(gt=0, default=None)


class StackConfig(_StrictModel):
    """Validated configuration document."""

    geometry: GeometryModel
    source: SourceModel = SourceModel()
    load: LoadModel = LoadModel()
    backing: BackingModel = BackingModel()
    sweep: SweepModel
    optimize: OptimizeModel = OptimizeModel()
    layer: list[LayerModel] = Field(min_length=3)

    @model_validator(mode="after")
    def _edges_are_piezo(self):
        for index in (0, len(self.layer) - 1):
            if self.layer[index].kind != "piezo":
                raise ValueError(
                    f"layer[{index}] must be piezo (driver/receiver)"
                )
        for index, entry in enumerate(self.layer[1:-1], start=1):
            if entry.kind != "passive":
                raise ValueError(f"layer[{index}] must be passive")
        return self

    def to_stack(self) -> Stack:
        layers = []
        for entry in self.layer:
            if entry.kind == "piezo":
                layers.append(
                    PiezoLayer(
                        thickness=entry.thickness_m,
                        density=entry.density_kg_m3,
                        sound_speed=entry.speed_m_s,
                        loss_tangent=entry.loss_tangent,
                        area=self.geometry.area_m2,
                        h_coupling=entry.h_v_per_m,
                        permittivity_clamped=entry.permittivity_f_per_m,
                    )
                )
            else:
                layers.append(
                    Layer(
                        thickness=entry.thickness_m,
                        density=entry.density_kg_m3,
                        sound_speed=entry.speed_m_s,
                        loss_tangent=entry.loss_tangent,
                        area=self.geometry.area_m2,
                    )
                )
        return Stack(
            layers=layers,
            backing_tx=complex(self.backing.tx_ohm_mech),
            backing_rx=complex(self.backing.rx_ohm_mech),
        )

    def to_drive(self) -> DriveCondition:
        return DriveCondition(
            source_voltage=complex(self.source.voltage_v),
            source_impedance=complex(
                self.source.resistance_ohm, self.source.reactance_ohm
            ),
            load_impedance=complex(
                self.load.resistance_ohm, self.load.reactance_ohm
            ),
        )

    def to_grid(self) -> SweepGrid:
        return SweepGrid(
            f_min=self.sweep.f_min_hz,
            f_max=self.sweep.f_max_hz,
            points=self.sweep.points,
            scale=self.sweep.scale,
        )

    def optimize_frequency(self) -> float:
        """Frequency for single-point operations; defaults to sweep center."""
        if self.optimize.frequency_hz is not None:
            return self.optimize.frequency_hz
        if self.sweep.scale == "log":
            return math.sqrt(self.sweep.f_min_hz * self.sweep.f_max_hz)
        return 0.5 * (self.sweep.f_min_hz + self.sweep.f_max_hz)


def _field_path(location: tuple) -> str:
    parts = []
    for item in location:
        if isinstance(item, int):
            parts[-1] += f"[{item}]"
        else:
            parts.append(str(item))
    return ".".join(parts) if parts else "<document>"


def parse_config(text: str) -> StackConfig:
    """Parse and validate a TOML document.

    Raises:
        ConfigError: syntax errors or invalid fields, with the field path
            in the message (e.g. ``layer[2].thickness_m``).
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<document>", f"TOML syntax error: {exc}") from exc
    try:
        return StackConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(_field_path(tuple(first["loc"])), first["msg"]) from exc


def load_config(path: str) -> StackConfig:
    """Read and parse a configuration file.

    Raises:
        ConfigError: unreadable file or invalid content.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path!r}: {exc}") from exc
    return parse_config(text)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dumps_config(config: StackConfig) -> str:
    """Serialize a configuration back to TOML.

    Round-trip guarantee: ``parse_config(dumps_config(cfg)) == cfg``.
    """
    chunks: list[str] = []
    data = config.model_dump()
    layers = data.pop("layer")
    optimize = data.pop("optimize")
    for section in ("geometry", "source", "load", "backing", "sweep"):
        chunks.append(f"[{section}]")
        for key, value in data[section].items():
            chunks.append(f"{key} = {_toml_value(value)}")
        chunks.append("")
    if optimize.get("frequency_hz") is not None:
        chunks.append("[optimize]")
        chunks.append(f"frequency_hz = {_toml_value(optimize['frequency_hz'])}")
        chunks.append("")
    for entry in layers:
        chunks.append("[[layer]]")
        for key, value in entry.items():
            if value is None:
                continue
            chunks.append(f"{key} = {_toml_value(value)}")
        chunks.append("")
    return "\n".join(chunks)
