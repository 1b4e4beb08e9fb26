"""Request/response models of the HTTP service.

Requests embed the same :class:`~aptsim.config.StackConfig` schema that
the TOML files use, so a config document and an API call describe a run
identically.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from ..config import StackConfig


class SweepRequest(BaseModel):
    config: StackConfig


class SweepRowModel(BaseModel):
    frequency_hz: float
    re_zin_ohm: float
    im_zin_ohm: float
    p_in_w: float
    p_load_w: float
    p_backing_w: float
    efficiency: float
    error: Optional[str] = None


class ResonanceModel(BaseModel):
    frequency_hz: float
    efficiency: float


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    resonances: list[ResonanceModel]
    failed_rows: int


class OptimizeRequest(BaseModel):
    config: StackConfig


class OptimizeResponse(BaseModel):
    frequency_hz: float
    z_opt_re_ohm: float
    z_opt_im_ohm: float
    p_max_w: float
    efficiency_at_opt: float
    z_eff_re_ohm: float
    z_eff_im_ohm: float
    efficiency_max: float
    p_at_efficiency_opt_w: float


class CheckRequest(BaseModel):
    config: StackConfig


class CheckResponse(BaseModel):
    max_deviation: float
    frequencies_checked: int
    passed: bool
    threshold: float


class NetlistRequest(BaseModel):
    config: StackConfig
    f_center_hz: Optional[float] = Field(gt=0, default=None)
    lossy_lines: bool = False
    omit_negative_capacitance: bool = False


class NetlistResponse(BaseModel):
    netlist: str
    f_center_hz: float


class MaterialModel(BaseModel):
    name: str
    kind: str
    density_kg_m3: float
    speed_m_s: float
    loss_tangent: float
    h_v_per_m: Optional[float] = None
    permittivity_f_per_m: Optional[float] = None
    note: str


class MaterialsResponse(BaseModel):
    provenance: str
    materials: list[MaterialModel]


class HealthResponse(BaseModel):
    status: str
    version: str
