"""Operation handlers shared by the HTTP service and the CLI.

Each handler maps a validated request onto the core library and returns a
response model; the FastAPI routes and the CLI subcommands are both thin
clients of these functions.
"""

from __future__ import annotations

import math

from .. import __version__
from ..circuit import cross_check
from ..config import StackConfig
from ..errors import AptSimError
from ..matching import find_resonances, optimal_load, optimal_load_for_efficiency
from ..netlist import NetlistOptions, export_netlist
from ..solver import frequency_sweep
from ..materials import PRESETS, PROVENANCE
from .models import (
    CheckResponse,
    HealthResponse,
    MaterialModel,
    MaterialsResponse,
    NetlistResponse,
    OptimizeResponse,
    ResonanceModel,
    SweepResponse,
    SweepRowModel,
)

CHECK_THRESHOLD = 1e-6

#: Number of grid frequencies sampled by the cross-check handler.
CHECK_POINTS = 25


def run_sweep(config: StackConfig) -> SweepResponse:
    stack = config.to_stack()
    drive = config.to_drive()
    result = frequency_sweep(stack, config.to_grid(), drive)
    rows = [
        SweepRowModel(
            frequency_hz=row.frequency_hz,
            re_zin_ohm=row.z_in.real,
            im_zin_ohm=row.z_in.imag,
            p_in_w=row.p_in_w,
            p_load_w=row.p_load_w,
            p_backing_w=row.p_backing_w,
            efficiency=row.efficiency,
            error=row.error,
        )
        for row in result.rows
    ]
    resonances = (
        [
            ResonanceModel(frequency_hz=p.frequency_hz, efficiency=p.efficiency)
            for p in find_resonances(result)
        ]
        if len(result) >= 3
        else []
    )
    return SweepResponse(
        rows=rows, resonances=resonances, failed_rows=len(result.failed_rows)
    )


def run_optimize(config: StackConfig) -> OptimizeResponse:
    stack = config.to_stack()
    drive = config.to_drive()
    frequency = config.optimize_frequency()
    omega = 2.0 * math.pi * frequency
    power_opt = optimal_load(stack, omega, drive)
    eta_at_opt = _efficiency_at(stack, omega, drive, power_opt.z_opt)
    eff_opt = optimal_load_for_efficiency(stack, omega, drive)
    return OptimizeResponse(
        frequency_hz=frequency,
        z_opt_re_ohm=power_opt.z_opt.real,
        z_opt_im_ohm=power_opt.z_opt.imag,
        p_max_w=power_opt.p_max,
        efficiency_at_opt=eta_at_opt,
        z_eff_re_ohm=eff_opt.z_load.real,
        z_eff_im_ohm=eff_opt.z_load.imag,
        efficiency_max=eff_opt.efficiency,
        p_at_efficiency_opt_w=eff_opt.p_load,
    )


def _efficiency_at(stack, omega, drive, z_load) -> float:
    from ..solver import power_flow, solve_operating_point

    loaded = drive.with_load(z_load)
    op = solve_operating_point(stack, omega, loaded)
    power = power_flow(op, stack, loaded)
    if power.p_in <= 0.0:
        return 0.0
    return power.p_load / power.p_in


def run_check(config: StackConfig, corrupt_sign: bool = False) -> CheckResponse:
    """Cross-check the two solution paths across the sweep band.

    Samples CHECK_POINTS frequencies of the configured grid; the
    ``corrupt_sign`` flag injects a deliberate polarity fault into the
    network path and exists only for negative-control testing.
    """
    stack = config.to_stack()
    drive = config.to_drive()
    grid = config.to_grid()
    frequencies = grid.frequencies()
    step = max(1, len(frequencies) // CHECK_POINTS)
    worst = 0.0
    checked = 0
    for frequency in frequencies[::step]:
        result = cross_check(
            stack, 2.0 * math.pi * float(frequency), drive, _corrupt_sign=corrupt_sign
        )
        worst = max(worst, float(result.max_deviation))
        checked += 1
    return CheckResponse(
        max_deviation=worst,
        frequencies_checked=checked,
        passed=bool(worst < CHECK_THRESHOLD),
        threshold=CHECK_THRESHOLD,
    )


def run_netlist(
    config: StackConfig,
    f_center_hz: float | None = None,
    lossy_lines: bool = False,
    omit_negative_capacitance: bool = False,
) -> NetlistResponse:
    stack = config.to_stack()
    drive = config.to_drive()
    f_center = f_center_hz if f_center_hz is not None else config.optimize_frequency()
    document = export_netlist(
        stack,
        f_center,
        NetlistOptions(
            lossy_lines=lossy_lines,
            omit_negative_capacitance=omit_negative_capacitance,
        ),
        drive=drive,
    )
    return NetlistResponse(netlist=document.text, f_center_hz=f_center)


def list_materials() -> MaterialsResponse:
    materials = [
        MaterialModel(
            name=p.name,
            kind=p.kind,
            density_kg_m3=p.density,
            speed_m_s=p.sound_speed,
            loss_tangent=p.loss_tangent,
            h_v_per_m=p.h_coupling if p.kind == "piezo" else None,
            permittivity_f_per_m=(
                p.permittivity_clamped if p.kind == "piezo" else None
            ),
            note=p.note,
        )
        for _, p in sorted(PRESETS.items())
    ]
    return MaterialsResponse(provenance=PROVENANCE, materials=materials)


def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)
