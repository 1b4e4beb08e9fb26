"""Receiver load optimization and quarter-wave matching-layer design.

The stack is linear, so its receiver port is exactly a Thevenin source:
an open-circuit voltage behind an output impedance.  Two documented probe
solves recover the pair, after which the maximum-power load is the complex
conjugate of the output impedance with ``p_max = |v_th|^2 / (8 Re z_th)``.

Power delivery and efficiency peak at different loads whenever the source
impedance or the backings dissipate; :func:`optimal_load_for_efficiency`
finds the efficiency optimum by a deterministic phase scan with
golden-section refinement of the load magnitude.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonDissipativeOutput
from .layers import Layer
from .acoustics import chain_matrix
from .solver import (
    SweepResult,
    power_flow,
    solve_operating_point,
)
from .stack import DriveCondition, Stack

#: Probe load (ohm) standing in for an electrical open circuit.
OPEN_LOAD_OHM = 1e12

#: Finite probe load (ohm) for the output-impedance measurement.
PROBE_LOAD_OHM = 1e3


@dataclass(frozen=True)
class TheveninEquivalent:
    """Receiver output port summarized as v_th behind z_th."""

    v_th: complex
    z_th: complex


def thevenin_at_output(
    stack: Stack, omega: float, drive: DriveCondition
) -> TheveninEquivalent:
    """Measure the receiver Thevenin pair with two probe solves.

    The open-circuit voltage comes from a solve with a 1e12 ohm load (kept
    finite so both probes share one assembly path); the output impedance
    from a second solve with a 1e3 ohm probe, ``z_th = (v_th - U2') / i``
    with ``i`` the current delivered into the probe load.  The open-probe
    voltage is then corrected by its known first-order bias
    ``(z_th + Z_open)/Z_open``, which leaves only solver roundoff in the
    pair.  Both probes are fixed constants, so the result is deterministic.

    An uncoupled receiver (h = 0) delivers no current and the probe
    formula degenerates; in that case v_th = 0 and z_th is measured
    directly by driving the receiver port of the mirrored stack with the
    original source replaced by its own impedance.
    """
    op_open = solve_operating_point(
        stack, omega, drive.with_load(OPEN_LOAD_OHM + 0j)
    )
    v_raw = op_open.u2
    op_probe = solve_operating_point(
        stack, omega, drive.with_load(PROBE_LOAD_OHM + 0j)
    )
    i_load = -op_probe.i2
    if abs(i_load) < 1e-30:
        reversed_drive = DriveCondition(
            source_voltage=1.0 + 0j,
            source_impedance=0j,
            load_impedance=drive.source_impedance,
        )
        op_rev = solve_operating_point(stack.reversed(), omega, reversed_drive)
        return TheveninEquivalent(v_th=0j, z_th=op_rev.u1 / op_rev.i1)
    z_first = (v_raw - op_probe.u2) / i_load
    v_th = v_raw * (z_first + OPEN_LOAD_OHM) / OPEN_LOAD_OHM
    z_th = (v_th - op_probe.u2) / i_load
    return TheveninEquivalent(v_th=v_th, z_th=z_th)


def predicted_load_power(thevenin: TheveninEquivalent, z_load: complex) -> float:
    """Average power a load would draw from the Thevenin pair (watts)."""
    i = thevenin.v_th / (thevenin.z_th + z_load)
    return 0.5 * abs(i) ** 2 * z_load.real


def load_power(
    stack: Stack, omega: float, drive: DriveCondition, z_load: complex
) -> float:
    """Delivered power from a direct solve with the given load."""
    op = solve_operating_point(stack, omega, drive.with_load(z_load))
    return power_flow(op, stack, drive.with_load(z_load)).p_load


@dataclass(frozen=True)
class OptimalLoad:
    z_opt: complex
    p_max: float


def optimal_load(stack: Stack, omega: float, drive: DriveCondition) -> OptimalLoad:
    """Conjugate-match load and the power it draws.

    ``z_opt = conj(z_th)`` and ``p_max = |v_th|^2 / (8 Re z_th)``; a direct
    solve at z_opt reproduces p_max, and every perturbed load draws less.

    Raises:
        NonDissipativeOutput: Re(z_th) is not positive within 1e-9 of the
            impedance magnitude (e.g. a lossless stack with free faces,
            where nothing but the load can absorb power), so no finite
            power optimum exists.
    """
    thevenin = thevenin_at_output(stack, omega, drive)
    z_th = thevenin.z_th
    if z_th.real <= 1e-9 * abs(z_th):
        raise NonDissipativeOutput(
            f"output impedance {z_th!r} has no usable real part"
        )
    p_max = abs(thevenin.v_th) ** 2 / (8.0 * z_th.real)
    return OptimalLoad(z_opt=z_th.conjugate(), p_max=p_max)


@dataclass(frozen=True)
class EfficiencyOptimum:
    z_load: complex
    efficiency: float
    p_load: float


def _golden_max(fun, lo: float, hi: float, iterations: int = 60):
    """Golden-section maximization of a unimodal scalar function."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iterations):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fun(d)
    x = (a + b) / 2.0
    return x, fun(x)


def optimal_load_for_efficiency(
    stack: Stack,
    omega: float,
    drive: DriveCondition,
    phase_points: int = 41,
) -> EfficiencyOptimum:
    """Load maximizing P_load / P_in instead of delivered power.

    Scans the load phase over (-pi/2, pi/2), refining the magnitude by
    golden section on a log scale around |z_th| at each phase, then
    refines the phase itself by golden section around the best scan
    point.  Efficiency is assumed unimodal in the magnitude at fixed
    phase, which holds for passive stacks.  Deterministic for fixed
    inputs.
    """
    thevenin = thevenin_at_output(stack, omega, drive)
    center = math.log10(max(abs(thevenin.z_th), 1e-6))

    def efficiency_at(z_load: complex) -> float:
        op = solve_operating_point(stack, omega, drive.with_load(z_load))
        power = power_flow(op, stack, drive.with_load(z_load))
        if power.p_in <= 0.0:
            return 0.0
        return power.p_load / power.p_in

    def best_over_magnitude(phase: float) -> tuple[float, complex]:
        rot = cmath.exp(1j * phase)
        log_mag, eta = _golden_max(
            lambda lm: efficiency_at(10.0 ** lm * rot),
            center - 3.0,
            center + 3.0,
            iterations=40,
        )
        return eta, 10.0 ** log_mag * rot

    phases = np.linspace(-0.49 * math.pi, 0.49 * math.pi, phase_points)
    scan = [best_over_magnitude(phase) for phase in phases]
    best_index = max(range(len(scan)), key=lambda i: scan[i][0])
    spacing = phases[1] - phases[0]
    lo = max(phases[best_index] - spacing, -0.499 * math.pi)
    hi = min(phases[best_index] + spacing, 0.499 * math.pi)
    phase_star = _golden_max(
        lambda phase: best_over_magnitude(phase)[0], lo, hi, iterations=25
    )[0]
    eta, z_best = best_over_magnitude(phase_star)
    if scan[best_index][0] > eta:
        eta, z_best = scan[best_index]
    p_best = load_power(stack, omega, drive, z_best)
    return EfficiencyOptimum(z_load=z_best, efficiency=eta, p_load=p_best)


def design_matching_layer(
    z_left: float,
    z_right: float,
    f_design: float,
    c_material: float,
    area: float = 1.0,
) -> Layer:
    """Quarter-wave layer matching two lossless media.

    The layer gets characteristic impedance ``sqrt(z_left * z_right)``
    (density chosen as Z/(S*c)) and thickness ``c/(4*f_design)``, which
    makes the interface fully transmissive at the design frequency.

    Raises:
        DomainError: non-positive impedances, frequency, or sound speed.
    """
    for name, value in (
        ("z_left", z_left),
        ("z_right", z_right),
        ("f_design", f_design),
        ("c_material", c_material),
    ):
        if not (complex(value).imag == 0.0 and complex(value).real > 0.0):
            raise DomainError(f"{name} must be real and > 0, got {value!r}")
    z_match = math.sqrt(float(z_left) * float(z_right))
    return Layer(
        thickness=c_material / (4.0 * f_design),
        density=z_match / (area * c_material),
        sound_speed=c_material,
        loss_tangent=0.0,
        area=area,
    )


def slab_power_transmission(
    layer: Layer, z_left: float, z_right: float, frequency: float
) -> float:
    """Plane-wave power transmission through a slab between two half-spaces.

    ``z_left`` and ``z_right`` are the (real, area-scaled) mechanical
    impedances of the incident and exit media.  Computed from the slab's
    chain matrix: the input impedance seen from the left determines the
    reflection coefficient, and for a lossless slab the transmitted power
    fraction is ``1 - |reflection|^2``.
    """
    if z_left <= 0 or z_right <= 0:
        raise DomainError("half-space impedances must be > 0")
    m = chain_matrix(layer, 2.0 * math.pi * frequency)
    z_in = (m[0, 0] * z_right + m[0, 1]) / (m[1, 0] * z_right + m[1, 1])
    reflection = (z_in - z_left) / (z_in + z_left)
    return 1.0 - abs(reflection) ** 2


@dataclass(frozen=True)
class ResonancePeak:
    frequency_hz: float
    efficiency: float


def find_resonances(sweep: SweepResult) -> list[ResonancePeak]:
    """Strict interior efficiency maxima of a sweep, sorted by frequency.

    Endpoints are excluded; rows flagged with errors never qualify and
    never support a neighbor.  Requires at least three rows.
    """
    if len(sweep) < 3:
        raise DomainError(f"need >= 3 sweep rows, got {len(sweep)}")
    rows = sweep.rows
    peaks = []
    for i in range(1, len(rows) - 1):
        trio = rows[i - 1 : i + 2]
        if any(r.error is not None or math.isnan(r.efficiency) for r in trio):
            continue
        left, here, right = (r.efficiency for r in trio)
        if left < here > right:
            peaks.append(
                ResonancePeak(frequency_hz=rows[i].frequency_hz, efficiency=here)
            )
    return peaks
