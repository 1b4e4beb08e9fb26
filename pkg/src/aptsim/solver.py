"""Frequency-domain solver for the full driver / wall / receiver stack.

Two equivalent formulations of the same physics live here:

* :func:`assemble_system` builds the compact interface system whose
  unknowns are the interface velocities plus the two port currents,
  ``(V_1 .. V_{N+1}, I1, I2)``.  One equation per interface expresses the
  backing terminations and internal force continuity; two more rows carry
  the electrical source and load.  Layer entries are derived from the
  chain form (x11 = A/C, x12 = 1/C), which keeps them finite floats even
  at thickness resonances, but the rows become badly conditioned there.

* :func:`solve_operating_point` solves an augmented formulation that also
  carries the interface forces as unknowns, ``(V_1.., F_1.., I1, I2)``.
  Each layer contributes its two chain equations, whose coefficients are
  entire functions of frequency, so the solve stays accurate through every
  layer resonance.  The solved point is reported with both velocities and
  forces.

Sign conventions: interface velocities are positive from driver to
receiver; ``F_n`` is the compressive force at interface n acting on the
material to its right, continuous across internal interfaces.  Port
currents I1, I2 flow into the transducer electrical ports, so the load
satisfies ``U2 = -Z_load * I2``.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve

from .acoustics import (
    characteristic_impedance,
    piezo_clamped_capacitance,
    propagation_phase,
)
from .errors import DomainError, SolveError, ZeroCurrent, ZeroInputPower
from .layers import Layer, PiezoLayer
from .stack import DriveCondition, Stack

#: Relative residual allowed for every solved equation.
RESIDUAL_TOLERANCE = 1e-10

#: Solves are rejected when the scaled matrix is worse conditioned than this.
CONDITION_LIMIT = 1e14


@dataclass(frozen=True)
class _LayerTerms:
    """Per-layer quantities reused across rows of the linear systems."""

    cos: complex
    sin: complex
    z: complex
    coupling: complex  # h/(j*omega); 0 for passive slabs
    x33: complex  # 1/(j*omega*C0); 0 for passive slabs


def _layer_terms(layer: Layer, omega: float) -> _LayerTerms:
    theta = propagation_phase(layer, omega)
    z = characteristic_impedance(layer)
    coupling = 0j
    x33 = 0j
    if isinstance(layer, PiezoLayer):
        coupling = layer.h_coupling / (1j * omega)
        x33 = 1.0 / (1j * omega * piezo_clamped_capacitance(layer))
    return _LayerTerms(
        cos=cmath.cos(theta), sin=cmath.sin(theta), z=z, coupling=coupling, x33=x33
    )


@dataclass(frozen=True)
class AssembledSystem:
    """Dense complex system ``matrix @ unknowns = rhs`` with labeled unknowns."""

    matrix: np.ndarray
    rhs: np.ndarray
    unknowns: tuple[str, ...]

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def input_force_coefficients(
    stack: Stack, omega: float
) -> tuple[complex, complex, complex]:
    """Coefficients (a, b, c) of the driver-face force F_1 = a*V1 + b*V2 + c*I1.

    This is the explicit row expansion of the interface system's first
    force and doubles as an independent check on any solved operating
    point.  Entries are chain-derived and always finite.
    """
    t = _layer_terms(stack.layers[0], omega)
    x12 = t.z / (1j * t.sin)
    x11 = x12 * t.cos
    return x11, -x12, t.coupling


def assemble_system(
    stack: Stack, omega: float, drive: DriveCondition
) -> AssembledSystem:
    """Assemble the (N+3)-dimensional interface system of an N-layer stack.

    Unknown order is ``(V_1 .. V_{N+1}, I1, I2)``.  Rows are:

    1.  driver backing, ``F_1 + Z_btx * V_1 = 0``;
    2.  force continuity at each internal interface;
    3.  receiver backing, ``F_{N+1} - Z_brx * V_{N+1} = 0``;
    4.  electrical source, ``U1 = U_src - Z_src * I1``;
    5.  electrical load, ``U2 = -Z_load * I2``.

    Entries stay finite at layer resonances but grow as 1/sin(k d);
    :func:`solve_operating_point` therefore solves an augmented chain-form
    system instead of this one.

    Raises:
        DomainError: omega <= 0.
    """
    if not omega > 0.0:
        raise DomainError(f"omega must be > 0, got {omega!r}")
    n = stack.num_layers
    dim = n + 3
    terms = [_layer_terms(layer, omega) for layer in stack.layers]
    i1_col = n + 1
    i2_col = n + 2

    def x_entries(t: _LayerTerms) -> tuple[complex, complex]:
        x12 = t.z / (1j * t.sin)
        return x12 * t.cos, x12

    matrix = np.zeros((dim, dim), dtype=complex)
    rhs = np.zeros(dim, dtype=complex)

    def current_col(layer_index: int) -> int | None:
        if layer_index == 0:
            return i1_col
        if layer_index == n - 1:
            return i2_col
        return None

    # Row 0: driver backing.  F_left of layer 0 plus Z_btx * V_1 = 0.
    x11, x12 = x_entries(terms[0])
    matrix[0, 0] = x11 + stack.backing_tx
    matrix[0, 1] = -x12
    matrix[0, i1_col] = terms[0].coupling

    # Rows 1..n-1: continuity at interface m+1 between layers m and m+1.
    for m in range(n - 1):
        row = m + 1
        xa11, xa12 = x_entries(terms[m])
        xb11, xb12 = x_entries(terms[m + 1])
        # F_right of layer m: x12*V_m - x11*V_{m+1} + coupling*I
        matrix[row, m] += xa12
        matrix[row, m + 1] += -xa11
        col = current_col(m)
        if col is not None:
            matrix[row, col] += terms[m].coupling
        # minus F_left of layer m+1: x11*V_{m+1} - x12*V_{m+2} + coupling*I
        matrix[row, m + 1] += -xb11
        matrix[row, m + 2] += xb12
        col = current_col(m + 1)
        if col is not None:
            matrix[row, col] += -terms[m + 1].coupling

    # Row n: receiver backing.  F_right of layer n-1 minus Z_brx * V_{N+1} = 0.
    x11, x12 = x_entries(terms[-1])
    matrix[n, n - 1] = x12
    matrix[n, n] = -x11 - stack.backing_rx
    matrix[n, i2_col] = terms[-1].coupling

    # Row n+1: electrical source on the driver.
    t = terms[0]
    matrix[n + 1, 0] = t.coupling
    matrix[n + 1, 1] = -t.coupling
    matrix[n + 1, i1_col] = t.x33 + drive.source_impedance
    rhs[n + 1] = drive.source_voltage

    # Row n+2: electrical load on the receiver.
    t = terms[-1]
    matrix[n + 2, n - 1] = t.coupling
    matrix[n + 2, n] = -t.coupling
    matrix[n + 2, i2_col] = t.x33 + drive.load_impedance

    labels = tuple(f"v{i + 1}" for i in range(n + 1)) + ("i1", "i2")
    return AssembledSystem(matrix=matrix, rhs=rhs, unknowns=labels)


def _assemble_augmented(
    stack: Stack, omega: float, drive: DriveCondition
) -> tuple[np.ndarray, np.ndarray, float]:
    """Chain-form system with unknowns (V_1.., F_1.., I1, I2).

    Returns (matrix, rhs, force_scale); force unknowns are normalized by
    force_scale so velocity and force columns have comparable magnitudes.
    """
    n = stack.num_layers
    terms = [_layer_terms(layer, omega) for layer in stack.layers]
    dim = 2 * (n + 1) + 2
    f0 = n + 1  # force block offset
    i1_col = 2 * (n + 1)
    i2_col = i1_col + 1

    # Geometric mean of |Z| keeps the scaled force columns near unity.
    z_ref = math.exp(sum(math.log(abs(t.z)) for t in terms) / n)

    matrix = np.zeros((dim, dim), dtype=complex)
    rhs = np.zeros(dim, dtype=complex)

    def current_col(layer_index: int) -> int | None:
        if layer_index == 0:
            return i1_col
        if layer_index == n - 1:
            return i2_col
        return None

    row = 0
    for m, t in enumerate(terms):
        col = current_col(m)
        # Chain relation for the force-like variable F' = F - coupling*I:
        #   F_m - cos*F_{m+1} - j*Z*sin*V_{m+1} - coupling*(1 - cos)*I = 0
        matrix[row, f0 + m] = z_ref
        matrix[row, f0 + m + 1] = -t.cos * z_ref
        matrix[row, m + 1] = -1j * t.z * t.sin
        if col is not None:
            matrix[row, col] = -t.coupling * (1.0 - t.cos)
        row += 1
        #   V_m - cos*V_{m+1} - (j*sin/Z)*F_{m+1} + (j*sin/Z)*coupling*I = 0
        matrix[row, m] = 1.0
        matrix[row, m + 1] = -t.cos
        matrix[row, f0 + m + 1] = -1j * t.sin / t.z * z_ref
        if col is not None:
            matrix[row, col] = 1j * t.sin / t.z * t.coupling
        row += 1

    # Backings: F_1 = -Z_btx*V_1 and F_{N+1} = +Z_brx*V_{N+1}.
    matrix[row, f0] = z_ref
    matrix[row, 0] = stack.backing_tx
    row += 1
    matrix[row, f0 + n] = z_ref
    matrix[row, n] = -stack.backing_rx
    row += 1

    # Electrical source and load rows.
    t = terms[0]
    matrix[row, 0] = t.coupling
    matrix[row, 1] = -t.coupling
    matrix[row, i1_col] = t.x33 + drive.source_impedance
    rhs[row] = drive.source_voltage
    row += 1
    t = terms[-1]
    matrix[row, n - 1] = t.coupling
    matrix[row, n] = -t.coupling
    matrix[row, i2_col] = t.x33 + drive.load_impedance

    return matrix, rhs, z_ref


def _solve_dense(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Row-equilibrated dense solve with residual and condition checks.

    Raises:
        SolveError: singular system, condition estimate above
            CONDITION_LIMIT, or a residual above RESIDUAL_TOLERANCE
            relative to the row scale.
    """
    row_scale = np.max(np.abs(matrix), axis=1)
    if not np.all(np.isfinite(row_scale)) or np.any(row_scale == 0.0):
        raise SolveError("system has an empty or non-finite row")
    scaled = matrix / row_scale[:, None]
    scaled_rhs = rhs / row_scale
    try:
        lu, piv = lu_factor(scaled)
    except Exception as exc:  # LAPACK failure
        raise SolveError(f"factorization failed: {exc}") from exc
    if not np.all(np.isfinite(lu)):
        raise SolveError("singular system: factorization produced non-finite values")

    gecon = get_lapack_funcs(("gecon",), (scaled,))[0]
    anorm = np.linalg.norm(scaled, 1)
    rcond, info = gecon(lu, anorm, norm="1")
    if info != 0 or rcond <= 0.0 or 1.0 / rcond > CONDITION_LIMIT:
        estimate = math.inf if rcond <= 0.0 else 1.0 / rcond
        raise SolveError(
            f"ill-conditioned system: condition estimate {estimate:.3e} "
            f"exceeds {CONDITION_LIMIT:.1e}"
        )

    solution = lu_solve((lu, piv), scaled_rhs)
    if not np.all(np.isfinite(solution)):
        raise SolveError("solve produced non-finite values")

    residual = scaled @ solution - scaled_rhs
    scale = np.max(np.abs(solution)) + np.max(np.abs(scaled_rhs))
    if scale > 0.0 and np.max(np.abs(residual)) > RESIDUAL_TOLERANCE * scale:
        raise SolveError(
            f"residual {np.max(np.abs(residual)) / scale:.3e} exceeds "
            f"{RESIDUAL_TOLERANCE:.1e}"
        )
    return solution


@dataclass(frozen=True)
class OperatingPoint:
    """Solved interface and port quantities of a stack at one frequency.

    ``velocities[i]`` and ``forces[i]`` belong to interface i+1 (there are
    N+1 interfaces for N layers).  ``u1, i1`` are the driver port voltage
    and current, ``u2, i2`` the receiver port's; currents flow into the
    transducer ports.
    """

    omega: float
    velocities: np.ndarray
    forces: np.ndarray
    u1: complex
    u2: complex
    i1: complex
    i2: complex


def solve_operating_point(
    stack: Stack, omega: float, drive: DriveCondition
) -> OperatingPoint:
    """Solve one frequency point of the stack.

    Uses the augmented chain-form system, which stays well conditioned at
    layer thickness resonances, and verifies the residual of every solved
    equation.

    Raises:
        DomainError: omega <= 0.
        SolveError: singular or ill-conditioned system.
    """
    if not omega > 0.0:
        raise DomainError(f"omega must be > 0, got {omega!r}")
    matrix, rhs, z_ref = _assemble_augmented(stack, omega, drive)
    solution = _solve_dense(matrix, rhs)
    n = stack.num_layers
    velocities = solution[: n + 1].copy()
    forces = solution[n + 1 : 2 * (n + 1)].copy() * z_ref
    i1 = complex(solution[2 * (n + 1)])
    i2 = complex(solution[2 * (n + 1) + 1])
    u1 = drive.source_voltage - drive.source_impedance * i1
    u2 = -drive.load_impedance * i2
    return OperatingPoint(
        omega=omega,
        velocities=velocities,
        forces=forces,
        u1=u1,
        u2=u2,
        i1=i1,
        i2=i2,
    )


def recomputed_input_force(stack: Stack, op: OperatingPoint) -> complex:
    """Driver-face force recomputed from the explicit row expansion.

    Independent cross-check: dots the (V1, V2, I1) coefficients from
    :func:`input_force_coefficients` with the solved unknowns; must match
    ``op.forces[0]`` to within the solver tolerance at any regular point.
    """
    a, b, c = input_force_coefficients(stack, op.omega)
    return a * op.velocities[0] + b * op.velocities[1] + c * op.i1


def system_residual(
    system: AssembledSystem, op: OperatingPoint
) -> float:
    """Largest row residual of the interface system at a solved point,
    relative to the row norm times the solution scale."""
    x = np.concatenate([op.velocities, [op.i1, op.i2]])
    residual = system.matrix @ x - system.rhs
    row_norm = np.max(np.abs(system.matrix), axis=1)
    scale = row_norm * np.max(np.abs(x)) + np.abs(system.rhs)
    return float(np.max(np.abs(residual) / scale))


def input_impedance(op: OperatingPoint) -> complex:
    """Electrical input impedance U1/I1 at the driver port.

    Raises:
        ZeroCurrent: |I1| below 1e-30 A.
    """
    if abs(op.i1) < 1e-30:
        raise ZeroCurrent(f"|I1| = {abs(op.i1):.3e} A is too small")
    return op.u1 / op.i1


@dataclass(frozen=True)
class PowerFlow:
    """Time-averaged power bookkeeping for one operating point (watts)."""

    p_in: float
    p_load: float
    p_backing_tx: float
    p_backing_rx: float
    p_material_loss: float

    @property
    def p_backing(self) -> float:
        return self.p_backing_tx + self.p_backing_rx


def power_flow(op: OperatingPoint, stack: Stack, drive: DriveCondition) -> PowerFlow:
    """Split the input power into load, backing, and material dissipation.

    Standard AC averages: P_in = Re(U1 conj I1)/2 at the driver port,
    P_load = |I2|^2 Re(Z_load)/2, and |V|^2 Re(Z_backing)/2 radiated into
    each backing.  The material term is the remainder and is nonnegative
    (up to rounding) whenever every loss tangent is >= 0.
    """
    p_in = 0.5 * (op.u1 * op.i1.conjugate()).real
    p_load = 0.5 * abs(op.i2) ** 2 * drive.load_impedance.real
    p_btx = 0.5 * abs(op.velocities[0]) ** 2 * stack.backing_tx.real
    p_brx = 0.5 * abs(op.velocities[-1]) ** 2 * stack.backing_rx.real
    p_loss = p_in - p_load - p_btx - p_brx
    return PowerFlow(
        p_in=p_in,
        p_load=p_load,
        p_backing_tx=p_btx,
        p_backing_rx=p_brx,
        p_material_loss=p_loss,
    )


def efficiency(power: PowerFlow) -> float:
    """Delivered fraction P_load / P_in; in [0, 1] for passive elements.

    Raises:
        ZeroInputPower: P_in is not positive.
    """
    if not power.p_in > 0.0:
        raise ZeroInputPower(f"P_in = {power.p_in!r} W is not positive")
    return power.p_load / power.p_in


@dataclass(frozen=True)
class SweepGrid:
    """Frequency grid: points samples from f_min to f_max, linear or log."""

    f_min: float
    f_max: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if not 0.0 < self.f_min < self.f_max:
            raise DomainError(
                f"need 0 < f_min < f_max, got {self.f_min!r}, {self.f_max!r}"
            )
        if self.points < 2:
            raise DomainError(f"points must be >= 2, got {self.points!r}")
        if self.scale not in ("linear", "log"):
            raise DomainError(f"scale must be 'linear' or 'log', got {self.scale!r}")

    def frequencies(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.f_min, self.f_max, self.points)
        return np.linspace(self.f_min, self.f_max, self.points)


@dataclass(frozen=True)
class SweepRow:
    """One solved grid frequency; ``error`` is set instead of aborting."""

    frequency_hz: float
    z_in: complex
    p_in_w: float
    p_load_w: float
    p_backing_w: float
    efficiency: float
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([row.frequency_hz for row in self.rows])

    @property
    def efficiencies(self) -> np.ndarray:
        return np.array([row.efficiency for row in self.rows])

    @property
    def failed_rows(self) -> tuple[SweepRow, ...]:
        return tuple(row for row in self.rows if row.error is not None)


def _sweep_workers() -> int:
    raw = os.environ.get("APT_SIM_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    if value == 0:
        return min(32, os.cpu_count() or 1)
    return max(1, value)


def _sweep_point(stack: Stack, frequency: float, drive: DriveCondition) -> SweepRow:
    try:
        op = solve_operating_point(stack, 2.0 * math.pi * frequency, drive)
        power = power_flow(op, stack, drive)
        if power.p_in > 0.0:
            eta = power.p_load / power.p_in
        else:
            eta = 0.0
        z_in = op.u1 / op.i1 if abs(op.i1) >= 1e-30 else complex(math.inf)
        return SweepRow(
            frequency_hz=frequency,
            z_in=z_in,
            p_in_w=power.p_in,
            p_load_w=power.p_load,
            p_backing_w=power.p_backing,
            efficiency=eta,
        )
    except SolveError as exc:
        nan = float("nan")
        return SweepRow(
            frequency_hz=frequency,
            z_in=complex(nan, nan),
            p_in_w=nan,
            p_load_w=nan,
            p_backing_w=nan,
            efficiency=nan,
            error=str(exc),
        )


def frequency_sweep(
    stack: Stack, grid: SweepGrid, drive: DriveCondition
) -> SweepResult:
    """Solve the stack at every grid frequency.

    Rows are independent, ordered by the grid, and deterministic for fixed
    inputs.  A failing frequency is flagged in its row instead of aborting
    the sweep.  The APT_SIM_THREADS environment variable caps parallelism
    (unset/1 = sequential, 0 = auto); the output is identical either way.
    """
    frequencies = grid.frequencies()
    workers = _sweep_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda f: _sweep_point(stack, f, drive), frequencies))
    else:
        rows = [_sweep_point(stack, f, drive) for f in frequencies]
    return SweepResult(rows=tuple(rows))
