"""Independent solution path: Mason equivalent network solved by MNA.

Every slab of a stack maps onto a stage of an electrical ladder in the
force-voltage / velocity-current analogy:

* a passive slab becomes a T-network with series arms ``x11 - x12`` and a
  shunt arm ``x12`` from the midpoint to the zero-force rail (ground);
* a piezoelectric plate becomes the same T-network, except that its shunt
  arm lands on a floating rail node that is lifted by the secondary of an
  ideal transformer (turns ratio ``h*C0``).  The electrical port carries
  the clamped capacitance C0 in shunt and a negative capacitance -C0 in
  series with the transformer primary.

Interface nodes carry the interface forces as node voltages; the ladder
through-current at an interface is the interface velocity.  Backings,
source, and load attach as ordinary branches; a zero-impedance attachment
is emitted as a 0 V source, which pins the node and measures the through
current at the same time.

At a mechanical thickness resonance the T-arm impedances diverge.  A
passive stage whose ``|sin(k d)|`` falls below 1e-9 is replaced by its
exact chain-equivalent, an ideal transformer of ratio ``cos(k d) = +/-1``;
a piezoelectric stage gets a tiny complex detune of the phase instead
(equivalent to a loss tangent of order 1e-9), since its coupling has no
three-impedance equivalent at the exact singular point.

The module also provides the generic AC modified-nodal-analysis solver
used to evaluate these networks, and :func:`cross_check`, which compares
the network solution against the transfer-matrix solver quantity by
quantity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import DomainError, SingularNetwork, SolveError
from .layers import Layer, PiezoLayer
from .acoustics import piezo_clamped_capacitance, propagation_phase
from .solver import _layer_terms, _solve_dense, solve_operating_point
from .stack import DriveCondition, Stack

#: Below this |sin(k d)| a T-stage is replaced by its resonance fallback.
FALLBACK_TOLERANCE = 1e-9

GROUND = "0"


class BranchKind(str, Enum):
    IMPEDANCE = "impedance"
    VOLTAGE_SOURCE = "voltage-source"
    CURRENT_SOURCE = "current-source"
    IDEAL_TRANSFORMER = "ideal-transformer"
    NEGATIVE_CAPACITANCE = "negative-capacitance"


@dataclass(frozen=True)
class Branch:
    """One network branch.

    ``nodes`` holds (plus, minus) for two-terminal kinds and
    (p+, p-, s+, s-) for an ideal transformer.  ``value`` is the complex
    impedance, source voltage, or source current; for a transformer it is
    the real turns ratio (secondary per primary volt), and for a negative
    capacitance the positive capacitance in farads, realized as the
    impedance ``-1/(j*omega*C)`` at solve time.
    """

    kind: BranchKind
    name: str
    nodes: tuple[str, ...]
    value: complex

    def __post_init__(self):
        expected = 4 if self.kind is BranchKind.IDEAL_TRANSFORMER else 2
        if len(self.nodes) != expected:
            raise DomainError(
                f"branch {self.name}: {self.kind.value} needs {expected} "
                f"terminals, got {len(self.nodes)}"
            )
        if self.kind is BranchKind.IDEAL_TRANSFORMER and self.value.imag != 0.0:
            raise DomainError(
                f"branch {self.name}: transformer ratio must be real"
            )


@dataclass
class Network:
    """Node/branch circuit with a single designated ground node."""

    branches: list[Branch]
    ground: str = GROUND

    @property
    def nodes(self) -> list[str]:
        seen: dict[str, None] = {}
        for branch in self.branches:
            for node in branch.nodes:
                seen.setdefault(node, None)
        return list(seen)

    def validate(self) -> None:
        """Check structural invariants: connectivity and a grounded graph.

        Raises:
            SingularNetwork: empty, disconnected, or ground-free network.
        """
        if not self.branches:
            raise SingularNetwork("network has no branches")
        adjacency: dict[str, set[str]] = {}
        for branch in self.branches:
            for a in branch.nodes:
                for b in branch.nodes:
                    adjacency.setdefault(a, set()).add(b)
        if self.ground not in adjacency:
            raise SingularNetwork(f"ground node {self.ground!r} is not referenced")
        reached = {self.ground}
        frontier = [self.ground]
        while frontier:
            node = frontier.pop()
            for neighbor in adjacency[node]:
                if neighbor not in reached:
                    reached.add(neighbor)
                    frontier.append(neighbor)
        floating = sorted(set(adjacency) - reached)
        if floating:
            raise SingularNetwork(f"floating subcircuit: nodes {floating}")


def _branch_impedance(branch: Branch, omega: float) -> complex:
    if branch.kind is BranchKind.IMPEDANCE:
        return branch.value
    if branch.kind is BranchKind.NEGATIVE_CAPACITANCE:
        return -1.0 / (1j * omega * branch.value.real)
    raise DomainError(f"branch {branch.name} has no impedance")


@dataclass(frozen=True)
class MnaSolution:
    """Node voltages plus source/transformer branch currents.

    Transformer winding currents are keyed ``<name>.primary`` and
    ``<name>.secondary``; both are referenced into the winding's plus
    terminal.
    """

    node_voltages: dict[str, complex]
    branch_currents: dict[str, complex]

    def voltage(self, node: str) -> complex:
        return self.node_voltages[node]

    def source_current(self, name: str) -> complex:
        """Current leaving the + terminal of a source branch through it."""
        return self.branch_currents[name]


def mna_solve(network: Network, omega: float) -> MnaSolution:
    """Solve the network by AC modified nodal analysis.

    Deterministic: unknown ordering follows first appearance of nodes and
    branch order.  KCL is verified at every node after the solve.

    Raises:
        SingularNetwork: floating subcircuits, shorted voltage sources, or
            any other singular/ill-conditioned system.
    """
    network.validate()
    node_index: dict[str, int] = {}
    for branch in network.branches:
        for node in branch.nodes:
            if node != network.ground and node not in node_index:
                node_index[node] = len(node_index)
    n_nodes = len(node_index)

    extra: dict[str, int] = {}
    for branch in network.branches:
        if branch.kind is BranchKind.VOLTAGE_SOURCE:
            extra[branch.name] = n_nodes + len(extra)
        elif branch.kind is BranchKind.IDEAL_TRANSFORMER:
            extra[branch.name + ".primary"] = n_nodes + len(extra)
            extra[branch.name + ".secondary"] = n_nodes + len(extra)
    dim = n_nodes + len(extra)
    matrix = np.zeros((dim, dim), dtype=complex)
    rhs = np.zeros(dim, dtype=complex)

    def row_of(node: str) -> int | None:
        return None if node == network.ground else node_index[node]

    def stamp(row: int | None, col: int | None, value: complex) -> None:
        if row is not None and col is not None:
            matrix[row, col] += value

    for branch in network.branches:
        if branch.kind in (BranchKind.IMPEDANCE, BranchKind.NEGATIVE_CAPACITANCE):
            z = _branch_impedance(branch, omega)
            if z == 0:
                raise SingularNetwork(
                    f"branch {branch.name}: zero impedance; model it as a "
                    "0 V source instead"
                )
            y = 1.0 / z
            a, b = (row_of(node) for node in branch.nodes)
            stamp(a, a, y)
            stamp(b, b, y)
            stamp(a, b, -y)
            stamp(b, a, -y)
        elif branch.kind is BranchKind.VOLTAGE_SOURCE:
            a, b = (row_of(node) for node in branch.nodes)
            k = extra[branch.name]
            stamp(a, k, 1.0)
            stamp(b, k, -1.0)
            stamp(k, a, 1.0)
            stamp(k, b, -1.0)
            rhs[k] += branch.value
        elif branch.kind is BranchKind.CURRENT_SOURCE:
            a, b = (row_of(node) for node in branch.nodes)
            if a is not None:
                rhs[a] -= branch.value
            if b is not None:
                rhs[b] += branch.value
        elif branch.kind is BranchKind.IDEAL_TRANSFORMER:
            pp, pn, sp, sn = (row_of(node) for node in branch.nodes)
            kp = extra[branch.name + ".primary"]
            ks = extra[branch.name + ".secondary"]
            ratio = branch.value.real
            stamp(pp, kp, 1.0)
            stamp(pn, kp, -1.0)
            stamp(sp, ks, 1.0)
            stamp(sn, ks, -1.0)
            # V(s+) - V(s-) = ratio * (V(p+) - V(p-))
            stamp(kp, sp, 1.0)
            stamp(kp, sn, -1.0)
            stamp(kp, pp, -ratio)
            stamp(kp, pn, ratio)
            # i_primary + ratio * i_secondary = 0
            matrix[ks, kp] += 1.0
            matrix[ks, ks] += ratio

    try:
        solution = _solve_dense(matrix, rhs)
    except SolveError as exc:
        raise SingularNetwork(str(exc)) from exc

    voltages = {network.ground: 0j}
    for node, index in node_index.items():
        voltages[node] = complex(solution[index])
    currents = {name: complex(solution[index]) for name, index in extra.items()}
    result = MnaSolution(node_voltages=voltages, branch_currents=currents)
    _verify_kcl(network, result, omega)
    return result


def branch_current(
    network: Network, solution: MnaSolution, name: str, omega: float
) -> complex:
    """Current into the + terminal of a named two-terminal branch."""
    for branch in network.branches:
        if branch.name == name:
            if branch.kind in (
                BranchKind.IMPEDANCE,
                BranchKind.NEGATIVE_CAPACITANCE,
            ):
                z = _branch_impedance(branch, omega)
                a, b = branch.nodes
                return (solution.voltage(a) - solution.voltage(b)) / z
            if branch.kind is BranchKind.VOLTAGE_SOURCE:
                return solution.branch_currents[name]
            if branch.kind is BranchKind.CURRENT_SOURCE:
                return branch.value
            raise DomainError(f"branch {name} is not two-terminal")
    raise DomainError(f"no branch named {name!r}")


def _node_current_contributions(
    network: Network, solution: MnaSolution, omega: float
) -> dict[str, list[complex]]:
    """Per-node list of branch currents leaving the node."""
    leaving: dict[str, list[complex]] = {node: [] for node in solution.node_voltages}
    for branch in network.branches:
        if branch.kind in (BranchKind.IMPEDANCE, BranchKind.NEGATIVE_CAPACITANCE):
            a, b = branch.nodes
            i = (solution.voltage(a) - solution.voltage(b)) / _branch_impedance(
                branch, omega
            )
            leaving[a].append(i)
            leaving[b].append(-i)
        elif branch.kind is BranchKind.VOLTAGE_SOURCE:
            a, b = branch.nodes
            i = solution.branch_currents[branch.name]
            leaving[a].append(i)
            leaving[b].append(-i)
        elif branch.kind is BranchKind.CURRENT_SOURCE:
            a, b = branch.nodes
            leaving[a].append(branch.value)
            leaving[b].append(-branch.value)
        elif branch.kind is BranchKind.IDEAL_TRANSFORMER:
            pp, pn, sp, sn = branch.nodes
            ip = solution.branch_currents[branch.name + ".primary"]
            i_s = solution.branch_currents[branch.name + ".secondary"]
            leaving[pp].append(ip)
            leaving[pn].append(-ip)
            leaving[sp].append(i_s)
            leaving[sn].append(-i_s)
    return leaving


def kcl_residual(network: Network, solution: MnaSolution, omega: float) -> float:
    """Largest KCL residual over the nodes, relative to the node current scale."""
    worst = 0.0
    for node, currents in _node_current_contributions(
        network, solution, omega
    ).items():
        if node == network.ground or not currents:
            continue
        scale = sum(abs(i) for i in currents)
        if scale == 0.0:
            continue
        worst = max(worst, abs(sum(currents)) / scale)
    return worst


def _verify_kcl(network: Network, solution: MnaSolution, omega: float) -> None:
    residual = kcl_residual(network, solution, omega)
    if residual > 1e-10:
        raise SingularNetwork(f"KCL residual {residual:.3e} exceeds 1e-10")


def tellegen_residual(network: Network, solution: MnaSolution, omega: float) -> float:
    """|sum over branches of V_branch * conj(I_branch)| relative to the
    total apparent power; zero for any consistent solution."""
    total = 0j
    scale = 0.0
    for branch in network.branches:
        if branch.kind is BranchKind.IDEAL_TRANSFORMER:
            pp, pn, sp, sn = (solution.voltage(node) for node in branch.nodes)
            ip = solution.branch_currents[branch.name + ".primary"]
            i_s = solution.branch_currents[branch.name + ".secondary"]
            for v, i in (((pp - pn), ip), ((sp - sn), i_s)):
                total += v * i.conjugate()
                scale += abs(v * i.conjugate())
        else:
            a, b = branch.nodes
            v = solution.voltage(a) - solution.voltage(b)
            i = branch_current(network, solution, branch.name, omega)
            total += v * i.conjugate()
            scale += abs(v * i.conjugate())
    if scale == 0.0:
        return 0.0
    return abs(total) / scale


@dataclass(frozen=True)
class PowerAudit:
    """Real power delivered by sources and absorbed by passive branches."""

    source_power: float
    absorbed_power: float

    @property
    def mismatch(self) -> float:
        scale = max(abs(self.source_power), abs(self.absorbed_power), 1e-300)
        return abs(self.source_power - self.absorbed_power) / scale


def power_audit(network: Network, solution: MnaSolution, omega: float) -> PowerAudit:
    """Balance the average power: sources deliver what the rest absorbs."""
    delivered = 0.0
    absorbed = 0.0
    for branch in network.branches:
        if branch.kind is BranchKind.IDEAL_TRANSFORMER:
            continue  # ideal coupling: zero absorbed power by construction
        a, b = branch.nodes
        v = solution.voltage(a) - solution.voltage(b)
        i = branch_current(network, solution, branch.name, omega)
        p = 0.5 * (v * i.conjugate()).real
        if branch.kind in (BranchKind.VOLTAGE_SOURCE, BranchKind.CURRENT_SOURCE):
            delivered += -p
        else:
            absorbed += p
    return PowerAudit(source_power=delivered, absorbed_power=absorbed)


# ----------------------------------------------------------------------
# Stack -> network builder
# ----------------------------------------------------------------------


def interface_node(interface: int) -> str:
    """Canonical node name of interface ``interface`` (1-based)."""
    if interface == 1:
        return "n_1_l"
    return f"n_{interface - 1}_r"


@dataclass(frozen=True)
class _Stage:
    """How one layer was realized, for current extraction."""

    kind: str  # "t" or "transformer"
    shunt_nodes: tuple[str, str] | None
    shunt_admittance: complex
    ratio: float


@dataclass(frozen=True)
class _BuildInfo:
    stages: tuple[_Stage, ...]
    tx_backing_branch: str | None  # 0 V anchor when the backing is zero
    source_branch: str
    source_node: str | None  # internal node when Z_src != 0
    load_branch: str
    tx_port: str
    rx_port: str


def _t_stage_values(terms) -> tuple[complex, complex, complex]:
    """(series arm, shunt arm, shunt admittance) of a layer T-network."""
    x12 = terms.z / (1j * terms.sin)
    za = x12 * (terms.cos - 1.0)
    return za, x12, 1.0 / x12


def _build_network(
    stack: Stack, omega: float, drive: DriveCondition
) -> tuple[Network, _BuildInfo]:
    branches: list[Branch] = []
    stages: list[_Stage] = []

    for j, layer in enumerate(stack.layers, start=1):
        left = interface_node(j)
        right = interface_node(j + 1)
        terms = _layer_terms(layer, omega)
        piezo = isinstance(layer, PiezoLayer)
        if abs(terms.sin) < FALLBACK_TOLERANCE:
            if piezo:
                # No finite three-impedance form at the singular point; a
                # tiny complex detune of the phase (loss ~1e-9) keeps the
                # stage solvable and passive.
                theta = propagation_phase(layer, omega) - 1e-9j
                terms = replace(
                    terms, cos=cmath.cos(theta), sin=cmath.sin(theta)
                )
            else:
                ratio = -1.0 if terms.cos.real < 0 else 1.0
                branches.append(
                    Branch(
                        kind=BranchKind.IDEAL_TRANSFORMER,
                        name=f"stage_{j}",
                        nodes=(left, GROUND, right, GROUND),
                        value=ratio,
                    )
                )
                stages.append(
                    _Stage(
                        kind="transformer",
                        shunt_nodes=None,
                        shunt_admittance=0j,
                        ratio=ratio,
                    )
                )
                continue

        mid = f"n_{j}_m"
        za, x12, y12 = _t_stage_values(terms)
        shunt_to = GROUND
        if piezo:
            shunt_to = f"n_{j}_rail"
        branches.append(
            Branch(BranchKind.IMPEDANCE, f"arm_l_{j}", (left, mid), za)
        )
        branches.append(
            Branch(BranchKind.IMPEDANCE, f"arm_r_{j}", (mid, right), za)
        )
        branches.append(
            Branch(BranchKind.IMPEDANCE, f"shunt_{j}", (mid, shunt_to), x12)
        )
        if piezo:
            c0 = piezo_clamped_capacitance(layer)
            ratio = layer.h_coupling * c0
            port = f"n_{j}_e"
            inner = f"n_{j}_ei"
            branches.append(
                Branch(
                    BranchKind.IDEAL_TRANSFORMER,
                    f"xfmr_{j}",
                    (inner, GROUND, shunt_to, GROUND),
                    ratio,
                )
            )
            branches.append(
                Branch(
                    BranchKind.NEGATIVE_CAPACITANCE,
                    f"ncap_{j}",
                    (port, inner),
                    c0,
                )
            )
            branches.append(
                Branch(
                    BranchKind.IMPEDANCE,
                    f"c0_{j}",
                    (port, GROUND),
                    1.0 / (1j * omega * c0),
                )
            )
        stages.append(
            _Stage(
                kind="t",
                shunt_nodes=(mid, shunt_to),
                shunt_admittance=y12,
                ratio=0.0,
            )
        )

    # Backings: impedance branch when nonzero, 0 V anchor (which doubles as
    # an ammeter for the through current) when zero.
    tx_anchor = None
    face_tx = interface_node(1)
    if stack.backing_tx != 0:
        branches.append(
            Branch(
                BranchKind.IMPEDANCE, "backing_tx", (face_tx, GROUND), stack.backing_tx
            )
        )
    else:
        tx_anchor = "backing_tx"
        branches.append(
            Branch(BranchKind.VOLTAGE_SOURCE, "backing_tx", (face_tx, GROUND), 0j)
        )
    face_rx = interface_node(stack.num_interfaces)
    if stack.backing_rx != 0:
        branches.append(
            Branch(
                BranchKind.IMPEDANCE, "backing_rx", (face_rx, GROUND), stack.backing_rx
            )
        )
    else:
        branches.append(
            Branch(BranchKind.VOLTAGE_SOURCE, "backing_rx", (face_rx, GROUND), 0j)
        )

    # Source (Thevenin) and load on the transducer electrical ports.
    tx_port = "n_1_e"
    rx_port = f"n_{stack.num_layers}_e"
    source_node = None
    if drive.source_impedance != 0:
        source_node = "n_src"
        branches.append(
            Branch(
                BranchKind.VOLTAGE_SOURCE,
                "src",
                (source_node, GROUND),
                drive.source_voltage,
            )
        )
        branches.append(
            Branch(
                BranchKind.IMPEDANCE,
                "src_z",
                (source_node, tx_port),
                drive.source_impedance,
            )
        )
    else:
        branches.append(
            Branch(
                BranchKind.VOLTAGE_SOURCE, "src", (tx_port, GROUND), drive.source_voltage
            )
        )
    if drive.load_impedance != 0:
        branches.append(
            Branch(
                BranchKind.IMPEDANCE, "load", (rx_port, GROUND), drive.load_impedance
            )
        )
    else:
        branches.append(
            Branch(BranchKind.VOLTAGE_SOURCE, "load", (rx_port, GROUND), 0j)
        )

    info = _BuildInfo(
        stages=tuple(stages),
        tx_backing_branch=tx_anchor,
        source_branch="src",
        source_node=source_node,
        load_branch="load",
        tx_port=tx_port,
        rx_port=rx_port,
    )
    return Network(branches=branches), info


def build_equivalent_network(
    stack: Stack, omega: float, drive: DriveCondition
) -> Network:
    """Mason equivalent network of the full stack at one frequency.

    See the module docstring for the stage topology and the resonance
    fallback.  Branch values are realized at ``omega``.
    """
    network, _ = _build_network(stack, omega, drive)
    return network


def terminated_layer_network(
    layer: Layer, omega: float, z_left: complex, z_right: complex
) -> Network:
    """Single passive layer T-network closed by two termination impedances.

    Useful as a minimal structural fixture; terminations must be nonzero.
    """
    if z_left == 0 or z_right == 0:
        raise DomainError("terminations must be nonzero impedances")
    terms = _layer_terms(layer, omega)
    za, x12, _ = _t_stage_values(terms)
    left, mid, right = "n_1_l", "n_1_m", "n_1_r"
    return Network(
        branches=[
            Branch(BranchKind.IMPEDANCE, "term_l", (left, GROUND), complex(z_left)),
            Branch(BranchKind.IMPEDANCE, "arm_l_1", (left, mid), za),
            Branch(BranchKind.IMPEDANCE, "shunt_1", (mid, GROUND), x12),
            Branch(BranchKind.IMPEDANCE, "arm_r_1", (mid, right), za),
            Branch(BranchKind.IMPEDANCE, "term_r", (right, GROUND), complex(z_right)),
        ]
    )


# ----------------------------------------------------------------------
# Cross-check against the transfer-matrix solver
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PortQuantities:
    """Electrical ports and interface velocities extracted from a solution."""

    u1: complex
    i1: complex
    u2: complex
    i2: complex
    velocities: tuple[complex, ...]


def network_port_quantities(
    stack: Stack,
    drive: DriveCondition,
    solution: MnaSolution,
    info: _BuildInfo,
    omega: float,
) -> PortQuantities:
    """Read the stack observables off a solved equivalent network.

    Interface velocities telescope from the driver face: the anchor is the
    backing branch current, and each stage subtracts its shunt current
    (computed through the shunt admittance, which never diverges).
    """
    u1 = solution.voltage(info.tx_port)
    u2 = solution.voltage(info.rx_port)
    if info.source_node is not None:
        i1 = (solution.voltage(info.source_node) - u1) / drive.source_impedance
    else:
        i1 = -solution.source_current(info.source_branch)
    if drive.load_impedance != 0:
        i2 = -u2 / drive.load_impedance
    else:
        i2 = -solution.source_current(info.load_branch)

    if info.tx_backing_branch is not None:
        v = -solution.source_current(info.tx_backing_branch)
    else:
        v = -solution.voltage(interface_node(1)) / stack.backing_tx
    velocities = [v]
    for stage in info.stages:
        if stage.kind == "transformer":
            v = stage.ratio * v
        else:
            a, b = stage.shunt_nodes
            shunt_current = (
                solution.voltage(a) - solution.voltage(b)
            ) * stage.shunt_admittance
            v = v - shunt_current
        velocities.append(v)
    return PortQuantities(
        u1=u1, i1=i1, u2=u2, i2=i2, velocities=tuple(velocities)
    )


@dataclass(frozen=True)
class CrossCheck:
    """Per-quantity relative deviations between the two solution paths."""

    deviations: dict[str, float]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values())


def _relative(a: complex, b: complex, floor: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)


def cross_check(
    stack: Stack,
    omega: float,
    drive: DriveCondition,
    *,
    _corrupt_sign: bool = False,
) -> CrossCheck:
    """Compare transfer-matrix and equivalent-network solutions.

    Deviations are relative per quantity, with a floor of 1e-6 times the
    largest magnitude in the quantity's group (voltages, currents,
    velocities) so that incidental nulls do not register as false alarms.

    ``_corrupt_sign`` flips the receiver transformer polarity in the
    network before solving; it exists as a fault-injection hook for
    negative-control tests and must stay False in real use.
    """
    op = solve_operating_point(stack, omega, drive)
    network, info = _build_network(stack, omega, drive)
    if _corrupt_sign:
        name = f"xfmr_{stack.num_layers}"
        network.branches = [
            replace(b, value=-b.value) if b.name == name else b
            for b in network.branches
        ]
    solution = mna_solve(network, omega)
    ports = network_port_quantities(stack, drive, solution, info, omega)

    volt_floor = 1e-6 * max(abs(op.u1), abs(op.u2), 1e-294)
    amp_floor = 1e-6 * max(abs(op.i1), abs(op.i2), 1e-294)
    vel_floor = 1e-6 * max(max(abs(v) for v in op.velocities), 1e-294)
    deviations = {
        "u1": _relative(op.u1, ports.u1, volt_floor),
        "i1": _relative(op.i1, ports.i1, amp_floor),
        "u2": _relative(op.u2, ports.u2, volt_floor),
        "i2": _relative(op.i2, ports.i2, amp_floor),
    }
    for index, (a, b) in enumerate(zip(op.velocities, ports.velocities), start=1):
        deviations[f"v{index}"] = _relative(a, b, vel_floor)
    return CrossCheck(deviations=deviations)
