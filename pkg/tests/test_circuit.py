"""Mason network construction, MNA solving, and the cross-check oracle."""

import math

import numpy as np
import pytest

from aptsim import DriveCondition, Layer, PiezoLayer, Stack
from aptsim.circuit import (
    Branch,
    BranchKind,
    Network,
    _build_network,
    build_equivalent_network,
    cross_check,
    kcl_residual,
    mna_solve,
    network_port_quantities,
    power_audit,
    tellegen_residual,
    terminated_layer_network,
)
from aptsim.errors import SingularNetwork
from aptsim.solver import solve_operating_point

from conftest import AREA, glue, pzt, random_stack, regular_frequency, steel


def impedance(name, a, b, z):
    return Branch(BranchKind.IMPEDANCE, name, (a, b), z)


def vsource(name, a, b, v):
    return Branch(BranchKind.VOLTAGE_SOURCE, name, (a, b), v)


class TestMnaSolve:
    def test_voltage_divider(self):
        net = Network(
            branches=[
                vsource("src", "a", "0", 1.0),
                impedance("z1", "a", "mid", 100.0),
                impedance("z2", "mid", "0", 100.0),
            ]
        )
        sol = mna_solve(net, omega=1.0)
        assert sol.voltage("mid") == pytest.approx(0.5)

    def test_single_impedance_current(self):
        net = Network(
            branches=[
                vsource("src", "a", "0", 1.0),
                impedance("z", "a", "0", 2.0),
            ]
        )
        sol = mna_solve(net, omega=1.0)
        # Source current leaves the + terminal through the source.
        assert sol.source_current("src") == pytest.approx(-0.5)

    def test_rc_divider_at_corner_frequency(self):
        r = 1000.0
        c = 1e-9
        omega = 1.0 / (r * c)
        net = Network(
            branches=[
                vsource("src", "a", "0", 1.0),
                impedance("r", "a", "mid", r),
                impedance("c", "mid", "0", 1.0 / (1j * omega * c)),
            ]
        )
        sol = mna_solve(net, omega)
        assert abs(sol.voltage("mid")) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)

    def test_current_source(self):
        net = Network(
            branches=[
                Branch(BranchKind.CURRENT_SOURCE, "inj", ("0", "a"), 2.0),
                impedance("r", "a", "0", 10.0),
            ]
        )
        sol = mna_solve(net, 1.0)
        assert sol.voltage("a") == pytest.approx(20.0)

    def test_ideal_transformer_scales_voltage_and_current(self):
        # 1 V source on the primary, 4:1 load reflection through a 1:2
        # transformer: secondary voltage doubles, primary current is
        # ratio^2 / R.
        net = Network(
            branches=[
                vsource("src", "p", "0", 1.0),
                Branch(
                    BranchKind.IDEAL_TRANSFORMER, "t", ("p", "0", "s", "0"), 2.0
                ),
                impedance("r", "s", "0", 100.0),
            ]
        )
        sol = mna_solve(net, 1.0)
        assert sol.voltage("s") == pytest.approx(2.0)
        assert sol.branch_currents["t.primary"] == pytest.approx(0.04)
        assert sol.branch_currents["t.secondary"] == pytest.approx(-0.02)

    def test_negative_capacitance_realization(self):
        # -C0 in series with +2*C0: net impedance j/(2*omega*C0), so the
        # midpoint sits at -1 V for a 1 V drive (textbook negative-C
        # voltage overshoot).
        omega = 1e6
        c0 = 1e-9
        net = Network(
            branches=[
                vsource("src", "a", "0", 1.0),
                Branch(BranchKind.NEGATIVE_CAPACITANCE, "nc", ("a", "mid"), c0),
                impedance("c", "mid", "0", 1.0 / (1j * omega * 2.0 * c0)),
            ]
        )
        sol = mna_solve(net, omega)
        assert sol.voltage("mid") == pytest.approx(-1.0, rel=1e-12)
        assert abs(sol.source_current("src")) == pytest.approx(
            2.0 * omega * c0, rel=1e-12
        )

    def test_floating_subcircuit_rejected(self):
        net = Network(
            branches=[
                vsource("src", "a", "0", 1.0),
                impedance("z", "a", "0", 2.0),
                impedance("lonely", "x", "y", 5.0),
            ]
        )
        with pytest.raises(SingularNetwork):
            mna_solve(net, 1.0)

    def test_empty_network_rejected(self):
        with pytest.raises(SingularNetwork):
            mna_solve(Network(branches=[]), 1.0)


class TestBuilderStructure:
    def test_terminated_single_layer_counts(self, omega):
        net = terminated_layer_network(glue(0.0), omega, 100.0, 200.0)
        assert len(net.nodes) == 4  # two faces, midpoint, ground
        assert len(net.branches) == 5  # two terminations, two arms, shunt

    def test_uncoupled_piezo_decouples(self, omega, drive):
        dead = pzt(h=0.0)
        stack = Stack([dead, glue(), steel(), glue(), pzt()])
        net = build_equivalent_network(stack, omega, drive)
        ratio = next(b for b in net.branches if b.name == "xfmr_1")
        assert ratio.value == 0.0
        sol = mna_solve(net, omega)
        # Mechanical side is fully quiet: every interface force is zero.
        for node in ("n_1_l", "n_1_r", "n_2_r", "n_3_r", "n_4_r", "n_5_r"):
            assert abs(sol.voltage(node)) < 1e-15

    def test_five_layer_stage_counts(self, lossy_stack, drive, omega):
        # Documented ladder: passive stage = 3 branches (two arms, shunt);
        # piezo stage = 6 (arms, shunt, transformer, -C0, C0); plus two
        # backings, source, load.
        net = build_equivalent_network(lossy_stack, omega, drive)
        assert len(net.branches) == 2 * 6 + 3 * 3 + 4
        kinds = [b.kind for b in net.branches]
        assert kinds.count(BranchKind.IDEAL_TRANSFORMER) == 2
        assert kinds.count(BranchKind.NEGATIVE_CAPACITANCE) == 2
        # 3 V-source branches: the drive plus two zero-backing anchors.
        assert kinds.count(BranchKind.VOLTAGE_SOURCE) == 3

    def test_resonant_passive_stage_becomes_transformer(self, drive):
        wall = steel(loss=0.0, thickness=10e-3)
        stack = Stack([pzt(0.0), glue(0.0), wall, glue(0.0), pzt(0.0)])
        omega = 2.0 * math.pi * wall.sound_speed / (2.0 * wall.thickness)
        net = build_equivalent_network(stack, omega, drive)
        stage = next(b for b in net.branches if b.name == "stage_3")
        assert stage.kind is BranchKind.IDEAL_TRANSFORMER
        assert stage.value == -1.0
        # The fallback stays faithful to the stack solver.
        result = cross_check(stack, omega, drive)
        assert result.max_deviation < 1e-8


class TestNetworkInvariants:
    def test_energy_audit_and_tellegen(self, lossy_stack, drive, omega):
        net, _ = _build_network(lossy_stack, omega, drive)
        sol = mna_solve(net, omega)
        audit = power_audit(net, sol, omega)
        assert audit.mismatch < 1e-10
        assert tellegen_residual(net, sol, omega) < 1e-10
        assert kcl_residual(net, sol, omega) < 1e-10

    def test_audits_on_random_stacks(self, drive):
        rng = np.random.default_rng(21)
        for _ in range(8):
            stack = random_stack(rng)
            omega = 2.0 * math.pi * regular_frequency(rng, stack)
            net, _ = _build_network(stack, omega, drive)
            sol = mna_solve(net, omega)
            assert power_audit(net, sol, omega).mismatch < 1e-10
            assert tellegen_residual(net, sol, omega) < 1e-10


class TestCrossCheck:
    def test_lossless_three_layer(self, drive):
        stack = Stack([pzt(0.0), steel(0.0), pzt(0.0)])
        omega = 2.0 * math.pi * 1.03e6
        assert cross_check(stack, omega, drive).max_deviation < 1e-8

    def test_lossy_five_layer(self, lossy_stack, drive, omega):
        assert cross_check(lossy_stack, omega, drive).max_deviation < 1e-8

    def test_with_backings_and_source_impedance(self, omega):
        stack = Stack(
            [pzt(), glue(), steel(), glue(), pzt()],
            backing_tx=1.5e3,
            backing_rx=4e3,
        )
        drive = DriveCondition(
            source_voltage=2.0 - 1.0j,
            source_impedance=25.0 + 10.0j,
            load_impedance=60.0 - 20.0j,
        )
        assert cross_check(stack, omega, drive).max_deviation < 1e-8

    def test_corrupted_sign_is_detected(self, lossy_stack, drive, omega):
        result = cross_check(lossy_stack, omega, drive, _corrupt_sign=True)
        assert result.max_deviation > 1e-3

    def test_randomized_equivalence(self, drive):
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(10):
            stack = random_stack(rng)
            for _ in range(5):
                omega = 2.0 * math.pi * regular_frequency(rng, stack)
                worst = max(worst, cross_check(stack, omega, drive).max_deviation)
        assert worst < 1e-8

    def test_port_quantities_match_velocity_count(self, lossy_stack, drive, omega):
        net, info = _build_network(lossy_stack, omega, drive)
        sol = mna_solve(net, omega)
        ports = network_port_quantities(lossy_stack, drive, sol, info, omega)
        assert len(ports.velocities) == lossy_stack.num_interfaces
