"""Thevenin extraction, load optimization, quarter-wave design, peaks."""

import math

import numpy as np
import pytest

from aptsim import (
    DriveCondition,
    Layer,
    PiezoLayer,
    Stack,
    SweepGrid,
    design_matching_layer,
    find_resonances,
    frequency_sweep,
    optimal_load,
    thevenin_at_output,
)
from aptsim.acoustics import characteristic_impedance, piezo_clamped_capacitance
from aptsim.errors import DomainError, NonDissipativeOutput
from aptsim.matching import (
    EfficiencyOptimum,
    load_power,
    optimal_load_for_efficiency,
    predicted_load_power,
    slab_power_transmission,
)
from aptsim.solver import SweepResult, SweepRow

from conftest import AREA, glue, pzt, random_stack, regular_frequency, steel


class TestThevenin:
    def test_uncoupled_receiver_has_no_emf(self, omega, drive):
        stack = Stack([pzt(), glue(), steel(), glue(), pzt(h=0.0)])
        thev = thevenin_at_output(stack, omega, drive)
        assert thev.v_th == 0.0

    def test_uncoupled_receiver_output_is_clamped_capacitance(self, omega, drive):
        dead = pzt(h=0.0)
        stack = Stack([pzt(), glue(), steel(), glue(), dead])
        thev = thevenin_at_output(stack, omega, drive)
        c0 = piezo_clamped_capacitance(dead)
        assert thev.z_th == pytest.approx(1.0 / (1j * omega * c0), rel=1e-9)

    def test_predicted_power_matches_direct_solves(self, lossy_stack, drive, omega):
        thev = thevenin_at_output(lossy_stack, omega, drive)
        rng = np.random.default_rng(17)
        for _ in range(10):
            z = complex(10.0 ** rng.uniform(0.0, 3.0), rng.uniform(-300.0, 300.0))
            direct = load_power(lossy_stack, omega, drive, z)
            predicted = predicted_load_power(thev, z)
            assert abs(predicted - direct) <= 1e-9 * max(direct, 1e-300)

    def test_dissipative_output_has_positive_real_part(self, drive):
        rng = np.random.default_rng(23)
        for _ in range(5):
            stack = random_stack(rng)
            omega = 2.0 * math.pi * regular_frequency(rng, stack)
            thev = thevenin_at_output(stack, omega, drive)
            assert thev.z_th.real > 0.0


class TestOptimalLoad:
    def test_conjugate_match_values(self, lossy_stack, drive, omega):
        thev = thevenin_at_output(lossy_stack, omega, drive)
        result = optimal_load(lossy_stack, omega, drive)
        assert result.z_opt == thev.z_th.conjugate()
        assert result.p_max == pytest.approx(
            abs(thev.v_th) ** 2 / (8.0 * thev.z_th.real), rel=1e-12
        )

    def test_direct_solve_reproduces_p_max(self, lossy_stack, drive, omega):
        result = optimal_load(lossy_stack, omega, drive)
        direct = load_power(lossy_stack, omega, drive, result.z_opt)
        assert direct == pytest.approx(result.p_max, rel=1e-9)

    def test_surrounding_grid_never_beats_optimum(self, lossy_stack, drive, omega):
        result = optimal_load(lossy_stack, omega, drive)
        r0 = result.z_opt.real
        for re in np.linspace(0.25 * r0, 3.0 * r0, 11):
            for im in result.z_opt.imag + np.linspace(-2.0 * r0, 2.0 * r0, 11):
                p = load_power(lossy_stack, omega, drive, complex(re, im))
                assert p <= result.p_max * (1.0 + 1e-12)

    def test_grid_search_argmax_agrees(self, drive, omega):
        stack = Stack([pzt(), glue(), steel(), glue(), pzt()])
        result = optimal_load(stack, omega, drive)
        r0 = result.z_opt.real
        res = np.linspace(0.5 * r0, 1.5 * r0, 21)
        ims = result.z_opt.imag + np.linspace(-r0, r0, 21)
        grid = [
            (load_power(stack, omega, drive, complex(re, im)), re, im)
            for re in res
            for im in ims
        ]
        _, best_re, best_im = max(grid)
        step_re = res[1] - res[0]
        step_im = ims[1] - ims[0]
        assert abs(best_re - r0) <= step_re
        assert abs(best_im - result.z_opt.imag) <= step_im

    def test_lossless_free_stack_has_no_optimum(self, lossless_stack, drive, omega):
        with pytest.raises(NonDissipativeOutput):
            optimal_load(lossless_stack, omega, drive)

    def test_simple_conjugate_examples(self):
        # Pure resistive and complex-conjugate cases straight from the
        # analytic formulas.
        assert (50 + 0j).conjugate() == 50 + 0j
        v_th, z_th = 1.0, 50.0 + 0j
        assert abs(v_th) ** 2 / (8.0 * z_th.real) == pytest.approx(1.0 / 400.0)
        assert (50 - 30j).conjugate() == 50 + 30j


class TestEfficiencyObjective:
    def test_efficiency_optimum_beats_power_optimum_on_efficiency(self, omega):
        stack = Stack([pzt(), glue(), steel(), glue(), pzt()], backing_tx=2e3)
        drive = DriveCondition(
            source_voltage=1.0, source_impedance=30.0, load_impedance=50.0
        )
        power_opt = optimal_load(stack, omega, drive)
        eff_opt = optimal_load_for_efficiency(stack, omega, drive, phase_points=21)
        assert isinstance(eff_opt, EfficiencyOptimum)
        assert 0.0 < eff_opt.efficiency <= 1.0

        def efficiency_at(z):
            from aptsim.solver import power_flow, solve_operating_point

            loaded = drive.with_load(z)
            op = solve_operating_point(stack, omega, loaded)
            pw = power_flow(op, stack, loaded)
            return pw.p_load / pw.p_in

        assert eff_opt.efficiency >= efficiency_at(power_opt.z_opt) - 1e-12
        # And the power optimum delivers at least as much power.
        assert power_opt.p_max >= eff_opt.p_load * (1.0 - 1e-12)


class TestMatchingLayer:
    def test_degenerate_equal_media(self):
        layer = design_matching_layer(2.5, 2.5, 1e6, 1500.0)
        assert characteristic_impedance(layer).real == pytest.approx(2.5, rel=1e-12)

    def test_geometric_mean(self):
        layer = design_matching_layer(1.0, 4.0, 1e6, 1500.0)
        assert characteristic_impedance(layer).real == pytest.approx(2.0, rel=1e-12)
        assert layer.thickness == pytest.approx(1500.0 / 4e6, rel=1e-12)

    def test_quarter_wave_transmission(self):
        layer = design_matching_layer(1.0, 4.0, 1e6, 1500.0)
        assert slab_power_transmission(layer, 1.0, 4.0, 1e6) >= 1.0 - 1e-9

    def test_steel_to_pzt_interface_peak(self):
        z_steel = AREA * 7850.0 * 5900.0
        z_pzt = AREA * 7500.0 * 4600.0
        layer = design_matching_layer(z_steel, z_pzt, 1e6, 1500.0, area=AREA)
        assert slab_power_transmission(layer, z_steel, z_pzt, 1e6) >= 1.0 - 1e-9
        frequencies = np.linspace(0.5e6, 1.5e6, 501)
        transmissions = [
            slab_power_transmission(layer, z_steel, z_pzt, f) for f in frequencies
        ]
        best = frequencies[int(np.argmax(transmissions))]
        assert abs(best - 1e6) <= frequencies[1] - frequencies[0]

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            design_matching_layer(-1.0, 4.0, 1e6, 1500.0)
        with pytest.raises(DomainError):
            design_matching_layer(1.0, 0.0, 1e6, 1500.0)


def _sweep_from_efficiencies(values):
    rows = tuple(
        SweepRow(
            frequency_hz=1e6 + 1e3 * i,
            z_in=1.0 + 0j,
            p_in_w=1.0,
            p_load_w=v,
            p_backing_w=0.0,
            efficiency=v,
        )
        for i, v in enumerate(values)
    )
    return SweepResult(rows=rows)


class TestFindResonances:
    def test_monotone_sweep_has_none(self):
        sweep = _sweep_from_efficiencies([0.1, 0.2, 0.3, 0.4, 0.5])
        assert find_resonances(sweep) == []

    def test_single_interior_peak(self):
        sweep = _sweep_from_efficiencies([0.1, 0.5, 0.2])
        peaks = find_resonances(sweep)
        assert len(peaks) == 1
        assert peaks[0].frequency_hz == pytest.approx(1.001e6)
        assert peaks[0].efficiency == pytest.approx(0.5)

    def test_endpoints_excluded(self):
        sweep = _sweep_from_efficiencies([0.9, 0.1, 0.2, 0.1, 0.8])
        peaks = find_resonances(sweep)
        assert len(peaks) == 1
        assert peaks[0].efficiency == pytest.approx(0.2)

    def test_requires_three_rows(self):
        with pytest.raises(DomainError):
            find_resonances(_sweep_from_efficiencies([0.1, 0.2]))

    def test_half_wave_wall_peak_location(self, drive):
        wall = steel(loss=0.0)
        comb = wall.sound_speed / (2.0 * wall.thickness)
        f_star = 21 * comb
        probe = pzt(0.0, thickness=5e-7)
        stack = Stack([probe, wall, probe], backing_tx=5e3, backing_rx=5e3)
        grid = SweepGrid(f_star - comb / 2.0, f_star + comb / 2.0, 601)
        sweep = frequency_sweep(stack, grid, drive)
        peaks = find_resonances(sweep)
        assert len(peaks) >= 1
        step = (grid.f_max - grid.f_min) / (grid.points - 1)
        nearest = min(peaks, key=lambda p: abs(p.frequency_hz - f_star))
        assert abs(nearest.frequency_hz - f_star) <= step
