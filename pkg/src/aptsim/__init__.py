"""aptsim: 1-D acoustic power transfer through layered solids.

A piezoelectric driver, interfacing layers, a solid wall, and a
piezoelectric receiver form a one-dimensional stack.  The package solves
the stack in the frequency domain along two independent routes (a
transfer-matrix formulation and a Mason equivalent-circuit network solved
by modified nodal analysis), computes power flow and efficiency, optimizes
the receiver load, and exports SPICE netlists of the equivalent circuit.
"""

__version__ = "0.1.0"

from .layers import Layer, PiezoLayer
from .stack import DriveCondition, Stack
from .acoustics import (
    chain_matrix,
    characteristic_impedance,
    passive_layer_matrix,
    piezo_block_matrix,
    piezo_clamped_capacitance,
    wavenumber,
)
from .solver import (
    OperatingPoint,
    PowerFlow,
    SweepGrid,
    SweepResult,
    assemble_system,
    efficiency,
    frequency_sweep,
    input_impedance,
    power_flow,
    solve_operating_point,
)
from .circuit import Network, build_equivalent_network, cross_check, mna_solve
from .matching import (
    TheveninEquivalent,
    design_matching_layer,
    find_resonances,
    optimal_load,
    thevenin_at_output,
)
from .netlist import NetlistDocument, NetlistOptions, export_netlist, import_netlist

__all__ = [
    "Layer",
    "PiezoLayer",
    "Stack",
    "DriveCondition",
    "wavenumber",
    "characteristic_impedance",
    "passive_layer_matrix",
    "chain_matrix",
    "piezo_clamped_capacitance",
    "piezo_block_matrix",
    "assemble_system",
    "solve_operating_point",
    "input_impedance",
    "power_flow",
    "efficiency",
    "frequency_sweep",
    "OperatingPoint",
    "PowerFlow",
    "SweepGrid",
    "SweepResult",
    "Network",
    "build_equivalent_network",
    "mna_solve",
    "cross_check",
    "TheveninEquivalent",
    "thevenin_at_output",
    "optimal_load",
    "design_matching_layer",
    "find_resonances",
    "NetlistDocument",
    "NetlistOptions",
    "export_netlist",
    "import_netlist",
    "__version__",
]
