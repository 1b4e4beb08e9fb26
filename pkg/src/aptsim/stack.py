"""Stack and drive descriptions for the transducer / wall / transducer chain.

A :class:`Stack` is an ordered sequence of slabs whose first and last
members are piezoelectric plates (the driver and the receiver).  The outer
faces radiate into configurable backing impedances; a backing of 0 models a
free (air-loaded) face, which is a very good approximation next to solids.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import DomainError
from .layers import Layer, PiezoLayer


@dataclass(frozen=True)
class Stack:
    """Ordered layer sequence with backing terminations.

    Attributes:
        layers: at least three slabs; exactly the first and last must be
            :class:`PiezoLayer` instances, and all slabs must share the
            same cross-section area.
        backing_tx: mechanical termination impedance behind the driver
            (N*s/m, Re >= 0; 0 means a free face).
        backing_rx: same for the face behind the receiver.
    """

    layers: tuple[Layer, ...]
    backing_tx: complex = 0j
    backing_rx: complex = 0j

    def __init__(
        self,
        layers: Sequence[Layer],
        backing_tx: complex = 0j,
        backing_rx: complex = 0j,
    ):
        object.__setattr__(self, "layers", tuple(layers))
        object.__setattr__(self, "backing_tx", complex(backing_tx))
        object.__setattr__(self, "backing_rx", complex(backing_rx))
        self._validate()

    def _validate(self) -> None:
        if len(self.layers) < 3:
            raise DomainError(
                f"a stack needs at least 3 layers, got {len(self.layers)}"
            )
        for index, layer in enumerate(self.layers):
            is_edge = index in (0, len(self.layers) - 1)
            if is_edge and not isinstance(layer, PiezoLayer):
                raise DomainError(
                    f"layer {index} must be piezoelectric (driver/receiver)"
                )
            if not is_edge and isinstance(layer, PiezoLayer):
                raise DomainError(
                    f"layer {index} must be passive; only the first and "
                    "last layers are transducers"
                )
        area = self.layers[0].area
        for index, layer in enumerate(self.layers):
            if abs(layer.area - area) > 1e-9 * area:
                raise DomainError(
                    f"layer {index} area {layer.area!r} differs from the "
                    f"stack area {area!r}; the cross-section must be uniform"
                )
        for name, value in (
            ("backing_tx", self.backing_tx),
            ("backing_rx", self.backing_rx),
        ):
            if value.real < 0.0:
                raise DomainError(f"{name} must have Re >= 0, got {value!r}")

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @property
    def num_interfaces(self) -> int:
        return len(self.layers) + 1

    @property
    def area(self) -> float:
        return self.layers[0].area

    @property
    def tx(self) -> PiezoLayer:
        """Driver plate (first layer)."""
        return self.layers[0]  # type: ignore[return-value]

    @property
    def rx(self) -> PiezoLayer:
        """Receiver plate (last layer)."""
        return self.layers[-1]  # type: ignore[return-value]

    def reversed(self) -> "Stack":
        """Mirror image of the stack: layer order and backings swapped."""
        return Stack(
            layers=tuple(reversed(self.layers)),
            backing_tx=self.backing_rx,
            backing_rx=self.backing_tx,
        )


@dataclass(frozen=True)
class DriveCondition:
    """Thevenin source on the driver port and load on the receiver port.

    Attributes:
        source_voltage: open-circuit source voltage (V); must be nonzero
            for a nontrivial solve.
        source_impedance: series source impedance (ohm, Re >= 0; default 0,
            an ideal voltage source).
        load_impedance: receiver load (ohm, Re >= 0; purely reactive loads
            are allowed but deliver no average power).
    """

    source_voltage: complex = 1.0 + 0j
    source_impedance: complex = 0j
    load_impedance: complex = 50.0 + 0j

    def __post_init__(self):
        object.__setattr__(self, "source_voltage", complex(self.source_voltage))
        object.__setattr__(self, "source_impedance", complex(self.source_impedance))
        object.__setattr__(self, "load_impedance", complex(self.load_impedance))
        if self.source_impedance.real < 0.0:
            raise DomainError(
                f"source_impedance must have Re >= 0, got {self.source_impedance!r}"
            )
        if self.load_impedance.real < 0.0:
            raise DomainError(
                f"load_impedance must have Re >= 0, got {self.load_impedance!r}"
            )

    def with_load(self, load_impedance: complex) -> "DriveCondition":
        return replace(self, load_impedance=complex(load_impedance))
