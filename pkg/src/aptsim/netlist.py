"""SPICE-compatible netlist export and own-dialect import.

The emitted document is classic card syntax: a title line, element cards,
one ``.AC`` analysis card, and ``.END``.  The circuit is the same Mason
ladder that :mod:`aptsim.circuit` builds directly:

* every lossless layer becomes a lossless transmission-line card
  ``TL<j> <left> <ret> <right> <ret> Z0=... TD=...`` whose return terminal
  ``<ret>`` is ground for passive slabs and the transducer rail node for
  piezoelectric plates (the rail is lifted by the transformer secondary,
  which reproduces the three-impedance form exactly);
* each piezoelectric electrical port carries a C0 capacitor card, a
  negative-valued capacitor card (flagged by a comment; some simulators
  reject negative capacitances, and an option omits them in the
  KLM-style simplified form, clearly marked as nonstandard), and an ideal
  transformer realized as the classic coupled controlled-source pair
  (VCVS + CCCS + 0 V sense source);
* backings, source, and load become R/L/C and V-source cards; zero
  impedances are aliased to ground at emission.

Node names follow the scheme ``n_<layer>_<face>`` with faces ``l``
(stack front), ``r`` (right face of a layer), ``m`` (T midpoint), ``rail``,
``st`` (sense tap), ``ei`` (inner electrical node), ``e`` (electrical
port); the ground node is ``0`` and the source's internal node ``n_src``.

Lossy layers cannot ride on lossless line cards; by default they are
refused.  With ``lossy_lines`` enabled each lossy layer is emitted as the
lumped R + reactance synthesis of its T-network at the analysis frequency,
exact there and approximate elsewhere (a comment card says so).

``import_netlist`` parses exactly this dialect back into a
:class:`~aptsim.circuit.Network`, realizing frequency-dependent cards at
the frequency of the ``.AC`` card, so an exported document round-trips to
a network that solves identically to the directly built one.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

from .circuit import GROUND, Branch, BranchKind, Network, interface_node
from .errors import ParseError, UnknownCard, UnsupportedLossyLayer
from .layers import PiezoLayer
from .acoustics import piezo_clamped_capacitance
from .solver import _layer_terms
from .stack import DriveCondition, Stack

#: T-line expansion falls back to an ideal +/-1 transformer below this |sin|.
FALLBACK_TOLERANCE = 1e-9


def _fmt(value: float) -> str:
    return f"{value:.15e}"


@dataclass(frozen=True)
class NetlistOptions:
    lossy_lines: bool = False
    omit_negative_capacitance: bool = False


@dataclass(frozen=True)
class NetlistDocument:
    """Netlist text, one card per line, deterministic for a given stack."""

    lines: tuple[str, ...]

    @property
    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    @property
    def title(self) -> str:
        return self.lines[0]

    def __str__(self) -> str:
        return self.text


def _impedance_cards(
    lines: list[str],
    stem: str,
    node_a: str,
    node_b: str,
    z: complex,
    omega: float,
) -> None:
    """Emit an R / L / C realization of a complex impedance at ``omega``."""
    re_part, im_part = z.real, z.imag
    if re_part == 0.0 and im_part == 0.0:
        raise ValueError("zero impedance must be aliased, not emitted")
    first, second = node_a, node_b
    if re_part != 0.0 and im_part != 0.0:
        joint = f"{node_a}_{stem.lower()}x"
        lines.append(f"R{stem} {node_a} {joint} {_fmt(re_part)}")
        first = joint
    elif re_part != 0.0:
        lines.append(f"R{stem} {node_a} {node_b} {_fmt(re_part)}")
        return
    if im_part > 0.0:
        lines.append(f"L{stem} {first} {second} {_fmt(im_part / omega)}")
    else:
        lines.append(f"C{stem} {first} {second} {_fmt(-1.0 / (omega * im_part))}")


def export_netlist(
    stack: Stack,
    f_center: float,
    options: NetlistOptions | None = None,
    drive: DriveCondition | None = None,
) -> NetlistDocument:
    """Emit the stack's Mason equivalent circuit as a netlist document.

    Identical stacks produce byte-identical documents.  ``drive`` supplies
    the source and load cards; it defaults to a 1 V ideal source with a
    50 ohm load.

    Raises:
        UnsupportedLossyLayer: a layer has loss and ``options.lossy_lines``
            is False.
    """
    options = options or NetlistOptions()
    drive = drive or DriveCondition()
    omega = 2.0 * math.pi * f_center
    for index, layer in enumerate(stack.layers):
        if layer.loss_tangent > 0.0 and not options.lossy_lines:
            raise UnsupportedLossyLayer(
                f"layer {index} has loss_tangent {layer.loss_tangent!r}; "
                "lossless transmission-line cards cannot carry loss "
                "(enable lossy_lines for a lumped fit at f_center)"
            )

    lines: list[str] = [
        f"aptsim equivalent circuit: {stack.num_layers}-layer stack",
        "* exported by aptsim netlist writer; SI units throughout",
        "* node scheme: n_<layer>_<face>, ground = 0",
    ]

    zero_tx = stack.backing_tx == 0
    zero_rx = stack.backing_rx == 0

    def iface(i: int) -> str:
        if i == 1 and zero_tx:
            return GROUND
        if i == stack.num_interfaces and zero_rx:
            return GROUND
        return interface_node(i)

    for j, layer in enumerate(stack.layers, start=1):
        left, right = iface(j), iface(j + 1)
        piezo = isinstance(layer, PiezoLayer)
        ratio = 0.0
        c0 = 0.0
        if piezo:
            c0 = piezo_clamped_capacitance(layer)
            ratio = layer.h_coupling * c0
        ret = f"n_{j}_rail" if ratio != 0.0 else GROUND

        if layer.loss_tangent == 0.0:
            z0 = layer.area * layer.density * layer.sound_speed
            delay = layer.thickness / layer.sound_speed
            lines.append(
                f"TL{j} {left} {ret} {right} {ret} Z0={_fmt(z0)} TD={_fmt(delay)}"
            )
        else:
            lines.append(
                f"* layer {j} is lossy: lumped T fitted at the .AC frequency"
            )
            terms = _layer_terms(layer, omega)
            x12 = terms.z / (1j * terms.sin)
            za = x12 * (terms.cos - 1.0)
            mid = f"n_{j}_m"
            _impedance_cards(lines, f"A{j}L", left, mid, za, omega)
            _impedance_cards(lines, f"A{j}R", mid, right, za, omega)
            _impedance_cards(lines, f"S{j}", mid, ret, x12, omega)

        if piezo:
            port = f"n_{j}_e"
            if ratio != 0.0:
                tap = f"n_{j}_st"
                inner = f"n_{j}_ei"
                lines.append(f"VT{j} {ret} {tap} 0")
                lines.append(f"ET{j} {tap} {GROUND} {inner} {GROUND} {_fmt(ratio)}")
                lines.append(f"FT{j} {inner} {GROUND} VT{j} {_fmt(ratio)}")
                if options.omit_negative_capacitance:
                    lines.append(
                        "* negative capacitance omitted (KLM-style "
                        "simplification; nonstandard relative to the full "
                        "Mason network)"
                    )
                    lines.append(f"RJ{j} {port} {inner} {_fmt(0.0)}")
                else:
                    lines.append(
                        "* next card is the Mason negative capacitance; "
                        "some simulators reject negative values"
                    )
                    lines.append(f"CN{j} {port} {inner} {_fmt(-c0)}")
            lines.append(f"C0{j} {port} {GROUND} {_fmt(c0)}")

    if not zero_tx:
        _impedance_cards(lines, "BT", interface_node(1), GROUND, stack.backing_tx, omega)
    if not zero_rx:
        _impedance_cards(
            lines, "BR", interface_node(stack.num_interfaces), GROUND,
            stack.backing_rx, omega,
        )

    tx_port = "n_1_e"
    mag = abs(drive.source_voltage)
    phase = math.degrees(cmath.phase(drive.source_voltage))
    if drive.source_impedance != 0:
        lines.append(f"VSRC n_src {GROUND} AC {_fmt(mag)} {_fmt(phase)}")
        _impedance_cards(lines, "SRC", "n_src", tx_port, drive.source_impedance, omega)
    else:
        lines.append(f"VSRC {tx_port} {GROUND} AC {_fmt(mag)} {_fmt(phase)}")
    rx_port = f"n_{stack.num_layers}_e"
    if drive.load_impedance != 0:
        _impedance_cards(lines, "LD", rx_port, GROUND, drive.load_impedance, omega)
    else:
        lines.append(f"VLD {rx_port} {GROUND} 0")

    lines.append(f".AC LIN 1 {_fmt(f_center)} {_fmt(f_center)}")
    lines.append(".END")
    return NetlistDocument(lines=tuple(lines))


# ----------------------------------------------------------------------
# Import
# ----------------------------------------------------------------------

_TL_RE = re.compile(
    r"^TL(?P<index>\d+)\s+(?P<a1>\S+)\s+(?P<a2>\S+)\s+(?P<b1>\S+)\s+(?P<b2>\S+)"
    r"\s+Z0=(?P<z0>\S+)\s+TD=(?P<td>\S+)\s*$",
    re.IGNORECASE,
)


@dataclass
class _Card:
    line_no: int
    text: str
    tokens: list[str]

    @property
    def name(self) -> str:
        return self.tokens[0]


def _parse_float(card: _Card, token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"bad numeric value {token!r}", card.line_no) from None


def import_netlist(text: str) -> Network:
    """Parse a document produced by :func:`export_netlist` into a Network.

    Only the emitted dialect subset is understood.  Frequency-dependent
    cards (capacitors, inductors, transmission lines) are realized at the
    frequency named by the ``.AC`` card, so solving the returned network
    at that frequency reproduces the exported circuit.

    Raises:
        ParseError: malformed documents, with the offending line number.
        UnknownCard: cards outside the emitted subset.
    """
    raw_lines = text.splitlines()
    if not any(line.strip() for line in raw_lines):
        raise ParseError("empty netlist document")

    cards: list[_Card] = []
    f_center = None
    saw_end = False
    for line_no, raw in enumerate(raw_lines, start=1):
        stripped = raw.strip()
        if line_no == 1 or not stripped or stripped.startswith("*"):
            continue
        if saw_end:
            raise ParseError("content after .END", line_no)
        upper = stripped.upper()
        if upper == ".END":
            saw_end = True
            continue
        if upper.startswith(".AC"):
            tokens = stripped.split()
            if len(tokens) != 5:
                raise ParseError(".AC card needs LIN, count, start, stop", line_no)
            f_center = float(tokens[3])
            continue
        if stripped.startswith("."):
            raise UnknownCard(f"unsupported dot card {stripped.split()[0]}", line_no)
        cards.append(_Card(line_no=line_no, text=stripped, tokens=stripped.split()))
    if not saw_end:
        raise ParseError("missing .END terminator")
    if f_center is None:
        raise ParseError("missing .AC analysis card")
    if not cards:
        raise ParseError("no element cards before .END")
    omega = 2.0 * math.pi * f_center

    branches: list[Branch] = []
    senses: dict[str, _Card] = {}
    vcvs: dict[str, _Card] = {}
    cccs: dict[str, _Card] = {}

    for card in cards:
        kind = card.name[0].upper()
        if kind == "T":
            match = _TL_RE.match(card.text)
            if match is None:
                raise ParseError("malformed transmission-line card", card.line_no)
            if match["a2"] != match["b2"]:
                raise UnknownCard(
                    "transmission-line cards must share a return terminal",
                    card.line_no,
                )
            branches.extend(
                _expand_line(
                    match["index"],
                    match["a1"],
                    match["b1"],
                    match["a2"],
                    float(match["z0"]),
                    float(match["td"]),
                    omega,
                )
            )
        elif kind == "C":
            if len(card.tokens) != 4:
                raise ParseError("capacitor card needs 2 nodes and a value", card.line_no)
            value = _parse_float(card, card.tokens[3])
            nodes = (card.tokens[1], card.tokens[2])
            name = _branch_name(card.name)
            if value < 0.0:
                branches.append(
                    Branch(BranchKind.NEGATIVE_CAPACITANCE, name, nodes, -value)
                )
            else:
                branches.append(
                    Branch(
                        BranchKind.IMPEDANCE, name, nodes, 1.0 / (1j * omega * value)
                    )
                )
        elif kind == "R":
            if len(card.tokens) != 4:
                raise ParseError("resistor card needs 2 nodes and a value", card.line_no)
            value = _parse_float(card, card.tokens[3])
            nodes = (card.tokens[1], card.tokens[2])
            if value == 0.0:
                branches.append(
                    Branch(BranchKind.VOLTAGE_SOURCE, _branch_name(card.name), nodes, 0j)
                )
            else:
                branches.append(
                    Branch(BranchKind.IMPEDANCE, _branch_name(card.name), nodes, value)
                )
        elif kind == "L":
            if len(card.tokens) != 4:
                raise ParseError("inductor card needs 2 nodes and a value", card.line_no)
            value = _parse_float(card, card.tokens[3])
            branches.append(
                Branch(
                    BranchKind.IMPEDANCE,
                    _branch_name(card.name),
                    (card.tokens[1], card.tokens[2]),
                    1j * omega * value,
                )
            )
        elif kind == "V":
            if card.name.upper().startswith("VT"):
                senses[card.name.upper()[2:]] = card
            elif len(card.tokens) == 6 and card.tokens[3].upper() == "AC":
                mag = _parse_float(card, card.tokens[4])
                phase = math.radians(_parse_float(card, card.tokens[5]))
                branches.append(
                    Branch(
                        BranchKind.VOLTAGE_SOURCE,
                        _branch_name(card.name),
                        (card.tokens[1], card.tokens[2]),
                        mag * cmath.exp(1j * phase),
                    )
                )
            elif len(card.tokens) == 4:
                branches.append(
                    Branch(
                        BranchKind.VOLTAGE_SOURCE,
                        _branch_name(card.name),
                        (card.tokens[1], card.tokens[2]),
                        complex(_parse_float(card, card.tokens[3])),
                    )
                )
            else:
                raise ParseError("malformed voltage-source card", card.line_no)
        elif kind == "E":
            if not card.name.upper().startswith("ET") or len(card.tokens) != 6:
                raise UnknownCard(
                    "only the transformer VCVS pattern is supported", card.line_no
                )
            vcvs[card.name.upper()[2:]] = card
        elif kind == "F":
            if not card.name.upper().startswith("FT") or len(card.tokens) != 5:
                raise UnknownCard(
                    "only the transformer CCCS pattern is supported", card.line_no
                )
            cccs[card.name.upper()[2:]] = card
        else:
            raise UnknownCard(f"unsupported card {card.name!r}", card.line_no)

    for stem, e_card in vcvs.items():
        v_card = senses.get(stem)
        f_card = cccs.get(stem)
        if v_card is None or f_card is None:
            raise ParseError(
                f"transformer {stem}: expected matching VT/ET/FT cards",
                e_card.line_no,
            )
        ratio = _parse_float(e_card, e_card.tokens[5])
        gain = _parse_float(f_card, f_card.tokens[4])
        if not math.isclose(ratio, gain, rel_tol=1e-12):
            raise ParseError(
                f"transformer {stem}: VCVS ratio and CCCS gain differ",
                f_card.line_no,
            )
        if f_card.tokens[3].upper() != f"VT{stem}":
            raise ParseError(
                f"transformer {stem}: CCCS must sense VT{stem}", f_card.line_no
            )
        rail = v_card.tokens[1]
        if v_card.tokens[2] != e_card.tokens[1]:
            raise ParseError(
                f"transformer {stem}: sense source must feed the VCVS",
                v_card.line_no,
            )
        primary = (e_card.tokens[3], e_card.tokens[4])
        secondary = (rail, e_card.tokens[2])
        branches.append(
            Branch(
                BranchKind.IDEAL_TRANSFORMER,
                f"xfmr_{stem}",
                primary + secondary,
                ratio,
            )
        )
    for stem, card in {**senses, **cccs}.items():
        if stem not in vcvs:
            raise ParseError(
                f"transformer {stem}: incomplete controlled-source pair",
                card.line_no,
            )

    _check_node_references(cards)
    return Network(branches=branches)


def _branch_name(card_name: str) -> str:
    mapping = {"CN": "ncap_", "C0": "c0_"}
    prefix = card_name[:2].upper()
    if prefix in mapping and card_name[2:].isdigit():
        return mapping[prefix] + card_name[2:]
    return card_name


def _expand_line(
    index: str,
    left: str,
    right: str,
    ret: str,
    z0: float,
    delay: float,
    omega: float,
) -> list[Branch]:
    """Realize a lossless line card as its exact T-network at ``omega``."""
    theta = omega * delay
    sin = math.sin(theta)
    cos = math.cos(theta)
    if abs(sin) < FALLBACK_TOLERANCE and ret == GROUND:
        ratio = -1.0 if cos < 0 else 1.0
        return [
            Branch(
                BranchKind.IDEAL_TRANSFORMER,
                f"stage_{index}",
                (left, GROUND, right, GROUND),
                ratio,
            )
        ]
    if abs(sin) < FALLBACK_TOLERANCE:
        ctheta = theta - 1e-9j
        x12 = z0 / (1j * cmath.sin(ctheta))
        za = x12 * (cmath.cos(ctheta) - 1.0)
    else:
        x12 = z0 / (1j * sin)
        za = x12 * (cos - 1.0)
    mid = f"n_{index}_m"
    return [
        Branch(BranchKind.IMPEDANCE, f"arm_l_{index}", (left, mid), za),
        Branch(BranchKind.IMPEDANCE, f"arm_r_{index}", (mid, right), za),
        Branch(BranchKind.IMPEDANCE, f"shunt_{index}", (mid, ret), x12),
    ]


def _check_node_references(cards: list[_Card]) -> None:
    """Every node must appear in at least two cards or be ground."""
    counts: dict[str, set[int]] = {}
    for card in cards:
        kind = card.name[0].upper()
        if kind in ("T",):
            nodes = card.tokens[1:5]
        elif kind in ("C", "R", "L", "E"):
            nodes = card.tokens[1:3] + (card.tokens[3:5] if kind == "E" else [])
        elif kind in ("V", "F"):
            nodes = card.tokens[1:3]
        else:
            nodes = []
        for node in nodes:
            counts.setdefault(node, set()).add(card.line_no)
    for node, lines in sorted(counts.items()):
        if node != GROUND and len(lines) < 2:
            raise ParseError(
                f"node {node!r} is referenced by only one card", min(lines)
            )
