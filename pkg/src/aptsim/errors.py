"""Exception hierarchy shared by all aptsim modules."""


class AptSimError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AptSimError, ValueError):
    """An argument is outside the physical domain of an operation."""


class LayerResonanceSingularity(AptSimError):
    """The impedance form of a layer two-port is numerically meaningless.

    Impedance-matrix entries scale as 1/sin(k*d) and 1/tan(k*d); within
    1e-9 of a lossless thickness resonance (k*d = n*pi) they blow up.
    The chain (ABCD) form is analytic everywhere and should be used by
    anything that has to solve through a resonance.
    """


class SolveError(AptSimError):
    """A linear system could not be solved to the required accuracy."""


class ZeroCurrent(AptSimError):
    """Port current is numerically zero; impedance is undefined."""


class ZeroInputPower(AptSimError):
    """Input power is not positive; efficiency is undefined."""


class NonDissipativeOutput(AptSimError):
    """Receiver output impedance has no positive real part to match."""


class SingularNetwork(AptSimError):
    """The nodal-analysis matrix of a circuit network is singular."""


class UnsupportedLossyLayer(AptSimError):
    """Lossless transmission-line cards cannot represent a lossy layer."""


class ParseError(AptSimError):
    """A netlist document could not be parsed.

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownCard(ParseError):
    """A netlist card is outside the emitted dialect subset."""


class ConfigError(AptSimError):
    """A configuration document is invalid.

    ``field_path`` points at the offending entry, e.g. ``layer[2].thickness_m``.
    """

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")
