"""Exception types shared across the package.

Every error carries a stable ``code`` so the command line can map it to an
exit status and a machine-readable prefix.
"""

from __future__ import annotations


class PantoError(Exception):
    code = "error"


class InputError(PantoError):
    """Malformed input data (schema or syntax)."""

    code = "parse"


class CurveNotInternal(PantoError):
    code = "curve"


class MoveNotApplicable(PantoError):
    code = "move"


class InvalidPath(PantoError):
    code = "path"


class PathEndpointMismatch(PantoError):
    code = "endpoint"


class UnbalancedEndBehavior(PantoError):
    code = "ends"


class ZeroShiftEnd(PantoError):
    code = "ends"


class SupportMismatch(PantoError):
    code = "support"


class CurveOutsideWindow(PantoError):
    code = "window"


class NonTerminatingOrbit(PantoError):
    """A curve orbit that never flips: a reducing line or a periodic curve."""

    code = "reducible"

    def __init__(self, message: str, witness: object = None) -> None:
        super().__init__(message)
        self.witness = witness


class InvariantViolation(PantoError):
    code = "invariant"


class EmptyProjection(PantoError):
    code = "projection"


class ConventionViolation(PantoError):
    code = "convention"


class OrbitEscapedWindow(PantoError):
    code = "window"
