"""Exception types shared across the package.

Decoding outcomes that are part of normal operation (an ambiguous
syndrome, a missing table entry, an inverter miss) are *values*, see
:class:`samplable_ecc.decoders.Outcome`; only contract violations raise.
"""


class SamplableEccError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SamplableEccError, ValueError):
    pass


class RankDeficient(SamplableEccError, ValueError):
    pass


class RecFailure(SamplableEccError):
    """A syndrome recoverer declined to produce an error vector."""

    def __init__(self, syndrome, reason="no recovery"):
        super().__init__(f"recoverer failed on syndrome {syndrome}: {reason}")
        self.syndrome = syndrome
        self.reason = reason


class DuplicateSupport(SamplableEccError, ValueError):
    pass


class LengthMismatch(SamplableEccError, ValueError):
    pass


class NotInjective(SamplableEccError, ValueError):
    pass


class DependentBasis(SamplableEccError, ValueError):
    pass


class EntropyTooLarge(SamplableEccError, ValueError):
    pass


class ParameterError(SamplableEccError, ValueError):
    pass


class FormatError(SamplableEccError, ValueError):
    """Malformed text serialization."""


class NotACorrector(SamplableEccError):
    pass


class VerdictMismatch(SamplableEccError):
    pass


class SimulationStuck(SamplableEccError):
    """A replayed coder asked something the description cannot answer."""


class ConfigError(SamplableEccError, ValueError):
    def __init__(self, message, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
