# engine/errors.py
# -----------------------------------------------------------------------------
# Exception hierarchy for the q-series engine.
#
# Everything derives from FibcfgError, itself a ValueError, so callers that only
# care about "bad input" can keep catching ValueError.
# -----------------------------------------------------------------------------

from __future__ import annotations


class FibcfgError(ValueError):
    """Base class for every engine error."""


class NegativeQExponent(FibcfgError):
    """A polynomial with q^{<0} terms was turned into a power series."""


class WindowUnderflow(FibcfgError):
    """A z-exponent outside the window where a series is known exactly."""


class TruncationError(FibcfgError):
    """A q-exponent above the truncation order (or below zero) was read."""


class CapExceeded(FibcfgError):
    """An exhaustive enumeration was asked for more than its cap allows."""


class BadTheta(FibcfgError):
    """theta outside [0, l], or a negative separation l."""


class BadModuleIndex(FibcfgError):
    """Module index i outside [0, N), or N < 1."""


class InvalidConfiguration(FibcfgError):
    """A configuration violates the separation rule or its vacuum constraints."""


class InvalidPartition(FibcfgError):
    """Parts are not a weakly decreasing sequence of positive integers."""


class StabilizationError(FibcfgError):
    """A finite approximation failed to stabilize at the requested order."""
