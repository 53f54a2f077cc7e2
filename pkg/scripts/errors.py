#!/usr/bin/env python3
"""
Error types

Every failure the command line can report maps to one exception class, and each
class carries the exit code the CLI returns for it.
"""

from typing import Optional


class FeynmanPDEError(Exception):
    exit_code = 1


class FormatError(FeynmanPDEError):
    """A diagram, operator or point document is malformed."""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class DiagramError(FeynmanPDEError):
    """The diagram, a chi subset or an invariant basis is invalid."""

    exit_code = 2


class RegimeError(FeynmanPDEError):
    """The exponents N - (D/2)(h+1) and N - (D/2)h are outside the integer regime."""

    exit_code = 4


class CertificationError(FeynmanPDEError):
    """An operator pair does not annihilate the integral.

    `residual` is the polynomial that could not be matched, `label` names the pair.
    """

    exit_code = 5

    def __init__(self, message: str, residual=None, label: Optional[str] = None):
        self.residual = residual
        self.label = label
        super().__init__(message)


class NumericError(FeynmanPDEError):
    """A numeric evaluation cannot be carried out as configured."""

    exit_code = 6


class PoleError(NumericError):
    """Q vanishes or changes sign on the integration simplex."""
