"""Exception types shared across modules.

The CLI maps these onto exit codes: parse/config problems exit 2, a failed
measurement assertion exits 3, resource guards exit 4.
"""

from __future__ import annotations


class NucsimError(Exception):
    """Base class for package errors."""


class QasmError(NucsimError):
    """Syntax or semantic error in OpenQASM input, with source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class MmaStructureError(NucsimError):
    """Circuit violates the measurement-assertion layout preconditions."""


class FilterAssertionError(NucsimError):
    """A mid-circuit assertion found (almost) no amplitude on |0>."""

    def __init__(self, step: int, prob: float):
        super().__init__(f"assertion failed at step {step}: P(|0>) = {prob:.3e}")
        self.step = step
        self.prob = prob


class ProjectionError(NucsimError):
    """Projection onto a measurement outcome with (near-)zero probability."""


class ResourceLimitError(NucsimError):
    """Requested dense/exact operation exceeds its documented size guard."""


class DegenerateSpectrumError(NucsimError):
    """Spectrum has no second distinct eigenvalue, so no gap exists."""


class SpectrumGuardError(NucsimError):
    """Eigenvalues fall outside the window required by the cosine filter."""
