"""Exception hierarchy shared by all eis-kit modules.

The CLI maps these onto process exit codes: configuration problems exit
with 2, data/schema problems with 3, and numerical failures with 4.
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class EisKitError(Exception):
    """Base class for all eis-kit specific errors."""

    exit_code = EXIT_CONFIG


class ConfigurationError(EisKitError):
    """Invalid configuration: bad parameter combination, unknown preset,
    non-coherent frequency, missing required option."""

    exit_code = EXIT_CONFIG


class SchemaError(EisKitError):
    """Malformed or incompatible data file (CSV/JSON schema mismatch)."""

    exit_code = EXIT_DATA


class NumericalError(EisKitError):
    """Numerical failure: underflow, degenerate input, non-convergence."""

    exit_code = EXIT_NUMERIC


class MeasurementUnderflowError(NumericalError):
    """Measured DFT bin magnitude below the usable numeric floor."""


class FitFailureError(NumericalError):
    """Model estimation failed to converge; carries optimizer diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class UndefinedAcfError(NumericalError):
    """Autocorrelation undefined (zero-variance input series)."""
