"""Error taxonomy for the figure renderer.

Every failure the command-line tool can hit maps to PlotsError, which
the driver converts to a nonzero exit status.  SchemaMismatch marks the
specific case of a CSV whose header or rows do not match the figure
kind's expected columns.
"""

from __future__ import annotations


class PlotsError(ValueError):
    """Any input problem the renderer refuses to work around."""


class SchemaMismatch(PlotsError):
    """CSV header or row shape differs from the figure kind's schema."""
