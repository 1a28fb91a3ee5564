"""Publication-style figures rendered from laboratory CSV outputs."""

__version__ = "0.1.0"

from .errors import PlotsError, SchemaMismatch
from .figures import OUT_SUFFIXES, SCHEMAS, FigureSpec, build_figure, load_table, render

__all__ = [
    "OUT_SUFFIXES",
    "SCHEMAS",
    "FigureSpec",
    "PlotsError",
    "SchemaMismatch",
    "__version__",
    "build_figure",
    "load_table",
    "render",
]
