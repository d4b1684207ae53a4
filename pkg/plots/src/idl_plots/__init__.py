"""Figure generation for inviscid-damping-lab CSV outputs."""

__version__ = "0.1.0"

from .figures import FigureSpec, SchemaError, render  # noqa: F401
