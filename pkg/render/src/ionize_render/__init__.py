"""Static figure rendering for ionize sweep outputs."""

from .spec import FigureSpec, RenderError, SchemaError
from .figures import KINDS, build_figure, render

__all__ = ["FigureSpec", "RenderError", "SchemaError", "KINDS",
           "build_figure", "render"]
__version__ = "1.0.0"
