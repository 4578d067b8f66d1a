"""Figure regeneration from opfeast CLI artifacts.

Everything here consumes the solver's serialized outputs (CSV series, result
JSON, Chebyshev-coefficient function dumps); nothing numerical is computed.
"""

__version__ = "0.1.0"

from .render import FigureJob, render

__all__ = ["FigureJob", "render", "__version__"]
