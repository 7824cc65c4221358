"""The surface language: syntax, parser and type system."""
from .checker import (INPUT_TYPE, SurfaceTypeError, default_context, surface_precision,
                      typecheck_surface)
from .parser import ParseError, parse, parse_type
from .syntax import annotation_sites, erode, number_blames, render

__all__ = ["parse", "parse_type", "ParseError", "typecheck_surface", "SurfaceTypeError",
           "surface_precision", "default_context", "INPUT_TYPE", "render", "erode",
           "annotation_sites", "number_blames"]
