"""Exact local data for Lagrangian intersections: Maslov forms, orientation torsors,
monodromy/RH dictionary, singularity spectra and chart-gluing bookkeeping."""

from .errors import DtcalcError
from .parser import parse_poly
from .poly import Poly
from .scalar import Scalar, parse_scalar

__all__ = ["DtcalcError", "Poly", "Scalar", "parse_poly", "parse_scalar"]
