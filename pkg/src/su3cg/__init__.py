"""Exact SU(3) Clebsch-Gordan coefficients in the occupation basis."""
from .exact import ExactReal, HalfInt

__version__ = "0.1.0"
