"""Fountain codes over GF(q): LT and random linear encoders, peeling and
Gaussian-elimination decoders, degree distributions and a Monte Carlo
failure-rate simulator."""

from .gf import FieldSpec, FieldError, field_new

__version__ = "0.1.0"

__all__ = ["FieldSpec", "FieldError", "field_new", "__version__"]
