"""Elliptic units, theta functions and Soule-character tests for CM fields of class number one."""
from .quadfield import (
    FieldContext,
    InertPrime,
    NotDivisible,
    QuadInt,
    RamifiedPrime,
    SplitPrime,
    UnsupportedField,
    exact_divide,
    make_field,
    residue_transversal,
    split_prime,
)
from .padic import frobenius_generates_test, hensel_embed, i_power, purely_local_test
from .analytic import PrecisionContext, make_lattice, theta_a, torsion_points, wp

__version__ = "0.1.0"

__all__ = [
    "FieldContext", "InertPrime", "NotDivisible", "QuadInt", "RamifiedPrime", "SplitPrime",
    "UnsupportedField", "exact_divide", "make_field", "residue_transversal", "split_prime",
    "frobenius_generates_test", "hensel_embed", "i_power", "purely_local_test",
    "PrecisionContext", "make_lattice", "theta_a", "torsion_points", "wp", "__version__",
]
