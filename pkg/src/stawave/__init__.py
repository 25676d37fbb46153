"""Spacetime-algebra wave functions: Cl(1,3) arithmetic, canonical forms,
field calculus, the geometric Dirac equation and two-beam interference."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    G0, G1, G2, G3, GAMMA, I, ONE, ZERO, CayleyTable, Multivector, TABLE, exp_even,
    geometric_product, grade_involution, grade_project, inner_product, outer_product,
    parity_split, phase_rotor, reverse,
)
from .canonical import CanonicalForm, from_canonical, to_canonical, validate_rotor  # noqa: E402

__all__ = [
    "__version__", "G0", "G1", "G2", "G3", "GAMMA", "I", "ONE", "ZERO", "CayleyTable",
    "Multivector", "TABLE", "exp_even", "geometric_product", "grade_involution",
    "grade_project", "inner_product", "outer_product", "parity_split", "phase_rotor",
    "reverse", "CanonicalForm", "from_canonical", "to_canonical", "validate_rotor",
]
