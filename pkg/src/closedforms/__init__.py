"""Closed and exact functions on the lattice Fock space, at finite truncation."""
from .multiindex import MultiIndex, cone_point, decode, dot_action, encode, orbit, representative, shift
from .hermite import HermiteExpansion
from .field import BUILTIN_FIELDS, CoefficientField, VectorField
from .transport import LatticeFunction, PreconditionError

__all__ = [
    "BUILTIN_FIELDS", "CoefficientField", "HermiteExpansion", "LatticeFunction", "MultiIndex",
    "PreconditionError", "VectorField", "cone_point", "decode", "dot_action", "encode", "orbit",
    "representative", "shift",
]
