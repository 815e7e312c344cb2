"""
Core subpackage of Frobenius Lab.

Lattices, sup-preserving maps, quantales, Frobenius witnesses and the theorem
sweep, together with logging, configuration and caching helpers.
"""
from frobenius_lab.core.lattice import Lattice, enumerate_lattices, make_family, parse_family
from frobenius_lab.core.quantale import Quantale, search_frobenius, verify_frobenius
from frobenius_lab.core.sweep import theorem_sweep


__all__ = [
    'Lattice',
    'Quantale',
    'enumerate_lattices',
    'make_family',
    'parse_family',
    'search_frobenius',
    'theorem_sweep',
    'verify_frobenius',
]
