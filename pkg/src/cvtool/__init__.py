"""Commuting varieties of nilpotent radicals of Borel subalgebras.

Exact root-system models, B-orbit classification over finite fields,
degeneration certificates for irreducible components, point-count censuses,
and the Witt algebra chain in characteristic p.
"""

__version__ = "0.1.0"
