"""Exact-arithmetic laboratory for weighted toroidal boundary combinatorics.

Subpackages cover sparse exact linear algebra, cochain complexes and
spectral sequences, cone complexes of boundary strata, weight functions,
toric divisor cohomology, multigraded logarithmic local models, monodromy
weight filtrations, and weighted tropical cohomology.
"""

__version__ = "0.1.0"
