"""mcdescent: exact deformation-theory calculus.

Maurer-Cartan and gauge computations for nilpotent differential graded Lie
algebras over exact rationals, Thom-Whitney totalisation of semicosimplicial
dgLas, descent of Deligne groupoids, and a deformation pipeline for morphisms
of complexes over finite-dimensional algebras.
"""

__version__ = "0.1.0"

from .ratio import Q, rat

__all__ = ["Q", "rat", "__version__"]
