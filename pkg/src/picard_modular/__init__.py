"""Exact computations for the Picard modular group over the Eisenstein integers.

Submodules: ``exactfield`` (arithmetic in Q(zeta_36)), ``matrices``,
``chgeom`` (complex hyperbolic geometry), ``group`` (words, generators,
classification), ``isotropy`` (finite groups and presentations), ``polytope``
(the fundamental polyhedron), ``handles`` (the handle decomposition) and
``cli``.
"""

__version__ = "0.1.0"
