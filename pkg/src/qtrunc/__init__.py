"""Exact verification of truncated q-series identities.

Submodules: ``exactpoly`` (Laurent polynomials and rational functions over Q),
``qcomb`` (q-Pochhammer symbols, Gaussian binomials), ``qseries`` (truncated
power series), ``catalog`` (registered identities), ``multisum`` (multiple
sums and their recurrences), ``qdsl`` (expression language) and ``cli``.
"""

__version__ = "0.1.0"
