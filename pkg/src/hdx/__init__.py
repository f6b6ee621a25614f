"""Cochain calculus on 2-dimensional polygonal complexes with symmetric-group
coefficients under the normalized Hamming metric.

Submodules:
    perm        symmetric-group elements and the Hamming-with-errors metric
    complexes   polygonal complexes, measures, generators, JSON i/o
    cochain     0/1-cochains, coboundary maps, norms, exact distance searches
    covering    the cocycle <-> covering dictionary and cocycle enumeration
    cheeger     Cheeger constants and cosystoles with brute-force oracles
    spectral    weighted adjacency spectra, links, local-to-global bounds
    correction  filling search and constructive correction algorithms
    cli         the ``hdx`` command line entry point
"""

__version__ = "0.1.0"
