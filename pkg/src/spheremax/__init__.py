"""Numerics for discrete spherical averages on Z^d.

Exact lattice-sphere counts, Gauss sums and the singular series, the
circle-method decomposition of the spherical multiplier, spherical Fourier
transforms, Krawtchouk polynomials and periodic-box maximal experiments.
"""

__version__ = "0.1.0"
