"""Spectral laws of sums of Haar unitary and orthogonal matrices.

Two independent routes to the same limiting objects: Monte Carlo over
sampled matrix ensembles, and an analytic free-convolution recursion on
Stieltjes transforms, cross-validated against closed-form densities and
combined into a Brown-measure reconstruction of the planar eigenvalue law.
"""

__version__ = "0.1.0"
