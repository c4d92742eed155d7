"""Numerics for GUE eigenvalue fluctuations.

Submodules
----------
special_functions
    Weighted Hermite functions, Airy function, large-n Hermite asymptotics.
semicircle
    Semicircle law, eigenvalue standardizations, limit covariances.
kernel
    Hermite kernel, expected counts and number variances.
airy_identities
    Closed-form Airy tail integrals and their quadrature oracle.
sampler
    Dense and tridiagonal GUE samplers, Hermite zeros, uniform order statistics.
fluctuation_lab
    Monte Carlo experiments for the eigenvalue central limit theorems.
cli
    The ``guefluct`` command.
"""

__version__ = "0.1.0"
