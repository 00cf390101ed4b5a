"""Approximation rates of cosine and ReLU^k ridge networks on spectral Barron spaces.

Submodules
----------
targets      test functions with analytic Fourier transforms
lattice      smooth cutoffs and shifted-lattice Fourier expansions
cosine_net   greedy cosine networks and exact orthogonal error norms
splines      cardinal B-splines, quasi-interpolation, multiscale expansion
reluk_net    ridge-atom dictionaries, atom selection, ReLU^k networks
oracles      quadrature, free-knot and uniform-grid reference fits
harness      configuration, rate prediction, sweeps and CSV output
"""
from .errors import ConfigError, NumericalError, ParameterError, RidgeRateError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "ConfigError", "NumericalError", "ParameterError", "RidgeRateError", "__version__"]
