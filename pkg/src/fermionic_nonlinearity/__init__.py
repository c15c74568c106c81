"""Fermionic nonlinearity of noisy non-Gaussian gates and quasiprobability simulation."""

__version__ = "0.1.0"
