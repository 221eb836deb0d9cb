"""Variational RBF binary classifier trained by Levenberg-Marquardt."""

__version__ = "0.1.0"
