"""Simulated projective-measurement tomography of one- and two-qubit states,
with maximum-likelihood reconstruction by simulated annealing."""

__version__ = "0.1.0"
