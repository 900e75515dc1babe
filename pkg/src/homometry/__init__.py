"""Diffraction, autocorrelation and entropy of weighted Dirac combs."""
