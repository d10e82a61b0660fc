"""Fourier-extension collocation on irregular planar domains."""
