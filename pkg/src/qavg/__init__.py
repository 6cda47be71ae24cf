"""Discrete Fourier analysis of quadric averaging operators over F_q^d."""
