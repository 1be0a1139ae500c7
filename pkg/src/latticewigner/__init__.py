"""Wigner quasi-probability function for a particle on an infinite 1-D lattice."""
