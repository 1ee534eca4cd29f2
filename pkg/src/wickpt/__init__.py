"""Non-Hermitian laser models with tilted mirrors: spectra and nonlinear dynamics."""

from .lattice import Grid, MirrorProfile, QuarticDoubleWell, SquireWell, assemble_hamiltonian, build_grid

__all__ = ["Grid", "MirrorProfile", "QuarticDoubleWell", "SquireWell", "assemble_hamiltonian", "build_grid"]
