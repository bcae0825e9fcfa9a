"""Split-step Fourier solver for the logarithmic Schrodinger equation."""

__version__ = "0.1.0"
