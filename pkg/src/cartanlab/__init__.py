"""Contact symmetries, Hamilton-Jacobi maps and Magnus perturbation theory."""

__version__ = "0.1.0"
