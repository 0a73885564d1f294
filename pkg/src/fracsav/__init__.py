"""SAV time stepping for the time-fractional Allen-Cahn equation."""

__version__ = "0.1.0"
