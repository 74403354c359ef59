"""Temperature as a photon-maintained steady state, as executable physics."""

__version__ = "0.1.0"
