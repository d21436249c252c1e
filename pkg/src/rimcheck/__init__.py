"""Decide whether simple modules of a block sit at the end of their stable
Auslander-Reiten components, from Cartan/decomposition data and group facts."""

__version__ = "0.1.0"
