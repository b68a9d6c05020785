"""Hydrogen direct-reduction ironmaking flowsheet simulator."""

__version__ = "0.1.0"
