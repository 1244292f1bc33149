"""Forecast late-career WAR from a player's first six seasons."""

__version__ = "0.1.0"
