"""Correspondence engine for intuitionistic modal logic over birelational frames."""

__version__ = "0.1.0"
