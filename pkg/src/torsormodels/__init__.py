"""Maximal integral models of torsors under order-p group schemes over F_q((t))."""

__version__ = "0.1.0"
