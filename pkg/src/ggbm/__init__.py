"""Generalized grey Brownian motion and time-changed Brownian motion.

Special functions, exact samplers, dyadic-grid paths, p-variation statistics,
a path classifier separating the two processes, SDE solvers driven by either,
and a seeded experiment runner.
"""

__version__ = "0.1.0"
