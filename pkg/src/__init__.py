"""Precond-HQ - preconditioned alternating minimization for half-quadratic image models"""

__version__ = "0.1.0"
