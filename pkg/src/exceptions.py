"""Custom exceptions for the half-quadratic solvers."""

from typing import Any, Dict, Optional


class PrecondHQError(Exception):
    """Base exception for solver, grid and image errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class GridError(PrecondHQError, ValueError):
    """Invalid grid shape, non-finite entries or mismatched field shapes."""
    pass


class StencilError(PrecondHQError, ValueError):
    """Invalid stencil coefficients or a stencil too large to materialize."""
    pass


class SolverBreakdownError(PrecondHQError):
    """Conjugate gradients met a direction of non-positive curvature."""
    pass


class SingularSystemError(PrecondHQError):
    """Dense factorization of a stencil matrix failed."""
    pass


class EnergyIncreaseError(PrecondHQError):
    """The objective increased between two outer iterations."""

    def __init__(self, iteration: int, previous: float, new: float):
        self.iteration = iteration
        self.previous = previous
        self.new = new
        super().__init__(
            f"Energy increased at outer iteration {iteration}: {previous!r} -> {new!r}",
            {"iteration": iteration, "previous": previous, "new": new},
        )


class InsufficientDataError(PrecondHQError, ValueError):
    """Too few usable points to fit a convergence rate."""
    pass


class ImageFormatError(PrecondHQError, ValueError):
    """Malformed or unsupported image file."""
    pass
