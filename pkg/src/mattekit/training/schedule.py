"""Polynomial learning-rate decay."""

from ..errors import RangeError


def poly_lr(iteration, total_iters, lr0=0.01, power=0.9):
    """lr0 * (1 - iteration/total_iters) ** power.

    Exactly lr0 at iteration 0 and exactly 0 at iteration == total_iters.
    """
    if total_iters <= 0:
        raise RangeError(f"total_iters must be positive, got {total_iters}")
    if iteration < 0 or iteration > total_iters:
        raise RangeError(
            f"iteration {iteration} outside [0, {total_iters}]")
    return lr0 * (1.0 - iteration / total_iters) ** power
