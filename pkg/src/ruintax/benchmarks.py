"""Built-in benchmark parameter grids for the two ruin approximations.

Grid 1 exercises the finite-horizon approximation over both signs of the
force of interest; grid 2 exercises the infinite-horizon approximation
(positive force of interest only).  The CLI ``table`` subcommand evaluates
them; the rows are (u, c, sigma, delta, T, gamma) tuples.
"""

from __future__ import annotations

FINITE_GRID = [
    # (u, c, sigma, delta, T, gamma)
    (5.0, 0.1, 1.0, 0.05, 20.0, 0.1),
    (5.0, 0.1, 1.0, 0.05, 20.0, 0.2),
    (5.0, 0.1, 1.0, -0.05, 20.0, 0.2),
    (5.0, 0.1, 1.0, 0.07, 20.0, 0.1),
    (5.0, 0.1, 1.0, 0.07, 30.0, 0.2),
    (5.0, 0.1, 1.0, -0.07, 30.0, 0.2),
    (5.0, 0.1, 1.0, 0.10, 20.0, 0.1),
    (5.0, 0.1, 1.0, 0.10, 30.0, 0.2),
    (5.0, 0.1, 1.0, -0.10, 30.0, 0.2),
    (4.0, 0.1, 1.0, 0.10, 20.0, 0.1),
    (4.0, 0.1, 1.0, 0.10, 30.0, 0.2),
    (4.0, 0.1, 1.0, -0.10, 30.0, 0.2),
]

INFINITE_GRID = [
    # (u, c, sigma, delta, gamma)
    (5.0, 0.1, 1.0, 0.05, 0.1),
    (5.0, 0.1, 1.0, 0.05, 0.2),
    (5.0, 0.1, 1.0, 0.07, 0.1),
    (5.0, 0.1, 1.0, 0.07, 0.2),
    (5.0, 0.1, 1.0, 0.10, 0.1),
    (5.0, 0.1, 1.0, 0.10, 0.2),
    (4.0, 0.1, 1.0, 0.10, 0.1),
    (4.0, 0.1, 1.0, 0.10, 0.2),
]
