"""Deterministic quasi-random points in the unit ball of C^n.

Sobol points are mapped to the ball with the radius correction
``r = u**(1/(2n))`` so that they are uniform in volume; directions come from
the Gaussian inverse CDF of the remaining coordinates. Everything takes an
explicit seed so that sup estimates are reproducible.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import norm as _gauss
from scipy.stats import qmc

from .ball_geometry import as_cvec, orthogonal_basis

__all__ = [
    "boundary_biased",
    "dilation_samples",
    "near_vertex",
    "sobol_ball",
    "sobol_unit",
]

DEFAULT_SEED = 20240101


def sobol_unit(dim: int, m: int, seed: int | None = DEFAULT_SEED) -> np.ndarray:
    """First ``m`` points of a scrambled Sobol sequence in ``(0,1)^dim``."""
    if m < 1:
        raise ValueError("need at least one sample")
    engine = qmc.Sobol(d=dim, scramble=True, seed=seed)
    u = engine.random_base2(int(np.ceil(np.log2(m))))[:m]
    return np.clip(u, 1e-12, 1 - 1e-12)


def _directions(u: np.ndarray, n: int) -> np.ndarray:
    g = _gauss.ppf(u[:, : 2 * n])
    z = g[:, :n] + 1j * g[:, n:]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sobol_ball(n: int, m: int, seed: int | None = DEFAULT_SEED, radius: float = 1.0) -> np.ndarray:
    """``m`` volume-uniform points of the ball of the given radius in C^n."""
    u = sobol_unit(2 * n + 1, m, seed)
    r = radius * u[:, -1] ** (1.0 / (2 * n))
    return _directions(u, n) * r[:, None]


def boundary_biased(n: int, m: int, seed: int | None = DEFAULT_SEED,
                    depth: tuple[float, float] = (1.0, 9.0)) -> np.ndarray:
    """Points with ``1 - |z| = 10**-U`` for ``U`` uniform in ``depth``."""
    u = sobol_unit(2 * n + 1, m, seed)
    lo, hi = depth
    r = 1.0 - 10.0 ** -(lo + (hi - lo) * u[:, -1])
    return _directions(u, n) * r[:, None]


def near_vertex(p, m: int, seed: int | None = DEFAULT_SEED,
                s_range: tuple[float, float] = (1e-9, 0.5), y_max: float = 2.0) -> np.ndarray:
    """Points ``(1 - s(1 + i y)) p + z_perp`` clustered at the vertex ``p``.

    ``s`` is log-uniform, ``y`` uniform in ``[-y_max, y_max]`` (reset to 0
    where it would leave the ball) and ``z_perp`` takes a random fraction of
    the largest tangential length that keeps the point inside the ball.
    """
    p = as_cvec(p)
    n = p.shape[0]
    u = sobol_unit(2 * n + 2, m, seed)
    lo, hi = np.log(s_range[0]), np.log(s_range[1])
    s = np.exp(lo + (hi - lo) * u[:, 0])
    y = y_max * (2 * u[:, 1] - 1)
    room = 2 * s - s * s * (1 + y * y)
    y = np.where(room > 0, y, 0.0)
    room = np.where(room > 0, room, 2 * s - s * s)
    w = s * (1 + 1j * y)
    pts = np.multiply.outer(1.0 - w, p)
    if n > 1:
        basis = orthogonal_basis(p)
        g = _gauss.ppf(u[:, 2 : 2 * n]).reshape(m, n - 1, 2)
        coef = g[..., 0] + 1j * g[..., 1]
        coef /= np.linalg.norm(coef, axis=1, keepdims=True)
        frac = u[:, -1] * (1 - 1e-9)
        pts = pts + (coef * (frac * np.sqrt(room))[:, None]) @ basis
    return pts


def dilation_samples(p, m: int, seed: int | None = DEFAULT_SEED) -> np.ndarray:
    """Mixture used for sup estimates at a vertex.

    One third volume-uniform, one third boundary-biased, one third clustered
    at ``p``, plus the radial points ``(1 - 2**-k) p``, ``k = 1..40``.
    """
    p = as_cvec(p)
    n = p.shape[0]
    third = max(m // 3, 1)
    parts = [
        sobol_ball(n, third, seed),
        boundary_biased(n, third, None if seed is None else seed + 1),
        near_vertex(p, max(m - 2 * third, 1), None if seed is None else seed + 2),
        np.multiply.outer(1.0 - np.ldexp(1.0, -np.arange(1, 41)), p),
    ]
    return np.concatenate(parts)
