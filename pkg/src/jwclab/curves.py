"""Curves ending at a boundary point, and their special/restricted classification.

A curve is stored as a function of the gap ``s = 1 - t`` so that points on the
geometric ladder are built without forming ``1 - t`` from ``t``. Each family
also knows ``1 - <gamma, p>`` in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ball_geometry import (
    DomainError,
    InvalidParameters,
    as_cvec,
    herm,
    norm,
)
from .limits import CONVERGED, LimitEstimate, estimate_limit, geometric_ladder

__all__ = [
    "Curve",
    "CurveClass",
    "classify",
    "disk_slice_curve",
    "from_callable",
    "proof_curve",
    "radial_curve",
    "special_restricted_curve",
    "specialness_quotient",
    "tangential_curve",
]

SPECIAL = "special"
NOT_SPECIAL = "not-special"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Curve:
    """A p-curve ``t -> gamma(t)``, ``t in [t_min, 1)``.

    ``point(s)`` returns gamma at ``t = 1 - s`` for an array of gaps ``s``
    (shape ``(m, n)``); ``gap(s)`` returns ``1 - <gamma, p>``. Declared tags
    are what the constructor promises; :func:`classify` measures them.
    """

    name: str
    vertex: np.ndarray
    point: Callable[[np.ndarray], np.ndarray]
    gap: Callable[[np.ndarray], np.ndarray]
    declared_special: bool | None = None
    declared_bound: float | None = None
    projection_is_t: bool = False
    s_max: float = 1.0
    params: dict = field(default_factory=dict)

    @property
    def t_min(self) -> float:
        return 1.0 - self.s_max

    def at_gap(self, s) -> np.ndarray:
        s = np.minimum(np.atleast_1d(np.asarray(s, dtype=float)), self.s_max)
        return self.point(s)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        pts = self.at_gap(1.0 - t)
        return pts[0] if t.ndim == 0 else pts


def _unit_vertex(p) -> np.ndarray:
    p = as_cvec(p)
    if p.ndim != 1 or abs(np.linalg.norm(p) - 1.0) > 1e-12:
        raise DomainError("vertex must be a unit vector")
    return p


def _check_direction(p: np.ndarray, v) -> np.ndarray:
    v = as_cvec(v)
    if v.shape != p.shape:
        raise InvalidParameters("direction and vertex differ in dimension")
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise InvalidParameters("direction must be a unit vector")
    if abs(complex(herm(v, p))) > 1e-12:
        raise InvalidParameters("direction must be orthogonal to the vertex")
    return v


def radial_curve(p) -> Curve:
    p = _unit_vertex(p)
    return Curve(
        name="radial",
        vertex=p,
        point=lambda s: np.multiply.outer(1.0 - s, p),
        gap=lambda s: s.astype(complex),
        declared_special=True,
        declared_bound=1.0,
        projection_is_t=True,
    )


def special_restricted_curve(p, v, c: float, rho: float) -> Curve:
    """``t p + c (1 - t^2)**(rho/2) v``; special and 1-restricted for rho > 1.

    ``rho == 1`` is the tangential curve and is tagged not special.
    """
    p = _unit_vertex(p)
    v = _check_direction(p, v)
    if not 0 < c < 1:
        raise InvalidParameters(f"need 0 < c < 1, got {c}")
    if rho < 1:
        raise InvalidParameters(f"rho < 1 leaves the ball near the vertex, got {rho}")

    def point(s):
        return np.multiply.outer(1.0 - s, p) + np.multiply.outer(c * (s * (2.0 - s)) ** (rho / 2.0), v)

    return Curve(
        name=f"sigma_rho={rho:g}" if rho > 1 else "tangential",
        vertex=p,
        point=point,
        gap=lambda s: s.astype(complex),
        declared_special=rho > 1,
        declared_bound=1.0,
        projection_is_t=True,
        params={"c": c, "rho": rho},
    )


def tangential_curve(p, v, c: float) -> Curve:
    """``t p + c sqrt(1 - t^2) v``: inside a Korányi region, restricted, not special."""
    curve = special_restricted_curve(p, v, c, 1.0)
    return curve


def proof_curve(p, v, eps: float, theta: float, gamma: float) -> Curve:
    """``t p + exp(-i theta) eps (1-t)**(1-gamma) v``; special only for gamma < 1/2."""
    p = _unit_vertex(p)
    v = _check_direction(p, v)
    if not 0 < gamma <= 0.5:
        raise InvalidParameters(f"gamma must lie in (0, 1/2], got {gamma}")
    if not 0 < eps < 1:
        raise InvalidParameters(f"need 0 < eps < 1, got {eps}")
    phase = np.exp(-1j * theta)

    def point(s):
        return np.multiply.outer(1.0 - s, p) + np.multiply.outer(phase * eps * s ** (1.0 - gamma), v)

    return Curve(
        name=f"proof_gamma={gamma:g}",
        vertex=p,
        point=point,
        gap=lambda s: s.astype(complex),
        declared_special=gamma < 0.5,
        declared_bound=1.0,
        projection_is_t=True,
        params={"eps": eps, "theta": theta, "gamma": gamma},
    )


def disk_slice_curve(p, c: float) -> Curve:
    """``zeta_t p`` with ``zeta_t = t + i c (1 - t)``; non-tangential.

    Inside the ball only for ``1 - t < 2/(1 + c^2)``; earlier ``t`` are clamped
    to the start of that range.
    """
    p = _unit_vertex(p)
    if not c > 0:
        raise InvalidParameters(f"need c > 0, got {c}")
    s_max = min(1.0, 2.0 / (1.0 + c * c) * (1.0 - 1e-9))
    w_unit = 1.0 - 1j * c

    return Curve(
        name=f"disk_slice_c={c:g}",
        vertex=p,
        point=lambda s: np.multiply.outer((1.0 - s) + 1j * c * s, p),
        gap=lambda s: s * w_unit,
        declared_special=True,
        declared_bound=None,
        projection_is_t=False,
        s_max=s_max,
        params={"c": c},
    )


def from_callable(func: Callable, vertex, name: str = "custom") -> Curve:
    """Wrap ``func(t) -> point``; the gap is formed as ``1 - <func(t), p>``."""
    p = _unit_vertex(vertex)

    def point(s):
        return np.array([as_cvec(func(1.0 - si)) for si in np.atleast_1d(s)])

    return Curve(name=name, vertex=p, point=point, gap=lambda s: 1.0 - herm(point(s), p))


def specialness_quotient(curve: Curve, s) -> np.ndarray:
    """``|gamma - <gamma,p> p|^2 / (1 - |<gamma,p>|^2)`` at gaps ``s``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    z = curve.at_gap(s)
    w = curve.gap(np.minimum(s, curve.s_max))
    lam = 1.0 - w
    perp = z - np.multiply.outer(lam, curve.vertex)
    return np.sum(np.abs(perp) ** 2, axis=-1) / (2.0 * w.real - np.abs(w) ** 2)


def _restriction_ratio(curve: Curve, s) -> np.ndarray:
    w = curve.gap(np.minimum(s, curve.s_max))
    one_minus_sq = 2.0 * w.real - np.abs(w) ** 2
    lam_abs = np.sqrt(np.maximum(1.0 - one_minus_sq, 0.0))
    one_minus_abs = one_minus_sq / (1.0 + lam_abs)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(one_minus_abs > 0, np.abs(w) / one_minus_abs, np.inf)
    return ratio


@dataclass
class CurveClass:
    verdict: str
    limit: complex | None
    restriction_bound: float
    estimate: LimitEstimate

    @property
    def special(self) -> bool:
        return self.verdict == SPECIAL

    @property
    def restricted(self) -> bool:
        return bool(np.isfinite(self.restriction_bound))

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "limit": None if self.limit is None else float(self.limit.real),
            "restriction_bound": float(self.restriction_bound) if self.restricted else None,
        }


def _sample_gaps(curve: Curve, k_min: int, k_max: int) -> np.ndarray:
    _, ladder = geometric_ladder(k_min, k_max)
    coarse = np.linspace(curve.s_max, 0.0, 257)[:-1]
    return np.unique(np.concatenate([coarse, ladder]))[::-1]


def classify(curve: Curve, tol: float = 1e-6, k_min: int = 4, k_max: int = 40) -> CurveClass:
    """Measure specialness and the restriction bound of ``curve``.

    The specialness quotient is extrapolated on ``1 - t = 2**-k``; a convergent
    limit below ``tol`` means special, a convergent limit above it means not
    special, anything else is indeterminate. The restriction bound is the sup
    of ``|1 - <gamma,p>| / (1 - |<gamma,p>|)`` over the ladder and a uniform
    grid of the parameter interval.
    """
    ks, s = geometric_ladder(k_min, k_max)
    q = specialness_quotient(curve, s)
    est = estimate_limit(ks, s, q, tol=tol)

    verdict = INDETERMINATE
    limit = None
    if est.verdict == CONVERGED:
        d = np.abs(np.diff(q[-6:]))
        stalled = np.all(d <= 64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(q)))))
        monotone = np.all(d[1:] <= d[:-1] * (1 + 1e-9) + 1e-300)
        if stalled or monotone:
            limit = est.extrapolated
            verdict = SPECIAL if abs(limit) < tol else NOT_SPECIAL
        else:
            est.notes.append("|differences| not monotone on the tail")

    if np.any(np.linalg.norm(curve.at_gap(s), axis=-1) >= 1.0):
        raise DomainError(f"curve {curve.name} leaves the ball")
    bound = float(np.max(_restriction_ratio(curve, _sample_gaps(curve, k_min, k_max))))
    return CurveClass(verdict, limit, bound, est)


def inside_ball(curve: Curve, k_min: int = 1, k_max: int = 40) -> bool:
    pts = curve.at_gap(_sample_gaps(curve, k_min, k_max))
    return bool(np.all(norm(pts) < 1.0))
