"""Limits of sequences sampled on the geometric ladder ``1 - t_k = 2**-k``.

Every boundary quantity in this package behaves like ``L + A (1-t)**q`` plus
higher powers, so on a ladder with ratio 1/2 the differences decay
geometrically. Richardson extrapolation with the order estimated from
consecutive differences (equivalently Aitken's delta-squared) removes the
leading term exactly; the deepest window whose accelerated values agree is
reported, which keeps estimates away from the round-off floor that Cauchy
derivatives hit close to the sphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LimitEstimate",
    "estimate_limit",
    "geometric_ladder",
    "growth_exponent",
    "CONVERGED",
    "DIVERGES",
    "INDETERMINATE",
]

CONVERGED = "converged"
DIVERGES = "diverges"
INDETERMINATE = "indeterminate"

_EPS = np.finfo(float).eps


def geometric_ladder(k_min: int = 4, k_max: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Ladder indices ``k`` and gaps ``s = 1 - t = 2**-k``; depth floor is 2**-40."""
    if k_max > 40:
        raise ValueError("depth floor is 2**-40")
    if k_min < 1 or k_max <= k_min:
        raise ValueError(f"bad ladder {k_min}..{k_max}")
    ks = np.arange(k_min, k_max + 1)
    return ks, np.ldexp(1.0, -ks)


@dataclass
class LimitEstimate:
    """Sampled sequence ``(t_k, value_k)`` with its extrapolated limit and verdict."""

    ks: np.ndarray
    gaps: np.ndarray
    values: np.ndarray
    extrapolated: complex | None
    growth_exponent: float
    verdict: str
    error_estimate: float = np.inf
    rate: complex | None = None
    tail_min_real: float = np.nan
    window: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ts(self) -> np.ndarray:
        return 1.0 - self.gaps

    @property
    def converged(self) -> bool:
        return self.verdict == CONVERGED

    def table(self) -> list[dict]:
        """Rows ``k, 1-t, value_re, value_im, abs`` for CSV export."""
        return [
            {
                "k": int(k),
                "1-t": float(s),
                "value_re": float(np.real(v)),
                "value_im": float(np.imag(v)),
                "abs": float(abs(v)),
            }
            for k, s, v in zip(self.ks, self.gaps, self.values)
        ]

    def to_dict(self) -> dict:
        ext = None if self.extrapolated is None else [self.extrapolated.real, self.extrapolated.imag]
        return {
            "verdict": self.verdict,
            "extrapolated": ext,
            "error_estimate": _finite_or_none(self.error_estimate),
            "growth_exponent": _finite_or_none(self.growth_exponent),
            "tail_min_real": _finite_or_none(self.tail_min_real),
            "rate": None if self.rate is None else [self.rate.real, self.rate.imag],
            "notes": list(self.notes),
            "samples": self.table(),
        }


def _finite_or_none(x):
    x = float(x)
    return x if np.isfinite(x) else None


def growth_exponent(gaps, magnitudes, floor: float = 0.0) -> float:
    """Least-squares slope of ``log|value|`` against ``log(1/(1-t))``.

    Positive slopes mean growth towards the boundary. Magnitudes are clipped
    below at ``floor`` (or the smallest positive normal number).
    """
    mags = np.maximum(np.asarray(magnitudes, dtype=float), max(floor, np.finfo(float).tiny))
    x = -np.log(np.asarray(gaps, dtype=float))
    if x.size < 2:
        return 0.0
    slope, _ = np.polyfit(x, np.log(mags), 1)
    return float(slope)


def _aitken_table(v: np.ndarray, noise: float):
    """Accelerated value and difference ratio for each window ending at j."""
    K = v.size
    acc = np.full(K, np.nan + 0j)
    rates = np.full(K, np.nan + 0j)
    if K < 3:
        return acc, rates
    d = np.diff(v)
    d1, d2 = d[:-1], d[1:]
    stalled = np.abs(d2) <= noise
    usable = ~stalled & (np.abs(d1) > noise)
    r = np.full(K - 2, np.nan + 0j)
    r[usable] = d2[usable] / d1[usable]
    good = usable & (np.abs(r) < 1.0) & (np.abs(1.0 - r) > 1e-12)
    a = np.full(K - 2, np.nan + 0j)
    a[good] = v[2:][good] + d2[good] * r[good] / (1.0 - r[good])
    a[stalled] = v[2:][stalled]
    r[stalled] = 0.0
    acc[2:] = a
    rates[2:] = r
    return acc, rates


def estimate_limit(
    ks,
    gaps,
    values,
    tol: float,
    atol: float = 0.0,
    tail: int = 5,
) -> LimitEstimate:
    """Extrapolate ``lim values_k`` as ``1 - t_k -> 0``.

    A window is the Richardson/Aitken value built from three consecutive
    samples; its error estimate is the spread of three consecutive windows.
    The deepest window whose error is within a factor 10 of the best one is
    chosen. ``converged`` requires that error to be below ``tol`` and the
    difference ratio to be inside the unit disk; ``diverges`` requires the
    last ``tail`` differences to be non-shrinking and the magnitude to grow.
    Differences below ``atol`` (or round-off) count as stalled, i.e. already
    converged.
    """
    ks = np.asarray(ks)
    gaps = np.asarray(gaps, dtype=float)
    v = np.asarray(values, dtype=complex)
    if v.ndim != 1 or v.size != gaps.size:
        raise ValueError("values and gaps must be 1-D of equal length")
    if v.size < 2 or np.any(np.diff(gaps) >= 0):
        raise ValueError("need at least two samples with 1-t strictly decreasing")

    half = v.size // 2
    notes: list[str] = []
    finite = np.isfinite(v)
    if not finite.all():
        bad = int(np.flatnonzero(~finite)[0])
        notes.append(f"non-finite value at k={int(ks[bad])}")
        return LimitEstimate(ks, gaps, v, None, np.inf, DIVERGES, notes=notes)

    mags = np.abs(v)
    slope = growth_exponent(gaps[half:], mags[half:], floor=max(atol, 1e-300))
    tail_min = float(np.min(v.real[-tail:]))
    scale = max(1.0, float(np.max(mags)))
    noise = max(atol, 64 * _EPS * scale)

    acc, rates = _aitken_table(v, noise)

    best_j, best_err = None, np.inf
    errs = np.full(v.size, np.inf)
    if v.size > 4:
        win = np.lib.stride_tricks.sliding_window_view(acc[2:], 3)
        spread = np.max(np.abs(win - win[:, -1:]), axis=1)
        errs[4:] = np.where(np.isfinite(spread), spread, np.inf)
    if np.isfinite(errs).any():
        floor_err = max(float(np.min(errs)), 16 * _EPS * scale)
        candidates = np.flatnonzero(errs <= 10 * floor_err)
        best_j = int(candidates[-1])
        best_err = float(errs[best_j])

    tail_rates = rates[-tail:]
    growing = np.all(np.isfinite(tail_rates)) and np.all(np.abs(tail_rates) >= 1.0 - 1e-9)
    if best_j is not None and best_err <= tol:
        ext = complex(acc[best_j])
        rate = rates[best_j]
        return LimitEstimate(
            ks, gaps, v, ext, slope, CONVERGED, best_err,
            None if not np.isfinite(rate) else complex(rate), tail_min, best_j, notes,
        )
    if growing and slope > 0:
        notes.append("differences do not shrink on the tail and |value| grows")
        return LimitEstimate(ks, gaps, v, None, slope, DIVERGES, best_err,
                             complex(tail_rates[-1]), tail_min, None, notes)
    if best_j is not None:
        notes.append(f"best window error {best_err:.3g} exceeds tol {tol:.3g}")
    else:
        notes.append("no convergent window")
    ext = None if best_j is None else complex(acc[best_j])
    return LimitEstimate(ks, gaps, v, ext, slope, INDETERMINATE, best_err, None, tail_min, best_j, notes)
