"""Numerical semigroup ``dPhi/dt = G(Phi)`` on the unit ball.

Dormand-Prince 5(4) with PI step control, a step cap that keeps steps short
where ``1 - |z|`` is small compared with ``|G(z)|``, and a guard that rejects
any step landing outside the ball. Requested output times are hit exactly
by shortening the step that would cross them; cubic Hermite interpolation on
accepted steps is available as the cheaper alternative.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .ball_geometry import DomainError, InvalidParameters, as_cvec, herm, koranyi_gauge, one_minus_norm_sq
from .generators import Generator

__all__ = [
    "FlowError",
    "FlowTrajectory",
    "JuliaReport",
    "flow_map",
    "generator_recovery",
    "integrate",
    "julia_invariant_check",
    "semigroup_defect",
]

T_MAX = 50.0

# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class FlowError(RuntimeError):
    """Integration failed; ``t_fail`` is the semigroup time reached."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} at t={t_fail:.6g}")
        self.t_fail = t_fail


@dataclass
class FlowTrajectory:
    start: np.ndarray
    times: np.ndarray
    points: np.ndarray
    accepted: int = 0
    rejected: int = 0
    max_error: float = 0.0
    step_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    step_points: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    @property
    def final(self) -> np.ndarray:
        return self.points[-1]

    @property
    def one_minus_norm(self) -> np.ndarray:
        return 1.0 - np.linalg.norm(self.points, axis=1)

    def rows(self, vertex=None) -> list[dict]:
        """One row per output time: t, Re/Im of each coordinate, 1-|z|, gauge."""
        out = []
        gauges = None if vertex is None else koranyi_gauge(self.points, vertex)
        for i, (t, z) in enumerate(zip(self.times, self.points)):
            row = {"t": float(t)}
            for j, zj in enumerate(z, start=1):
                row[f"re_z{j}"] = float(zj.real)
                row[f"im_z{j}"] = float(zj.imag)
            row["1-|z|"] = float(1.0 - np.linalg.norm(z))
            if gauges is not None:
                row["gauge"] = float(gauges[i])
            out.append(row)
        return out

    def to_csv(self, vertex=None) -> str:
        rows = self.rows(vertex)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()

    def stats(self) -> dict:
        return {"accepted": self.accepted, "rejected": self.rejected, "max_error": self.max_error}


def _hermite(t0, y0, f0, t1, y1, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def integrate(G: Generator, z0, T: float, tol: float = 1e-10, t_eval=None,
              h0: float | None = None, max_steps: int = 100_000, t_max: float = T_MAX,
              dense: str = "land") -> FlowTrajectory:
    """Integrate ``dz/dt = G(z)`` from ``z0`` over ``[0, T]``.

    ``t_eval`` lists output times (default: the accepted step times). With
    ``dense="land"`` steps are shortened to end on each output time; with
    ``dense="hermite"`` outputs are interpolated from accepted steps. A step
    is accepted when its scaled local error (``atol = rtol = tol``) is at
    most one; otherwise it is halved. Steps whose endpoint has ``|z| >= 1``
    are treated like rejected steps; after 60 consecutive halvings, or when
    the boundary step cap collapses below 1e-14 (the orbit runs into the
    sphere), the integration stops with :class:`FlowError`.
    """
    z = as_cvec(z0).astype(complex)
    if z.ndim != 1 or z.shape[0] != G.dim:
        raise InvalidParameters(f"start point must be a vector of C^{G.dim}")
    if not np.linalg.norm(z) < 1:
        raise DomainError("start point must lie in the open unit ball")
    if not T > 0 or not tol > 0:
        raise InvalidParameters("need T > 0 and tol > 0")
    if T > t_max:
        raise InvalidParameters(f"T={T} exceeds the cap {t_max}")
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if t_eval.size and (t_eval[0] < 0 or t_eval[-1] > T or np.any(np.diff(t_eval) < 0)):
            raise InvalidParameters("t_eval must be sorted inside [0, T]")
    if dense not in ("land", "hermite"):
        raise InvalidParameters(f"unknown dense output mode {dense!r}")
    stops = t_eval[t_eval > 0] if (t_eval is not None and dense == "land") else np.zeros(0)

    f = G(z)
    if not np.all(np.isfinite(f)):
        raise FlowError("non-finite generator value", 0.0)

    def cap(z, f):
        g = np.linalg.norm(f)
        return np.inf if g == 0 else 0.1 * (1.0 - np.linalg.norm(z)) / g

    h = h0 if h0 is not None else min(0.01 * T, 0.1)
    t = 0.0
    ts, ys, fs = [0.0], [z.copy()], [f.copy()]
    accepted = rejected = 0
    max_err = 0.0
    err_prev = 1.0
    halvings = 0
    k = np.empty((7, G.dim), dtype=complex)

    while t < T:
        if accepted + rejected >= max_steps:
            raise FlowError("step budget exhausted", t)
        c = cap(z, f)
        if c < 1e-14:
            raise FlowError("orbit runs into the sphere", t)
        h = min(h, c, T - t)
        nxt = np.searchsorted(stops, t, side="right")
        h_free = h
        if nxt < stops.size and t + h > stops[nxt]:
            h = stops[nxt] - t
        if T - t - h < 1e-14 * T:
            h = T - t
        k[0] = f
        for i in range(1, 7):
            k[i] = G(z + h * (np.asarray(_A[i]) @ k[:i]))
        z_new = z + h * (_B5 @ k)
        f_new = k[6].copy()
        finite = np.all(np.isfinite(z_new)) and np.all(np.isfinite(f_new))
        inside = finite and np.linalg.norm(z_new) < 1.0
        if finite:
            scale = tol + tol * np.maximum(np.abs(z), np.abs(z_new))
            err = float(np.max(np.abs(h * (_E @ k)) / scale))
        else:
            err = np.inf
        if not inside or err > 1.0:
            rejected += 1
            halvings += 1
            if halvings > 60:
                what = "non-finite generator value" if not finite else "step leaves the ball"
                raise FlowError(what, t)
            h /= 2
            continue

        halvings = 0
        accepted += 1
        max_err = max(max_err, err * tol)
        t = t + h if t + h < T else T
        if nxt < stops.size and abs(t - stops[nxt]) <= 1e-14 * max(1.0, T):
            t = float(stops[nxt])
        z, f = z_new, f_new
        ts.append(t)
        ys.append(z.copy())
        fs.append(f.copy())
        err = max(err, 1e-10)
        factor = 0.9 * err ** (-0.7 / 5) * err_prev ** (0.4 / 5)
        h = h_free * min(5.0, max(0.2, factor))
        err_prev = err

    ts_a = np.array(ts)
    ys_a = np.array(ys)
    if t_eval is None:
        times, points = ts_a, ys_a
    elif dense == "land":
        idx = np.clip(np.searchsorted(ts_a, t_eval), 0, len(ts_a) - 1)
        times, points = t_eval, ys_a[idx]
    else:
        fs_a = np.array(fs)
        idx = np.clip(np.searchsorted(ts_a, t_eval, side="right") - 1, 0, len(ts_a) - 2)
        points = np.array([
            _hermite(ts_a[i], ys_a[i], fs_a[i], ts_a[i + 1], ys_a[i + 1], fs_a[i + 1], te)
            for i, te in zip(idx, t_eval)
        ]) if len(ts_a) > 1 else np.repeat(ys_a[:1], len(t_eval), axis=0)
        times = t_eval
    return FlowTrajectory(as_cvec(z0).copy(), times, points, accepted, rejected, max_err, ts_a, ys_a)


def flow_map(G: Generator, z, t: float, tol: float = 1e-10) -> np.ndarray:
    """``phi_t(z)``; ``phi_0`` is the identity."""
    z = as_cvec(z)
    if t == 0:
        return z.copy()
    return integrate(G, z, t, tol).final


def semigroup_defect(G: Generator, z, t: float, s: float, tol: float = 1e-10) -> float:
    """``|phi_{t+s}(z) - phi_t(phi_s(z))|``."""
    if t < 0 or s < 0:
        raise InvalidParameters("semigroup times must be non-negative")
    lhs = flow_map(G, z, t + s, tol)
    rhs = flow_map(G, flow_map(G, z, s, tol), t, tol)
    return float(np.linalg.norm(lhs - rhs))


def generator_recovery(G: Generator, z, h: float, tol: float = 1e-13) -> np.ndarray:
    """Difference quotient ``(phi_h(z) - z)/h``; first-order accurate in ``h``."""
    if not 0 < h <= 0.1:
        raise InvalidParameters(f"need 0 < h <= 0.1, got {h}")
    z = as_cvec(z)
    return (flow_map(G, z, h, tol) - z) / h


def _horo_quotient(z, p):
    lam = herm(z, p)
    d = np.where(np.real(lam) > 0.5, one_minus_norm_sq(z, p), one_minus_norm_sq(z))
    return np.abs(1.0 - lam) ** 2 / d


@dataclass
class JuliaReport:
    gamma_rate: float
    max_excess: float
    holds: bool
    witnesses: list = field(default_factory=list)
    checked: int = 0

    def to_dict(self) -> dict:
        return {
            "gamma_rate": self.gamma_rate,
            "max_excess": self.max_excess,
            "holds": self.holds,
            "checked": self.checked,
            "witnesses": self.witnesses,
        }


def julia_invariant_check(G: Generator, p, gamma_rate: float, z, t_grid, tol: float = 1e-10,
                          slack: float = 1e-9) -> JuliaReport:
    """Compare ``|1-<phi_t z,p>|^2/(1-|phi_t z|^2)`` with ``e^{gamma t}`` times its value at ``z``.

    ``z`` may be one start or a batch. The excess is ``max LHS/RHS - 1``; the
    inequality holds on the samples when the excess is at most ``slack``.
    Every violating ``(start, t)`` is recorded as a witness.
    """
    p = as_cvec(p)
    starts = np.atleast_2d(as_cvec(z))
    t_grid = np.asarray(t_grid, dtype=float)
    worst = -np.inf
    witnesses = []
    for z0 in starts:
        traj = integrate(G, z0, float(t_grid.max()), tol, t_eval=t_grid)
        rhs = np.exp(gamma_rate * t_grid) * _horo_quotient(z0, p)
        lhs = _horo_quotient(traj.points, p)
        excess = lhs / rhs - 1.0
        worst = max(worst, float(np.max(excess)))
        for t, e, l, r in zip(t_grid, excess, lhs, rhs):
            if e > slack:
                witnesses.append({
                    "z": [[float(c.real), float(c.imag)] for c in z0],
                    "t": float(t), "lhs": float(l), "rhs": float(r), "excess": float(e),
                })
    return JuliaReport(gamma_rate, worst, worst <= slack, witnesses, len(starts) * t_grid.size)
