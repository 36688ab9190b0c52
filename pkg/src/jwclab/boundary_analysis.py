"""Boundary behaviour of a generator at a boundary point ``p``.

Dilation (radial quotient and the sup formula), K-boundedness probes on
Korányi slices, limits along special restricted curves, the six-item
Julia-Wolff-Carathéodory suite and Hölder remainder fits.

Scalar fields are callables ``f(Z) -> values`` on batches ``Z`` of shape
``(m, n)``. Wherever a field needs ``<z,p> - 1`` it is formed from the point
itself; on the ladders used here (``p`` a basis vector, ``Re z1 = 1 - 2**-k``)
that subtraction is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .ball_geometry import (
    InvalidParameters,
    as_cvec,
    gap_power,
    herm,
    orthogonal_basis,
)
from .curves import Curve, classify, disk_slice_curve, radial_curve, special_restricted_curve
from .generators import Generator, eqdue_defect, jacobian_batch
from .limits import (
    CONVERGED,
    DIVERGES,
    INDETERMINATE,
    LimitEstimate,
    estimate_limit,
    geometric_ladder,
    growth_exponent,
)
from .sampling import DEFAULT_SEED, dilation_samples

__all__ = [
    "BOUNDED",
    "DIVERGENT",
    "HolderReport",
    "KBoundednessReport",
    "NonSpecialCurve",
    "RestrictedLimit",
    "SuiteConfig",
    "SuiteReport",
    "default_curves",
    "dilation_estimate",
    "dilation_sup",
    "holder_exponent",
    "jwc_suite",
    "jwc_suite_gamma_half",
    "k_boundedness_probe",
    "radial_vanishing",
    "restricted_k_limit",
]

BOUNDED = "bounded-consistent"
DIVERGENT = "divergence-detected"
SENSITIVITY = 0.02


class NonSpecialCurve(InvalidParameters):
    """A curve handed to a restricted limit is not special and restricted."""

    def __init__(self, message: str, evidence: dict):
        super().__init__(message)
        self.evidence = evidence


def _vertex(p) -> np.ndarray:
    p = as_cvec(p)
    if p.ndim != 1 or abs(np.linalg.norm(p) - 1.0) > 1e-12:
        raise InvalidParameters("vertex must be a unit vector")
    return p


def _radial(p: np.ndarray, s: np.ndarray) -> np.ndarray:
    return np.multiply.outer(1.0 - s, p)


def _ladder_values(func, ks, s, notes):
    """Evaluate level by level; stop at the first failure."""
    vals = []
    for k, si in zip(ks, s):
        try:
            v = complex(func(si))
        except (ArithmeticError, ValueError) as exc:
            notes.append(f"evaluation failed at k={int(k)}: {exc}")
            break
        if not np.isfinite(v):
            notes.append(f"non-finite value at k={int(k)}")
            break
        vals.append(v)
    return np.array(vals, dtype=complex)


def radial_vanishing(G: Generator, p, tol: float = 1e-6, k_min: int = 4, k_max: int = 40) -> LimitEstimate:
    """``lim |G(t p)|`` on ``1 - t = 2**-k``; a null point needs the limit 0."""
    p = _vertex(p)
    ks, s = geometric_ladder(k_min, k_max)
    notes: list[str] = []
    vals = _ladder_values(lambda si: np.linalg.norm(G(_radial(p, np.array([si])))[0]), ks, s, notes)
    if vals.size < 6:
        return LimitEstimate(ks[: vals.size], s[: vals.size], vals, None, np.nan, INDETERMINATE, notes=notes)
    est = estimate_limit(ks[: vals.size], s[: vals.size], vals, tol=tol)
    est.notes = notes + est.notes
    if est.converged and abs(est.extrapolated) >= tol:
        est.notes.append("radial limit is not zero: p is not a null point")
    return est


def is_null_point(est: LimitEstimate, tol: float = 1e-6) -> bool:
    return est.converged and abs(est.extrapolated) < tol


def dilation_estimate(G: Generator, p, tol: float = 1e-6, k_min: int = 4, k_max: int = 40) -> LimitEstimate:
    """``beta = lim <G(tp),p>/(t - 1)`` by extrapolation on the geometric ladder.

    ``extrapolated.real`` is the dilation; the imaginary part and the gap
    between the tail minimum (a liminf proxy) and the limit are recorded in
    ``notes``.
    """
    p = _vertex(p)
    ks, s = geometric_ladder(k_min, k_max)
    radial = radial_vanishing(G, p, tol, k_min, k_max)
    q = -herm(G(_radial(p, s)), p) / s
    est = estimate_limit(ks, s, q, tol=tol)
    if not is_null_point(radial, tol):
        est.notes.append("radial vanishing failed; the quotient is not a dilation")
    if est.converged:
        L = est.extrapolated
        if abs(L.imag) > tol:
            est.notes.append(f"imaginary residual {L.imag:.3g}")
        if abs(est.tail_min_real - L.real) > 1e-3 * max(1.0, abs(L.real)):
            est.notes.append(f"tail minimum {est.tail_min_real:.6g} disagrees with the limit {L.real:.6g}")
    return est


def dilation_sup(G: Generator, p, samples: int = 100_000, seed: int | None = DEFAULT_SEED,
                 return_witness: bool = False):
    """Twice the sampled sup of the defect functional; a lower bound for the dilation.

    Samples mix volume-uniform, boundary-biased and vertex-clustered points
    plus the radius at ``p``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    p = _vertex(p)
    z = dilation_samples(p, samples, seed)
    d = eqdue_defect(G, p, z)
    i = int(np.nanargmax(d))
    value = 2.0 * float(d[i])
    return (value, z[i]) if return_witness else value


@dataclass
class KBoundednessReport:
    amplitude: float
    levels: np.ndarray
    sups: np.ndarray
    growth_exponent: float
    verdict: str
    sensitivity: float = SENSITIVITY
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def bounded(self) -> bool:
        return self.verdict == BOUNDED

    def table(self) -> list[dict]:
        return [{"1-t": float(s), "sup_abs": float(v)} for s, v in zip(self.levels, self.sups)]

    def to_dict(self) -> dict:
        g = float(self.growth_exponent)
        return {
            "amplitude": self.amplitude,
            "verdict": self.verdict,
            "growth_exponent": g if np.isfinite(g) else None,
            "sensitivity": self.sensitivity,
            "levels": self.table(),
            "witnesses": self.witnesses,
            "notes": list(self.notes),
        }


def koranyi_slice(p: np.ndarray, s: float, M: float, magnitudes: int = 8, phases: int = 16) -> np.ndarray:
    """Deterministic grid of ``{z in K(p,M): <z,p> = 1 - s}``.

    The tangential part ``u`` obeys ``|u|^2 < s(1 - 1/M)(2 - s(1 + 1/M))``;
    magnitudes ``j/8`` of that radius (the last pulled in by 1e-6) times 16
    phases along each orthogonal direction, plus the radial point.
    """
    n = p.shape[0]
    pts = [(1.0 - s) * p]
    if n > 1:
        r_max = np.sqrt(s * (1 - 1 / M) * (2 - s * (1 + 1 / M)))
        mags = r_max * np.arange(1, magnitudes + 1) / magnitudes
        mags[-1] *= 1 - 1e-6
        ph = np.exp(2j * np.pi * np.arange(phases) / phases)
        coef = np.outer(mags, ph).ravel()
        for v in orthogonal_basis(p):
            pts.append((1.0 - s) * p + np.multiply.outer(coef, v))
    return np.vstack([np.atleast_2d(x) for x in pts])


def k_boundedness_probe(f: Callable, p, M: float = 2.0, depths: int = 24, k_min: int = 4,
                        sensitivity: float = SENSITIVITY, floor: float = 1e-10) -> KBoundednessReport:
    """Heuristic K-boundedness test of ``f`` at ``p`` in ``K(p, M)``.

    For ``1 - t = 2**-k`` the sup of ``|f|`` over a slice grid is recorded;
    the slope of ``log sup`` against ``log 1/(1-t)`` on the deepest half of
    the levels is the growth exponent. Slope above ``sensitivity`` means
    divergence; a slope inside the band with a non-monotone tail is
    indeterminate. Sups below ``floor`` are clipped to it.
    """
    p = _vertex(p)
    if not M > 1:
        raise InvalidParameters(f"amplitude must be > 1, got {M}")
    if depths < 8:
        raise InvalidParameters("depths must be >= 8")
    ks = np.arange(k_min, k_min + depths)
    if ks[-1] > 40:
        raise InvalidParameters("depth floor is 2**-40")
    levels = np.ldexp(1.0, -ks)
    sups = np.empty(levels.size)
    witnesses = []
    for i, s in enumerate(levels):
        z = koranyi_slice(p, s, M)
        vals = np.abs(np.asarray(f(z)))
        bad = ~np.isfinite(vals)
        if bad.any():
            j = int(np.flatnonzero(bad)[0])
            witnesses.append({"k": int(ks[i]), "z": [[float(c.real), float(c.imag)] for c in z[j]]})
            return KBoundednessReport(M, levels[: i + 1], np.append(sups[:i], np.inf), np.inf, DIVERGENT,
                                      sensitivity, witnesses, ["non-finite value on the slice"])
        j = int(np.argmax(vals))
        sups[i] = vals[j]
        witnesses.append({"k": int(ks[i]), "sup": float(vals[j]),
                          "z": [[float(c.real), float(c.imag)] for c in z[j]]})
    half = levels.size // 2
    tail = np.maximum(sups[half:], floor)
    slope = growth_exponent(levels[half:], tail, floor)
    notes = []
    if slope > sensitivity:
        verdict = DIVERGENT
    elif slope < -sensitivity:
        verdict = BOUNDED
    else:
        d = np.diff(np.log(tail))
        wiggle = 1e-9
        if np.any(d > wiggle) and np.any(d < -wiggle):
            verdict = INDETERMINATE
            notes.append("slope inside the sensitivity band but the tail is not monotone")
        else:
            verdict = BOUNDED
    return KBoundednessReport(M, levels, sups, slope, verdict, sensitivity, witnesses[-3:], notes)


@dataclass
class RestrictedLimit:
    curves: list[str]
    estimates: list[LimitEstimate]
    consensus: complex | None
    classifications: list[dict] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.consensus is not None:
            return CONVERGED
        if any(e.verdict == DIVERGES for e in self.estimates):
            return DIVERGES
        return INDETERMINATE

    def to_dict(self) -> dict:
        c = self.consensus
        return {
            "verdict": self.verdict,
            "consensus": None if c is None else [c.real, c.imag],
            "curves": [
                dict(name=name, classification=cls, **est.to_dict())
                for name, est, cls in zip(self.curves, self.estimates, self.classifications)
            ],
        }


def restricted_k_limit(f: Callable, p, curves: Sequence[Curve], tol: float = 1e-6,
                       k_min: int = 4, k_max: int = 40, classify_tol: float = 1e-6) -> RestrictedLimit:
    """Limits of ``f`` along special restricted curves and their consensus.

    Every curve is classified first; a curve that is not special, or not
    restricted, is rejected with :class:`NonSpecialCurve`. The consensus is the
    last curve's limit when all curves converge and agree within ``tol``.
    """
    p = _vertex(p)
    ks, s = geometric_ladder(k_min, k_max)
    classes = []
    for c in curves:
        if not np.allclose(c.vertex, p, atol=1e-12):
            raise InvalidParameters(f"curve {c.name} does not end at the vertex")
        cc = classify(c, tol=classify_tol)
        classes.append(cc.to_dict())
        if not (cc.special and cc.restricted):
            raise NonSpecialCurve(f"curve {c.name} is not special and restricted", cc.to_dict())
    estimates = []
    for c in curves:
        vals = np.asarray(f(c.at_gap(s)), dtype=complex)
        estimates.append(estimate_limit(ks, s, vals, tol=tol))
    consensus = None
    if estimates and all(e.converged for e in estimates):
        lims = np.array([e.extrapolated for e in estimates])
        if np.max(np.abs(lims - lims[-1])) <= tol:
            consensus = complex(lims[-1])
    return RestrictedLimit([c.name for c in curves], estimates, consensus, classes)


def default_curves(p, rhos=(1.25, 1.5, 2.0), disk_cs=(0.5, 1.0), c: float = 0.5) -> list[Curve]:
    """Radial, ``sigma_rho`` along the first orthogonal direction, and disk slices."""
    p = _vertex(p)
    out = [radial_curve(p)]
    if p.shape[0] > 1:
        v = orthogonal_basis(p)[0]
        out += [special_restricted_curve(p, v, c, rho) for rho in rhos]
    out += [disk_slice_curve(p, dc) for dc in disk_cs]
    return out


@dataclass
class HolderReport:
    alpha_fit: float
    beta: float
    verdict: str
    per_curve: dict = field(default_factory=dict)

    @property
    def positive(self) -> bool:
        return self.verdict in ("holder: positive", "holder: exact")

    def to_dict(self) -> dict:
        a = self.alpha_fit
        return {
            "alpha_fit": "inf" if np.isinf(a) else (a if np.isfinite(a) else None),
            "beta": self.beta,
            "verdict": self.verdict,
            "per_curve": self.per_curve,
        }


def holder_exponent(G: Generator, p, curves: Sequence[Curve] | None = None, margin: float = 0.05,
                    k_min: int = 4, k_max: int = 40, exact_floor: float = 1e-13) -> HolderReport:
    """Fit ``alpha`` in ``<G(sigma),p>/(<sigma,p> - 1) = beta + O((1-t)**alpha)``.

    Each curve must be special, restricted and satisfy ``<sigma(t),p> = t``.
    Per curve the slope of ``log|q - beta|`` against ``log(1-t)`` is fitted on
    the deeper half of the levels where the remainder is clearly above the
    accuracy of ``beta``; the minimum over curves is reported. All remainders
    below ``exact_floor`` give ``holder: exact`` with ``alpha = inf``.
    """
    p = _vertex(p)
    if curves is None:
        curves = [c for c in default_curves(p) if c.projection_is_t]
    for c in curves:
        if not c.projection_is_t:
            raise InvalidParameters(f"curve {c.name} does not satisfy <sigma(t),p> = t")
        cc = classify(c)
        if not (cc.special and cc.restricted):
            raise NonSpecialCurve(f"curve {c.name} is not special and restricted", cc.to_dict())
    est = dilation_estimate(G, p, k_min=k_min, k_max=k_max)
    if not est.converged:
        return HolderReport(np.nan, np.nan, "holder: no dilation", {"dilation": est.to_dict()})
    beta = est.extrapolated.real
    noise = max(exact_floor, 100 * est.error_estimate)
    ks, s = geometric_ladder(k_min, k_max)
    slopes = {}
    all_exact = True
    for c in curves:
        z = c.at_gap(s)
        q = -herm(G(z), p) / s
        r = np.abs(q - beta)
        if np.all(r < exact_floor):
            slopes[c.name] = np.inf
            continue
        all_exact = False
        keep = r > noise
        if keep.sum() < 4:
            slopes[c.name] = np.nan
            continue
        sk, rk = s[keep], r[keep]
        half = sk.size // 2
        slopes[c.name] = -growth_exponent(sk[half:], rk[half:])
    if all_exact:
        return HolderReport(np.inf, beta, "holder: exact", {k: "inf" for k in slopes})
    finite = [v for v in slopes.values() if not np.isinf(v)]
    alpha = float(np.min(finite)) if finite and not np.any(np.isnan(finite)) else np.nan
    verdict = "holder: positive" if np.isfinite(alpha) and alpha > margin else "holder: not detected"
    per = {k: ("inf" if np.isinf(v) else (float(v) if np.isfinite(v) else None)) for k, v in slopes.items()}
    return HolderReport(alpha, beta, verdict, per)


@dataclass
class SuiteConfig:
    amplitude: float = 2.0
    depths: int = 24
    k_min: int = 4
    k_max: int = 30
    rhos: tuple = (1.25, 1.5, 2.0)
    disk_cs: tuple = (0.5, 1.0)
    curve_c: float = 0.5
    nodes: int = 64
    sensitivity: float = SENSITIVITY
    beta_tol: float = 1e-4
    zero_tol: float = 1e-3

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


@dataclass
class ItemResult:
    name: str
    passed: bool
    value: float | None
    expected: float | None
    detail: dict

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value,
                "expected": self.expected, "detail": self.detail}


@dataclass
class SuiteReport:
    gamma: float
    beta: float | None
    hypotheses: dict
    items: dict
    declined: str | None = None
    holder: HolderReport | None = None

    @property
    def passed(self) -> bool:
        return self.declined is None and len(self.items) == 6 and all(i.passed for i in self.items.values())

    def verdicts(self) -> dict:
        out = {name: it.passed for name, it in self.items.items()}
        out["suite"] = "declined" if self.declined else ("pass" if self.passed else "fail")
        return out

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "beta": self.beta,
            "declined": self.declined,
            "hypotheses": {k: v.to_dict() for k, v in self.hypotheses.items()},
            "items": {k: v.to_dict() for k, v in self.items.items()},
            "holder": None if self.holder is None else self.holder.to_dict(),
            "verdicts": self.verdicts(),
        }


def _gap(Z, p):
    return 1.0 - herm(Z, p)


def _hypothesis_fields(G: Generator, p: np.ndarray, gamma: float):
    def normal(Z):
        return herm(G(Z), p) / (-_gap(Z, p))

    def tangential(Z):
        g = G(Z)
        perp = g - np.multiply.outer(herm(g, p), p)
        return np.linalg.norm(perp, axis=-1) / np.abs(_gap(Z, p)) ** gamma

    return normal, tangential


def _check_hypotheses(G, p, gamma, cfg: SuiteConfig):
    normal, tangential = _hypothesis_fields(G, p, gamma)
    kw = dict(M=cfg.amplitude, depths=cfg.depths, k_min=cfg.k_min, sensitivity=cfg.sensitivity)
    hyp = {
        "normal_quotient": k_boundedness_probe(normal, p, **kw),
        f"tangential_quotient_gamma={gamma:g}": k_boundedness_probe(tangential, p, **kw),
    }
    failed = [k for k, v in hyp.items() if not v.bounded]
    return hyp, failed


def _limit_item(name, f, p, curves, expected, tol, cfg) -> ItemResult:
    res = restricted_k_limit(f, p, curves, tol=tol, k_min=cfg.k_min, k_max=cfg.k_max)
    value = None
    if res.consensus is not None:
        # report the per-curve limit farthest from the expected value
        lims = [e.extrapolated for e in res.estimates]
        value = float(max(lims, key=lambda L: abs(L - expected)).real)
    ok = res.consensus is not None and abs(res.consensus - expected) <= tol
    detail = res.to_dict()
    for c in detail["curves"]:
        c.pop("samples", None)
    return ItemResult(name, bool(ok), value, expected, detail)


def jwc_suite(G: Generator, p, gamma: float, config: SuiteConfig | None = None,
              _allow_half: bool = False) -> SuiteReport:
    """The six boundary statements at a null point with exponent ``gamma``.

    Both K-boundedness hypotheses are probed first; if either fails the
    suite declines and names it. Otherwise, with ``beta`` the freshly
    estimated dilation:

    (i)   ``<G,p>/(<z,p>-1) -> beta``
    (ii)  ``<G,v>/(<z,p>-1)**gamma -> 0``
    (iii) ``<dG(p),p> -> beta``
    (iv)  ``(<z,p>-1)**(1-gamma) <dG(p),v> -> 0``
    (v)   ``<dG(v),p>/(<z,p>-1)**gamma -> 0``
    (vi)  ``(<z,p>-1)**(1/2-gamma) <dG(v1),v2>`` is K-bounded

    for every ``v, v1, v2`` in an orthonormal basis of the complement of
    ``p``; the limits are restricted K-limits over the default curve set.
    """
    cfg = config or SuiteConfig()
    p = _vertex(p)
    if not (0 < gamma < 0.5 or (_allow_half and gamma == 0.5)):
        raise InvalidParameters(f"gamma must lie in (0, 1/2) (use the gamma=1/2 suite), got {gamma}")
    hyp, failed = _check_hypotheses(G, p, gamma, cfg)
    if failed:
        return SuiteReport(gamma, None, hyp, {}, declined=f"hypothesis failed: {', '.join(failed)}")

    est = dilation_estimate(G, p)
    if not est.converged:
        return SuiteReport(gamma, None, hyp, {}, declined="dilation estimate did not converge")
    beta = est.extrapolated.real
    curves = default_curves(p, cfg.rhos, cfg.disk_cs, cfg.curve_c)
    basis = orthogonal_basis(p) if p.shape[0] > 1 else np.zeros((0, p.shape[0]))

    def J(Z):
        return jacobian_batch(G, Z, cfg.nodes)

    def power(Z, e):
        return gap_power(Z, p, e)

    items = {}
    items["i"] = _limit_item("i", lambda Z: herm(G(Z), p) / (-_gap(Z, p)), p, curves, beta, cfg.beta_tol, cfg)
    items["iii"] = _limit_item("iii", lambda Z: herm(J(Z) @ p, p), p, curves, beta, cfg.beta_tol, cfg)

    sub = {"ii": [], "iv": [], "v": [], "vi": []}
    for v in basis:
        sub["ii"].append(_limit_item(
            "ii", lambda Z, v=v: herm(G(Z), v) / power(Z, gamma), p, curves, 0.0, cfg.zero_tol, cfg))
        sub["iv"].append(_limit_item(
            "iv", lambda Z, v=v: power(Z, 1 - gamma) * herm(J(Z) @ p, v), p, curves, 0.0, cfg.zero_tol, cfg))
        sub["v"].append(_limit_item(
            "v", lambda Z, v=v: herm(J(Z) @ v, p) / power(Z, gamma), p, curves, 0.0, cfg.zero_tol, cfg))
    for v1 in basis:
        for v2 in basis:
            rep = k_boundedness_probe(
                lambda Z, v1=v1, v2=v2: power(Z, 0.5 - gamma) * herm(J(Z) @ v1, v2),
                p, M=cfg.amplitude, depths=cfg.depths, k_min=cfg.k_min, sensitivity=cfg.sensitivity)
            sub["vi"].append(ItemResult("vi", rep.bounded, rep.growth_exponent, None, rep.to_dict()))

    for name in ("ii", "iv", "v", "vi"):
        parts = sub[name]
        if not parts:
            items[name] = ItemResult(name, True, 0.0, 0.0, {"note": "no orthogonal directions"})
            continue
        worst = max(parts, key=lambda it: (it.passed is False, abs(it.value) if it.value is not None else np.inf))
        items[name] = ItemResult(name, all(it.passed for it in parts), worst.value, worst.expected,
                                 {"directions": [it.detail for it in parts]})
    items = {k: items[k] for k in ("i", "ii", "iii", "iv", "v", "vi")}
    return SuiteReport(gamma, beta, hyp, items)


def jwc_suite_gamma_half(G: Generator, p, config: SuiteConfig | None = None) -> SuiteReport:
    """The suite at ``gamma = 1/2``, gated on K-boundedness with exponent 1/2
    and on ``p`` being a Hölder null point; declines naming whichever fails."""
    cfg = config or SuiteConfig()
    p = _vertex(p)
    hyp, failed = _check_hypotheses(G, p, 0.5, cfg)
    holder = holder_exponent(G, p)
    if failed or not holder.positive:
        reasons = [f"hypothesis failed: {k}" for k in failed]
        if not holder.positive:
            reasons.append(f"Hölder null point not detected ({holder.verdict})")
        return SuiteReport(0.5, None, hyp, {}, declined="; ".join(reasons), holder=holder)
    report = jwc_suite(G, p, 0.5, cfg, _allow_half=True)
    report.holder = holder
    return report
