"""Holomorphic vector fields on the ball, the example catalog and Cauchy Jacobians.

``G.func`` acts on batches of shape ``(..., n)``. Catalog entries compute every
power of ``1 - z1`` from the gap itself so that values on the radial ladder
``z1 = 1 - 2**-k`` carry no cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ball_geometry import (
    DimensionError,
    DomainError,
    InvalidParameters,
    as_cvec,
    herm,
    koranyi_gauge,
    one_minus_norm_sq,
    orthogonal_basis,
    perturbation_delta,
)
from .sampling import DEFAULT_SEED, sobol_ball

__all__ = [
    "AdmissibleParams13",
    "ConditionReport",
    "Generator",
    "builtin",
    "disk_grid_check",
    "eqdue_defect",
    "example_1_2",
    "example_1_3",
    "from_callable",
    "generator_condition_check",
    "jacobian",
    "jacobian_batch",
]


@dataclass(frozen=True)
class Generator:
    """A holomorphic map ``G: B^n -> C^n`` with optional closed-form Jacobian."""

    dim: int
    func: Callable[[np.ndarray], np.ndarray]
    label: str
    params: dict = field(default_factory=dict)
    analytic_jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    self_map: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, z) -> np.ndarray:
        z = as_cvec(z)
        if z.shape[-1] != self.dim:
            raise DimensionError(f"{self.label} acts on C^{self.dim}, got C^{z.shape[-1]}")
        return self.func(z)

    def spec(self) -> dict:
        return {"label": self.label, "dim": self.dim, "params": dict(self.params)}


def from_callable(func: Callable, dim: int, label: str = "custom", jac: Callable | None = None) -> Generator:
    """Wrap a user map; ``func`` must accept batches of shape ``(..., dim)``."""
    return Generator(dim, func, label, {}, jac)


def _w(z: np.ndarray) -> np.ndarray:
    return 1.0 - z[..., 0]


def example_1_2(alpha: float, n: int = 2) -> Generator:
    """``G(z, w) = (-z(1-z), -w(1-z)**-alpha)``; extra coordinates copy the second."""
    if not 0 < alpha < 0.5:
        raise InvalidParameters(f"alpha must lie in (0, 1/2), got {alpha}")
    if n < 2:
        raise InvalidParameters("example 1.2 needs n >= 2")

    def func(z):
        w = _w(z)
        out = np.empty_like(z)
        out[..., 0] = -z[..., 0] * w
        out[..., 1:] = -z[..., 1:] * (w ** -alpha)[..., None]
        return out

    def jac(z):
        z = as_cvec(z)
        w = _w(z)
        J = np.zeros(z.shape + (n,), dtype=complex)
        J[..., 0, 0] = -1.0 + 2.0 * z[..., 0]
        J[..., 1:, 0] = -alpha * z[..., 1:] * (w ** (-alpha - 1.0))[..., None]
        for j in range(1, n):
            J[..., j, j] = -(w ** -alpha)
        return J

    return Generator(n, func, "example1.2", {"alpha": alpha, "n": n}, jac)


@dataclass(frozen=True)
class AdmissibleParams13:
    """Parameters ``a = 1 - beta``, ``c``, ``alpha_prime`` of the one-variable map

    ``f(zeta) = zeta + (1 - a)(1 - zeta) + c (1 - zeta)**(1 + alpha_prime)``,

    validated against the sufficient bounds ``a < 1/(1 + 2 eps D**(1+ap))``
    and ``c < 2**(1-ap) eps a`` that make ``f`` a self-map of the disk.
    """

    a: float
    c: float
    alpha_prime: float

    def __post_init__(self):
        bad = self.violations(self.a, self.c, self.alpha_prime)
        if bad:
            raise InvalidParameters("; ".join(bad))

    @staticmethod
    def constants(alpha_prime: float) -> tuple[float, float, float]:
        eps = np.cos(alpha_prime * np.pi / 2)
        C = np.tan(np.pi / (2 * (1 + alpha_prime)))
        return float(eps), float(C), float(np.sqrt(1 + C * C))

    @classmethod
    def bounds(cls, a: float, alpha_prime: float) -> tuple[float, float]:
        """Upper bounds for ``a`` and for ``c`` (the latter depends on ``a``)."""
        eps, _, D = cls.constants(alpha_prime)
        return 1.0 / (1.0 + 2.0 * eps * D ** (1 + alpha_prime)), 2 ** (1 - alpha_prime) * eps * a

    @classmethod
    def violations(cls, a: float, c: float, alpha_prime: float) -> list[str]:
        if not 0 < alpha_prime < 1:
            return [f"alpha_prime={alpha_prime} not in (0, 1)"]
        a_max, c_max = cls.bounds(a, alpha_prime)
        bad = []
        if not a > 0:
            bad.append(f"a={a} must be > 0")
        if not c > 0:
            bad.append(f"c={c} must be > 0")
        if not a < a_max:
            bad.append(f"a={a} violates a < {a_max:.6g} for alpha_prime={alpha_prime:g}")
        if not c < c_max:
            bad.append(f"c={c} violates c < {c_max:.6g} (= 2^(1-ap) eps a)")
        return bad

    @classmethod
    def chain_violations(cls, a: float, c: float, alpha_prime: float) -> list[str]:
        """Violations of the two inequalities the term-by-term estimate really needs.

        ``c < 2**(1-ap) eps a`` handles the ``c^2`` term and
        ``a^2 + 2**ap D**(1+ap) c < a`` the sector ``|arg w| < pi/(2(1+ap))``.
        Substituting the first into the second gives ``a + 2 eps D**(1+ap) < 1``,
        which is stricter than the ``a < 1/(1 + 2 eps D**(1+ap))`` bound.
        """
        if not 0 < alpha_prime < 1:
            return [f"alpha_prime={alpha_prime} not in (0, 1)"]
        eps, _, D = cls.constants(alpha_prime)
        bad = []
        if not 0 < c < 2 ** (1 - alpha_prime) * eps * a:
            bad.append("c >= 2^(1-ap) eps a")
        if not 0 < a < 1 or not a * a + 2**alpha_prime * D ** (1 + alpha_prime) * c < a:
            bad.append("a^2 + 2^ap D^(1+ap) c >= a")
        return bad

    @property
    def eps(self) -> float:
        return self.constants(self.alpha_prime)[0]

    @property
    def C(self) -> float:
        return self.constants(self.alpha_prime)[1]

    @property
    def D(self) -> float:
        return self.constants(self.alpha_prime)[2]

    @property
    def beta(self) -> float:
        return 1.0 - self.a

    def f_from_gap(self, w):
        """``f`` at ``zeta = 1 - w``."""
        w = np.asarray(w, dtype=complex)
        return 1.0 - self.a * w + self.c * w ** (1 + self.alpha_prime)


def disk_grid_check(a: float, c: float, alpha_prime: float, m: int = 10_000) -> tuple[bool, float]:
    """Brute-force ``|f| < 1`` on a polar grid of the disk seen from ``zeta = 1``.

    Points are ``zeta = 1 - w`` with ``w = u * 2cos(phi) * e^{i phi}``, which
    covers the disk; ``u`` is half log-spaced, half uniform so the region near
    ``zeta = 1`` (where the bounds bite) is resolved. ``|f|^2 < 1`` is tested
    in expanded form to avoid cancellation. Returns ``(passes, worst margin)``.
    """
    k = int(np.sqrt(m))
    phi = np.linspace(-np.pi / 2, np.pi / 2, k + 2)[1:-1]
    u = np.concatenate([np.logspace(-10, -0.5, k // 2), np.linspace(0.3, 1.0, k - k // 2, endpoint=False)])
    P, U = np.meshgrid(phi, u)
    w = (U * 2 * np.cos(P)) * np.exp(1j * P)
    ap = alpha_prime
    wa = w**ap
    lhs = a * a * np.abs(w) ** 2 + c * c * np.abs(w) ** (2 + 2 * ap) + 2 * c * (w * wa).real
    rhs = 2 * a * w.real + 2 * a * c * np.abs(w) ** 2 * wa.real
    margin = (lhs - rhs) / np.abs(w)
    return bool(np.all(margin < 0)), float(np.max(margin))


def example_1_3(params: AdmissibleParams13 | None = None, n: int = 2, convention: str = "id-F",
                **kw) -> Generator:
    """The generator built from ``F(z) = f(z1) e1``.

    ``convention="id-F"`` gives ``G = id - F``, whose radial quotient
    ``<G(t e1), e1>/(t - 1)`` tends to ``1 - a``. ``convention="F-id"`` gives
    ``G = F - id``, the field that actually generates a semigroup of
    self-maps for ``dPhi/dt = G(Phi)``; its quotient tends to ``a - 1``.
    """
    if params is None:
        params = AdmissibleParams13(**kw)
    if n < 2:
        raise InvalidParameters("example 1.3 needs n >= 2")
    if convention not in ("id-F", "F-id"):
        raise InvalidParameters(f"unknown convention {convention!r}")
    a, c, ap = params.a, params.c, params.alpha_prime
    sign = 1.0 if convention == "id-F" else -1.0

    def func(z):
        w = _w(z)
        out = z.copy()
        out[..., 0] = -(1 - a) * w - c * w ** (1 + ap)
        return sign * out

    def jac(z):
        z = as_cvec(z)
        w = _w(z)
        J = np.zeros(z.shape + (n,), dtype=complex)
        J[..., 0, 0] = (1 - a) + c * (1 + ap) * w**ap
        for j in range(1, n):
            J[..., j, j] = 1.0
        return sign * J

    def self_map(z):
        z = as_cvec(z)
        out = np.zeros_like(z)
        out[..., 0] = params.f_from_gap(_w(z))
        return out

    meta = {"a": a, "c": c, "alpha_prime": ap, "n": n, "convention": convention}
    return Generator(n, func, "example1.3", meta, jac, self_map)


def builtin(label: str, n: int = 2, A=None) -> Generator:
    """Trivial oracles: ``zero``, ``minus_identity``, ``logistic_1d``, ``linear``."""
    if label == "zero":
        return Generator(n, np.zeros_like, "zero", {"n": n},
                         lambda z: np.zeros(np.shape(z) + (n,), dtype=complex))
    if label == "minus_identity":
        return Generator(n, lambda z: -z, "minus_identity", {"n": n},
                         lambda z: np.broadcast_to(-np.eye(n, dtype=complex), np.shape(z) + (n,)).copy())
    if label in ("logistic_1d", "logistic"):
        return Generator(1, lambda z: -z * (1.0 - z), "logistic_1d", {},
                         lambda z: (-1.0 + 2.0 * as_cvec(z))[..., None])
    if label == "linear":
        if A is None:
            raise InvalidParameters("linear generator needs a matrix A")
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        if A.shape[0] != A.shape[1]:
            raise InvalidParameters("A must be square")
        m = A.shape[0]
        return Generator(m, lambda z: z @ A.T, "linear", {"A": A.tolist()},
                         lambda z: np.broadcast_to(A, np.shape(z) + (m,)).copy())
    raise InvalidParameters(f"unknown builtin generator {label!r}")


@dataclass
class ConditionReport:
    """Outcome of the origin-vanishing plus ``Re<G(z), z> <= 0`` check."""

    origin_norm: float
    worst_value: float
    worst_point: np.ndarray
    violations: int
    samples: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.origin_norm <= self.tol and self.violations == 0

    def to_dict(self) -> dict:
        return {
            "origin_norm": self.origin_norm,
            "worst_value": self.worst_value,
            "worst_point": [[float(x.real), float(x.imag)] for x in self.worst_point],
            "violations": self.violations,
            "samples": self.samples,
            "passed": self.passed,
        }


def generator_condition_check(G: Generator, samples: int = 10_000, seed: int | None = DEFAULT_SEED,
                              tol: float = 1e-12) -> ConditionReport:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    origin = float(np.linalg.norm(G(np.zeros(G.dim, dtype=complex))))
    z = sobol_ball(G.dim, samples, seed)
    vals = herm(G(z), z).real
    i = int(np.argmax(vals))
    return ConditionReport(origin, float(vals[i]), z[i], int(np.sum(vals > tol)), samples, tol)


def eqdue_defect(G: Generator, p, z):
    """``Re[<G(z),z>/(1-|z|^2) - <G(z),p>/(1-<z,p>)]``, batched over ``z``.

    Twice its sup over the ball is the dilation at a boundary null point ``p``.
    """
    z = as_cvec(z)
    p = as_cvec(p)
    g = G(z)
    lam = herm(z, p)
    d = np.where(np.real(lam) > 0.5, one_minus_norm_sq(z, p), one_minus_norm_sq(z))
    if np.any(~(d > 0)):
        raise DomainError("point outside the open unit ball")
    return (herm(g, z) / d - herm(g, p) / (1.0 - lam)).real


def _circle_derivative(G: Generator, z: np.ndarray, u: np.ndarray, r: float, omega: np.ndarray) -> np.ndarray:
    """``d/dlam G(z + lam u)`` at 0 by the trapezoid rule on ``|lam| = r``."""
    pts = z[None, :] + (r * omega)[:, None] * u[None, :]
    vals = G(pts)
    return (vals * np.conj(omega)[:, None]).mean(axis=0) / r


def _fit_radius(z: np.ndarray, u: np.ndarray, r: float, omega: np.ndarray) -> float:
    while True:
        pts = z[None, :] + (r * omega)[:, None] * u[None, :]
        if np.all(np.linalg.norm(pts, axis=1) < 1.0):
            return r
        r /= 2
        if r < 1e-300:
            raise DomainError("Cauchy circle radius underflowed")


def jacobian(G: Generator, z, nodes: int = 64, radius: float | None = None, mode: str = "default",
             p=None, M: float = 2.0, M_prime: float = 4.0) -> np.ndarray:
    """Jacobian ``dG_z`` by Cauchy's integral formula on coordinate circles.

    Column ``j`` is ``(1/2 pi i) \\oint G(z + zeta e_j) / zeta^2 dzeta`` with the
    trapezoid rule on ``nodes`` points, spectrally accurate for holomorphic
    ``G``. The default radius is ``(1 - |z|)/4``; circles leaving the ball are
    halved. ``mode="koranyi"`` uses the circles ``delta|1-<z,p>|`` along ``p``
    and ``delta|1-<z,p>|**0.5`` along an orthonormal complement, with
    ``delta = (1/M - 1/M')/3``, so every node stays in ``K(p, M')``.
    """
    z = as_cvec(z)
    if z.ndim != 1:
        raise DimensionError("jacobian takes a single point")
    if nodes < 16:
        raise ValueError("nodes must be >= 16")
    n = G.dim
    if not np.linalg.norm(z) < 1:
        raise DomainError("z must lie in the open unit ball")
    omega = np.exp(2j * np.pi * np.arange(nodes) / nodes)

    if mode == "default":
        r0 = (1.0 - np.linalg.norm(z)) / 4 if radius is None else radius
        cols = []
        for j in range(n):
            e = np.zeros(n, dtype=complex)
            e[j] = 1.0
            cols.append(_circle_derivative(G, z, e, _fit_radius(z, e, r0, omega), omega))
        return np.column_stack(cols)

    if mode == "koranyi":
        if p is None:
            raise InvalidParameters("koranyi radius mode needs the vertex p")
        p = as_cvec(p)
        if not koranyi_gauge(z, p) < M:
            raise DomainError(f"z is not in K(p, {M})")
        delta = perturbation_delta(M, M_prime)
        g = abs(complex(1.0 - herm(z, p)))
        frame = np.vstack([p[None, :], orthogonal_basis(p)]) if n > 1 else p[None, :]
        radii = [delta * g] + [delta * np.sqrt(g)] * (n - 1)
        D = np.column_stack([
            _circle_derivative(G, z, u, _fit_radius(z, u, r, omega), omega) for u, r in zip(frame, radii)
        ])
        # D[:, k] = J u_k, so J = D U^H with U the frame as columns
        return D @ np.conj(frame)
    raise InvalidParameters(f"unknown radius mode {mode!r}")


def jacobian_batch(G: Generator, Z, nodes: int = 64) -> np.ndarray:
    """Cauchy Jacobians at many points at once, radius ``(1 - |z|)/4`` each.

    Returns shape ``(m, n, n)``. Circles of this radius never leave the ball.
    """
    Z = np.atleast_2d(as_cvec(Z))
    if nodes < 16:
        raise ValueError("nodes must be >= 16")
    r = (1.0 - np.linalg.norm(Z, axis=1)) / 4
    if np.any(~(r > 0)):
        raise DomainError("points must lie in the open unit ball")
    omega = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    m, n = Z.shape
    J = np.empty((m, n, n), dtype=complex)
    for j in range(n):
        pts = np.repeat(Z[:, None, :], nodes, axis=1)
        pts[:, :, j] += r[:, None] * omega[None, :]
        vals = G(pts)
        J[:, :, j] = (vals * np.conj(omega)[None, :, None]).mean(axis=1) / r[:, None]
    return J
