"""Complex vectors, the unit ball and Korányi approach regions.

Points of C^n are plain ``numpy`` complex arrays; every function accepts a
single point of shape ``(n,)`` or a batch of shape ``(..., n)`` and reduces
over the last axis.

Near a boundary point ``p`` the quantities ``1 - <z,p>`` and ``1 - |z|^2`` are
computed from the gap ``w = 1 - <z,p>`` rather than by subtracting numbers
close to one. For ``p = e1`` and ``Re z1 >= 1/2`` the gap is exact in floating
point, which is what keeps limit probes usable down to ``1 - t = 2**-40``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionError",
    "DomainError",
    "InvalidParameters",
    "KoranyiRegion",
    "as_cvec",
    "basis_vector",
    "ball_status",
    "decompose",
    "gap",
    "gap_power",
    "herm",
    "in_koranyi",
    "koranyi_gauge",
    "koranyi_perturbation",
    "norm",
    "one_minus_norm_sq",
    "orthogonal_basis",
    "perturbation_delta",
]

# points with |z| in [1 - NEAR_BOUNDARY, 1) are accepted but flagged
NEAR_BOUNDARY = 1e-15


class DimensionError(ValueError):
    """Operands live in different C^n."""


class DomainError(ValueError):
    """A point is not in the open unit ball (or a vertex is not on the sphere)."""


class InvalidParameters(ValueError):
    """Parameters violate an operation's stated constraints."""


def as_cvec(z) -> np.ndarray:
    """Coerce ``z`` to a complex array with at least one axis."""
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.shape[-1] < 1:
        raise DimensionError("vectors need at least one coordinate")
    return arr


def basis_vector(n: int, j: int) -> np.ndarray:
    """The standard basis vector e_j of C^n (1-based index, as in e1, e2)."""
    if not 1 <= j <= n:
        raise DimensionError(f"e{j} does not exist in C^{n}")
    e = np.zeros(n, dtype=complex)
    e[j - 1] = 1.0
    return e


def _check_dims(z: np.ndarray, w: np.ndarray) -> None:
    if z.shape[-1] != w.shape[-1]:
        raise DimensionError(f"dimension mismatch: {z.shape[-1]} vs {w.shape[-1]}")


def herm(z, w):
    """Canonical hermitian product sum_j z_j * conj(w_j)."""
    z = as_cvec(z)
    w = as_cvec(w)
    _check_dims(z, w)
    return np.sum(z * np.conj(w), axis=-1)


def norm(z):
    return np.linalg.norm(as_cvec(z), axis=-1)


def _unit(p: np.ndarray) -> np.ndarray:
    if p.ndim != 1:
        raise DimensionError("vertex must be a single vector")
    if abs(np.linalg.norm(p) - 1.0) > 1e-12:
        raise DomainError(f"vertex must have unit norm, got {np.linalg.norm(p)!r}")
    return p


def gap(z, p):
    """``1 - <z,p>``, exact when ``p`` is a basis vector and ``Re<z,p> >= 1/2``."""
    return 1.0 - herm(z, p)


def gap_power(z, p, exponent: float):
    """Holomorphic branch of ``(<z,p> - 1)**exponent`` on the ball.

    Uses ``exp(i*pi*exponent) * (1 - <z,p>)**exponent`` with the principal
    power of ``1 - <z,p>``, which has positive real part on B^n. The principal
    power of ``<z,p> - 1`` itself would jump across the real diameter.
    """
    return np.exp(1j * np.pi * exponent) * gap(z, p) ** exponent


def one_minus_norm_sq(z, p=None):
    """``1 - |z|^2``; relative to vertex ``p`` when given, to avoid cancellation."""
    z = as_cvec(z)
    if p is None:
        return 1.0 - np.sum(np.abs(z) ** 2, axis=-1)
    p = as_cvec(p)
    _check_dims(z, p)
    lam = herm(z, p)
    w = 1.0 - lam
    perp = z - np.asarray(lam)[..., None] * p
    return 2.0 * w.real - np.abs(w) ** 2 - np.sum(np.abs(perp) ** 2, axis=-1)


def ball_status(z) -> str:
    """'interior' or 'near-boundary'; raises DomainError outside the open ball."""
    r = float(norm(z))
    if not r < 1.0:
        raise DomainError(f"|z| = {r!r} is not < 1")
    return "near-boundary" if r >= 1.0 - NEAR_BOUNDARY else "interior"


def koranyi_gauge(z, p):
    """|1 - <z,p>| / (1 - |z|); z lies in K(p, M) iff the gauge is < M."""
    z = as_cvec(z)
    p = _unit(as_cvec(p))
    _check_dims(z, p)
    d = one_minus_norm_sq(z, p)
    if np.any(~(d > 0)):
        raise DomainError("point outside the open unit ball")
    r = np.sqrt(np.maximum(1.0 - d, 0.0))
    return np.abs(gap(z, p)) / (d / (1.0 + r))


def in_koranyi(z, region: "KoranyiRegion"):
    return koranyi_gauge(z, region.vertex) < region.amplitude


@dataclass(frozen=True)
class KoranyiRegion:
    vertex: np.ndarray
    amplitude: float

    def __post_init__(self):
        v = _unit(as_cvec(self.vertex))
        object.__setattr__(self, "vertex", v)
        if not self.amplitude > 1:
            raise InvalidParameters(f"amplitude must be > 1, got {self.amplitude}")

    def __contains__(self, z) -> bool:
        try:
            return bool(in_koranyi(z, self))
        except DomainError:
            return False


def decompose(z, p):
    """Split ``z = lam * p + z_perp`` with ``z_perp`` orthogonal to ``p``."""
    z = as_cvec(z)
    p = _unit(as_cvec(p))
    _check_dims(z, p)
    lam = herm(z, p)
    return lam, z - np.asarray(lam)[..., None] * p


def orthogonal_basis(p) -> np.ndarray:
    """Orthonormal basis of the complement of ``p``, one vector per row.

    For ``p = e1`` this is exactly ``e2, ..., en``.
    """
    p = _unit(as_cvec(p))
    n = p.shape[0]
    nz = np.flatnonzero(np.abs(p) > 1e-15)
    if nz.size == 1:
        k = nz[0]
        return np.array([basis_vector(n, j + 1) for j in range(n) if j != k]).reshape(n - 1, n)
    m = np.column_stack([p, np.eye(n, dtype=complex)])
    q, _ = np.linalg.qr(m)
    return q[:, 1:n].T.copy()


def perturbation_delta(M: float, M_prime: float) -> float:
    if not M_prime > M > 1:
        raise InvalidParameters(f"need M' > M > 1, got M={M}, M'={M_prime}")
    return (1.0 / M - 1.0 / M_prime) / 3.0


def koranyi_perturbation(z, p, M, M_prime, lam, u_perp) -> bool:
    """Whether ``(lam, u_perp)`` is within the admissible perturbation bounds.

    True iff ``|lam| <= delta |<z,p> - 1|`` and
    ``|u_perp| <= delta |<z,p> - 1|**0.5`` with
    ``delta = (1/M - 1/M') / 3``; such a perturbation of a point of K(p, M)
    stays in K(p, M').
    """
    delta = perturbation_delta(M, M_prime)
    z = as_cvec(z)
    p = as_cvec(p)
    u_perp = as_cvec(u_perp)
    _check_dims(z, u_perp)
    if abs(complex(herm(u_perp, p))) > 1e-12 * max(1.0, float(np.linalg.norm(u_perp))):
        raise InvalidParameters("u_perp must be orthogonal to the vertex")
    if not koranyi_gauge(z, p) < M:
        raise DomainError(f"z is not in K(p, {M})")
    g = abs(complex(gap(z, p)))
    return bool(abs(lam) <= delta * g and np.linalg.norm(u_perp) <= delta * np.sqrt(g))
