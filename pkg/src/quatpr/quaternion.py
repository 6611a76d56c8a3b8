"""Quaternion scalars and element-wise quaternion arithmetic on numpy arrays.

Quaternion-valued arrays carry their four components in a trailing axis of
length 4, ordered ``(w, x, y, z)`` = (real, i, j, k).  Every function here
broadcasts over the leading axes, so the same code handles scalars, vectors
``(d, 4)`` and matrices ``(d1, d2, 4)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

# |q|^2 below this is treated as an exact zero (subnormal underflow)
TINY = np.finfo(np.float64).tiny

_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


class DomainError(ValueError):
    """Raised when an operation is undefined for its input (e.g. 0^{-1})."""


def _as_q(a) -> np.ndarray:
    if isinstance(a, Quaternion):
        return a.components
    a = np.asarray(a, dtype=np.float64)
    if a.shape[-1:] != (4,):
        raise ValueError(f"quaternion arrays need a trailing axis of 4, got {a.shape}")
    return a


def left_matrix(q) -> np.ndarray:
    """Real 4x4 matrix ``L(q)`` with ``L(q) @ p == qmul(q, p)`` componentwise.

    Broadcasts: input ``(..., 4)`` gives ``(..., 4, 4)``.  ``L(conj(q)) == L(q).T``.
    """
    q = _as_q(q)
    w, x, y, z = np.moveaxis(q, -1, 0)
    rows = (
        np.stack([w, -x, -y, -z], axis=-1),
        np.stack([x, w, -z, y], axis=-1),
        np.stack([y, z, w, -x], axis=-1),
        np.stack([z, -y, x, w], axis=-1),
    )
    return np.stack(rows, axis=-2)


def qmul(a, b) -> np.ndarray:
    """Hamilton product ``a b`` (element-wise, broadcasting)."""
    a = _as_q(a)
    b = _as_q(b)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qconj(q) -> np.ndarray:
    return _as_q(q) * _CONJ


def qabs2(q) -> np.ndarray:
    q = _as_q(q)
    return np.einsum("...c,...c->...", q, q)


def qabs(q) -> np.ndarray:
    return np.sqrt(qabs2(q))


def qinv(q) -> np.ndarray:
    """Element-wise inverse ``conj(q) / |q|^2``; zero or subnormal entries raise."""
    q = _as_q(q)
    n2 = qabs2(q)
    if np.any(n2 < TINY):
        raise DomainError("inverse of a zero quaternion")
    return qconj(q) / n2[..., None]


def qsign(q) -> np.ndarray:
    """Phase ``q / |q|`` with the convention sign(0) = 1."""
    q = _as_q(q)
    n2 = qabs2(q)
    zero = n2 < TINY
    safe = np.where(zero, 1.0, np.sqrt(n2))
    out = q / safe[..., None]
    if np.any(zero):
        out = np.where(zero[..., None], np.array([1.0, 0.0, 0.0, 0.0]), out)
    return out


def real_part(q) -> np.ndarray:
    return _as_q(q)[..., 0]


def imag_part(q) -> np.ndarray:
    """``Im(q) = q - Re(q)``, i.e. the real component zeroed."""
    out = np.array(_as_q(q), copy=True)
    out[..., 0] = 0.0
    return out


def is_pure(q, atol: float = 0.0) -> bool:
    return bool(np.all(np.abs(real_part(q)) <= atol))


def random_unit(rng: np.random.Generator, size=()) -> np.ndarray:
    """Uniformly distributed unit quaternions (normalized 4D Gaussians)."""
    shape = tuple(np.atleast_1d(size)) if size != () else ()
    g = rng.standard_normal(shape + (4,))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TEXT = re.compile(
    rf"^\s*([+-]?{_NUM})([+-]{_NUM})i([+-]{_NUM})j([+-]{_NUM})k\s*$"
)


@dataclass(frozen=True)
class Quaternion:
    """Immutable quaternion ``w + x i + y j + z k``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=np.float64)
        if a.shape != (4,):
            raise ValueError(f"expected 4 components, got shape {a.shape}")
        return cls(*(float(c) for c in a))

    @classmethod
    def parse(cls, text: str) -> "Quaternion":
        """Inverse of ``str()``: accepts ``"w+xi+yj+zk"`` with explicit signs."""
        m = _TEXT.match(text)
        if m is None:
            raise ValueError(f"not a quaternion literal: {text!r}")
        return cls(*(float(g) for g in m.groups()))

    @property
    def components(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(qmul(self.components, other.components))
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __abs__(self) -> float:
        return float(np.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2))

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inverse(self) -> "Quaternion":
        return Quaternion.from_array(qinv(self.components))

    def sign(self) -> "Quaternion":
        return Quaternion.from_array(qsign(self.components))

    def parts(self) -> tuple[float, float, float, float]:
        return self.w, self.x, self.y, self.z

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> "Quaternion":
        return Quaternion(0.0, self.x, self.y, self.z)

    def is_pure(self) -> bool:
        return self.w == 0.0

    def __str__(self) -> str:
        return f"{self.w:.17g}{self.x:+.17g}i{self.y:+.17g}j{self.z:+.17g}k"


I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)
ONE = Quaternion(1.0, 0.0, 0.0, 0.0)


def qconj_abs_inv(q: Quaternion) -> tuple[Quaternion, float, Quaternion | None]:
    """Conjugate, modulus and inverse in one call; inverse is None for q == 0."""
    try:
        inv = q.inverse()
    except DomainError:
        inv = None
    return q.conj(), abs(q), inv


def parts(q) -> tuple:
    """Split into ``(re, p_i, p_j, p_k)``; arrays give component arrays."""
    if isinstance(q, Quaternion):
        return q.parts()
    q = _as_q(q)
    return tuple(np.moveaxis(q, -1, 0))
