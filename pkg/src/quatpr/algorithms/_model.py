"""Packed real form of a phaseless problem, shared by every solver.

A quaternion problem (``p = 4``) and a real one (``p = 1``) differ only in
the number of real components per unknown; the measurement ``k`` occupies
rows ``k*p .. k*p+p-1`` of ``M`` and its magnitude is the norm of that block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class PackedModel:
    M: np.ndarray
    p: int
    y: np.ndarray
    y_amp: np.ndarray
    row_norms_sq: np.ndarray

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def d(self) -> int:
        return self.M.shape[1] // self.p

    def project(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(U, |U|^2)`` with ``U[k]`` the components of ``alpha_k^* z``."""
        U = (self.M @ z).reshape(self.n, self.p)
        return U, np.einsum("kc,kc->k", U, U)

    def adjoint(self, coef: np.ndarray, U: np.ndarray) -> np.ndarray:
        """``sum_k coef_k alpha_k (alpha_k^* z)`` given ``U = A z``."""
        return self.M.T @ (coef[:, None] * U).ravel()

    def weighted_gram(self, w: np.ndarray) -> np.ndarray:
        """Packed ``sum_k w_k alpha_k alpha_k^*``."""
        return (self.M.T * np.repeat(w, self.p)) @ self.M

    def pack(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        expected = (self.d, 4) if self.p == 4 else (self.d,)
        if z.shape != expected:
            raise ValueError(f"iterate has shape {z.shape}, expected {expected}")
        return z.ravel()

    def unpack(self, z: np.ndarray) -> np.ndarray:
        return z.reshape(self.d, 4) if self.p == 4 else z.copy()


def model_of(E, obs) -> PackedModel:
    """Build the packed model from an ensemble-like object and observations.

    ``E`` must expose ``packed``, ``row_norms_sq`` and optionally ``components``
    (defaults to 4, a quaternion ensemble).
    """
    p = getattr(E, "components", 4)
    y = np.asarray(obs.y, dtype=np.float64)
    if y.shape[0] != E.n:
        raise ValueError(f"{y.shape[0]} observations for an ensemble with {E.n} rows")
    return PackedModel(
        M=E.packed,
        p=p,
        y=y,
        y_amp=np.asarray(obs.y_amp, dtype=np.float64),
        row_norms_sq=E.row_norms_sq,
    )
