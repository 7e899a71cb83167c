"""Planar k-ads and their Kendall shapes as points of CP^{k-2}."""
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import DegenerateKAd, DimensionMismatch, DomainError
from .manifolds import vw_embed


@dataclass(frozen=True)
class KAdConfig:
    """A labeled configuration of k planar landmarks ``x + iy``."""

    id: str
    landmarks: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.landmarks, dtype=complex).ravel()
        if len(z) < 3:
            raise DomainError(f"{self.id}: a k-ad needs k >= 3 landmarks")
        if not np.all(np.isfinite(z)):
            raise DomainError(f"{self.id}: non-finite coordinates")
        object.__setattr__(self, "landmarks", z)

    @property
    def k(self):
        return len(self.landmarks)

    @classmethod
    def from_xy(cls, id, xy):
        xy = np.asarray(xy, dtype=float)
        return cls(id, xy[:, 0] + 1j * xy[:, 1])


@dataclass(frozen=True)
class ShapePoint:
    """Unit-norm representative in C^{k-1}; the phase is arbitrary."""

    k: int
    rep: np.ndarray
    source_id: Optional[str] = None

    def embed(self):
        return vw_embed(self.rep)

    def landmarks(self):
        """Centered unit-size k-ad reconstructed through the Helmert inverse."""
        return helmert_submatrix(self.k).T @ self.rep


@lru_cache(maxsize=None)
def _helmert(k):
    h = np.zeros((k - 1, k))
    for j in range(1, k):
        h[j - 1, :j] = 1.0
        h[j - 1, j] = -j
        h[j - 1] /= np.sqrt(j * (j + 1))
    h.setflags(write=False)
    return h


def helmert_submatrix(k):
    """Helmert matrix without its constant row: ``H 1 = 0``, ``H H^T = I``.

    Row ``j`` has ``j`` equal positive entries followed by the balancing
    entry ``-j/sqrt(j(j+1))``.
    """
    if k < 2:
        raise DomainError("Helmert submatrix needs k >= 2")
    return _helmert(k)


def to_shape(c: KAdConfig) -> ShapePoint:
    z = c.landmarks
    w = helmert_submatrix(c.k) @ (z - z.mean())
    norm = np.linalg.norm(w)
    if norm <= 1e-12 * max(1.0, np.max(np.abs(z))):
        raise DegenerateKAd(f"{c.id}: all landmarks coincide")
    return ShapePoint(c.k, w / norm, c.id)


def shape_distance(a: ShapePoint, b: ShapePoint) -> float:
    """Chord distance between the Veronese-Whitney images."""
    if a.k != b.k:
        raise DimensionMismatch(f"k={a.k} vs k={b.k}")
    overlap = abs(np.vdot(a.rep, b.rep)) ** 2
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * overlap)))
