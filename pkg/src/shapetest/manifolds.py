"""Embedded manifolds: the unit sphere in R^N and CP^{k-2} under the
Veronese-Whitney map ``[z] -> z z*``.

Ambient points are numpy arrays: real N-vectors for the sphere, complex
``(k-1) x (k-1)`` Hermitian matrices for VW. Every descriptor also exposes a
fixed isometric real coordinate system on its ambient space
(:meth:`to_coords`), which is where covariance matrices and the ``B``
matrices live.
"""
from dataclasses import dataclass
import enum

import numpy as np

from .cxlinalg import hermitian_eig
from .errors import (
    DescriptorMismatch,
    DomainError,
    FocalPoint,
    NotNormalized,
    NotOnManifold,
)

SQRT2 = np.sqrt(2.0)


class Mode(str, enum.Enum):
    NEAREST = "nearest"
    FARTHEST = "farthest"


def _mode(mode):
    return Mode(mode.value if isinstance(mode, Mode) else str(mode).lower())


@dataclass(frozen=True)
class TangentFrame:
    """Orthonormal basis of the tangent space at ``base``.

    ``basis`` stacks ambient vectors along axis 0; ``coords`` holds the same
    vectors in ambient real coordinates, one row each.
    """

    base: np.ndarray
    basis: np.ndarray
    coords: np.ndarray

    @property
    def dim(self):
        return len(self.basis)

    def tan(self, v, descriptor):
        """Frame coordinates of the ambient vector ``v``."""
        return self.coords @ descriptor.to_coords(v)


class EmbeddingDescriptor:
    kind = None

    @property
    def intrinsic_dim(self):
        raise NotImplementedError

    @property
    def ambient_dim(self):
        raise NotImplementedError

    @property
    def point_shape(self):
        raise NotImplementedError

    def check_ambient(self, y):
        y = np.asarray(y)
        if y.shape[-len(self.point_shape):] != self.point_shape:
            raise DescriptorMismatch(
                f"{self} expects ambient shape {self.point_shape}, got {y.shape}"
            )
        return y

    def chord_distance_sq(self, p, q):
        p, q = self.check_ambient(p), self.check_ambient(q)
        return float(np.sum(np.abs(p - q) ** 2))

    def projection(self, y, mode):
        if _mode(mode) is Mode.FARTHEST:
            return self.farthest_projection(y)
        return self.nearest_projection(y)

    def differential_matrix(self, y, mode):
        """Matrix of ``v -> d_y P(v)`` in ambient real coordinates."""
        basis = self.coordinate_basis()
        images = self.projection_differential(y, basis, mode)
        return self.to_coords(images).T


@dataclass(frozen=True)
class Sphere(EmbeddingDescriptor):
    N: int
    kind = "sphere"

    def __post_init__(self):
        if self.N < 2:
            raise DomainError("sphere requires N >= 2")

    def __str__(self):
        return f"Sphere(N={self.N})"

    @property
    def intrinsic_dim(self):
        return self.N - 1

    @property
    def ambient_dim(self):
        return self.N

    @property
    def point_shape(self):
        return (self.N,)

    def check_point(self, p, tol=1e-12):
        p = np.asarray(self.check_ambient(p), dtype=float)
        if np.any(np.abs(np.linalg.norm(p, axis=-1) - 1.0) > tol):
            raise NotOnManifold("point is not on the unit sphere")
        return p

    def to_coords(self, y):
        return np.asarray(y, dtype=float)

    def from_coords(self, c):
        return np.asarray(c, dtype=float)

    def coordinate_basis(self):
        return np.eye(self.N)

    def _norm(self, y):
        y = np.asarray(self.check_ambient(y), dtype=float)
        r = np.linalg.norm(y)
        if r < 1e-12:
            raise FocalPoint("the origin is focal for the sphere")
        return y, r

    def farthest_projection(self, y):
        y, r = self._norm(y)
        return -y / r

    def nearest_projection(self, y):
        y, r = self._norm(y)
        return y / r

    def projection_differential(self, y, v, mode):
        y, r = self._norm(y)
        yhat = y / r
        v = np.asarray(v, dtype=float)
        out = (v - np.multiply.outer(v @ yhat, yhat)) / r
        return -out if _mode(mode) is Mode.FARTHEST else out

    def tangent_frame_at(self, p):
        p = self.check_point(p, tol=1e-9)
        vecs = [p / np.linalg.norm(p)]
        for e in np.eye(self.N):
            if len(vecs) == self.N:
                break
            w = e.copy()
            for _ in range(2):
                w -= sum((w @ b) * b for b in vecs)
            nw = np.linalg.norm(w)
            if nw > 1e-3:
                vecs.append(w / nw)
        basis = np.array(vecs[1:])
        return TangentFrame(p, basis, basis.copy())


@dataclass(frozen=True)
class VeroneseWhitney(EmbeddingDescriptor):
    k: int
    kind = "vw"

    def __post_init__(self):
        if self.k < 3:
            raise DomainError("Veronese-Whitney embedding requires k >= 3")

    def __str__(self):
        return f"VeroneseWhitney(k={self.k})"

    @property
    def q(self):
        return self.k - 1

    @property
    def intrinsic_dim(self):
        return 2 * self.k - 4

    @property
    def ambient_dim(self):
        return self.q**2

    @property
    def point_shape(self):
        return (self.q, self.q)

    def embed(self, z):
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.q,):
            raise DescriptorMismatch(f"expected a vector of length {self.q}")
        return vw_embed(z)

    def check_point(self, p, tol=1e-9):
        p = np.asarray(self.check_ambient(p), dtype=complex)
        ph = np.swapaxes(p.conj(), -1, -2)
        tr = np.trace(p, axis1=-2, axis2=-1)
        if (
            np.any(np.abs(p - ph) > tol)
            or np.any(np.abs(tr - 1.0) > tol)
            or np.any(np.abs(p @ p - p) > tol)
        ):
            raise NotOnManifold("matrix is not a rank-one Hermitian projector")
        return p

    # coordinates: diagonal reals, then sqrt(2)*(Re, Im) of each upper entry
    def _triu(self):
        return np.triu_indices(self.q, 1)

    def to_coords(self, y):
        y = np.asarray(self.check_ambient(y))
        iu, ju = self._triu()
        diag = np.real(np.diagonal(y, axis1=-2, axis2=-1))
        upper = y[..., iu, ju]
        pairs = np.stack([upper.real, upper.imag], axis=-1) * SQRT2
        return np.concatenate([diag, pairs.reshape(*pairs.shape[:-2], -1)], axis=-1)

    def from_coords(self, c):
        c = np.asarray(c, dtype=float)
        q = self.q
        iu, ju = self._triu()
        out = np.zeros(c.shape[:-1] + (q, q), dtype=complex)
        out[..., np.arange(q), np.arange(q)] = c[..., :q]
        pairs = c[..., q:].reshape(*c.shape[:-1], -1, 2) / SQRT2
        vals = pairs[..., 0] + 1j * pairs[..., 1]
        out[..., iu, ju] = vals
        out[..., ju, iu] = vals.conj()
        return out

    def coordinate_basis(self):
        return self.from_coords(np.eye(self.ambient_dim))

    def eig(self, y):
        y = np.asarray(self.check_ambient(y))
        return hermitian_eig(y)

    def anchor_index(self, eig, mode):
        idx = 0 if _mode(mode) is Mode.FARTHEST else eig.dim - 1
        if not eig.is_simple(idx):
            which = "smallest" if idx == 0 else "largest"
            raise FocalPoint(
                f"{which} eigenvalue is not simple (gap below {eig.tie_tolerance:.1e})"
            )
        return idx

    def projection_from_eig(self, eig, mode):
        u = eig.eigenvectors[:, self.anchor_index(eig, mode)]
        return np.outer(u, u.conj())

    def farthest_projection(self, y):
        return self.projection_from_eig(self.eig(y), Mode.FARTHEST)

    def nearest_projection(self, y):
        return self.projection_from_eig(self.eig(y), Mode.NEAREST)

    def differential_from_eig(self, eig, v, mode):
        idx = self.anchor_index(eig, mode)
        u = eig.eigenvectors
        lam = eig.eigenvalues
        anchor = u[:, idx]
        gain = np.zeros(len(lam))
        others = np.arange(len(lam)) != idx
        gain[others] = 1.0 / (lam[idx] - lam[others])
        v = np.asarray(v, dtype=complex)
        c = np.einsum("ia,...ij,j->...a", u.conj(), v, anchor)
        w = (c * gain) @ u.T
        m = w[..., :, None] * anchor.conj()[None, :]
        return m + np.swapaxes(m.conj(), -1, -2)

    def projection_differential(self, y, v, mode):
        return self.differential_from_eig(self.eig(y), v, mode)

    def differential_matrix_from_eig(self, eig, mode):
        images = self.differential_from_eig(eig, self.coordinate_basis(), mode)
        return self.to_coords(images).T

    def frame_from_vectors(self, anchor, others):
        anchor = np.asarray(anchor, dtype=complex)
        others = np.asarray(others, dtype=complex)
        outer = others[:, None, :].conj() * anchor[None, :, None]
        upsilon = (outer + np.swapaxes(outer.conj(), -1, -2)) / SQRT2
        omega = 1j * (outer - np.swapaxes(outer.conj(), -1, -2)) / SQRT2
        basis = np.concatenate([upsilon, omega])
        base = np.outer(anchor, anchor.conj())
        return TangentFrame(base, basis, self.to_coords(basis))

    def frame_from_eig(self, eig, mode):
        idx = self.anchor_index(eig, mode)
        u = eig.eigenvectors
        keep = [a for a in range(eig.dim) if a != idx]
        return self.frame_from_vectors(u[:, idx], u[:, keep].T)

    def tangent_frame_at(self, p):
        p = self.check_point(p)
        # the spectrum of a projector is (0, ..., 0, 1); only the top one is simple
        return self.frame_from_eig(hermitian_eig(p), Mode.NEAREST)


def descriptor_from_json(obj):
    if obj["kind"] == "sphere":
        return Sphere(int(obj["N"]))
    if obj["kind"] == "vw":
        return VeroneseWhitney(int(obj["k"]))
    raise DomainError(f"unknown descriptor kind {obj['kind']!r}")


def vw_embed(z):
    """Rank-one projector ``z z*`` of a unit complex vector."""
    z = np.asarray(z, dtype=complex)
    if abs(np.linalg.norm(z) - 1.0) > 1e-10:
        raise NotNormalized(f"vector norm {np.linalg.norm(z)!r} is not 1")
    p = np.outer(z, z.conj())
    p[np.diag_indices_from(p)] = np.abs(z) ** 2
    return p


def chord_distance_sq(p, q, d):
    return d.chord_distance_sq(p, q)


def farthest_projection(y, d):
    return d.farthest_projection(y)


def nearest_projection(y, d):
    return d.nearest_projection(y)


def tangent_frame_at(p, d):
    return d.tangent_frame_at(p)


def projection_differential(y, v, d, mode):
    return d.projection_differential(y, v, mode)
