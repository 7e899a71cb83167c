"""Extrinsic sample means/antimeans, anticovariance and the one-sample test."""
from dataclasses import dataclass
import enum
from typing import NamedTuple, Optional

import numpy as np

from .cxlinalg import EigenDecomposition, chi2_sf, hermitian_eig, sym_inv_sqrt
from .errors import (
    DescriptorMismatch,
    DomainError,
    SingularAnticovariance,
    SingularMatrix,
)
from .manifolds import EmbeddingDescriptor, Mode, TangentFrame, VeroneseWhitney


class Location(str, enum.Enum):
    MEAN = "mean"
    ANTIMEAN = "antimean"

    @property
    def mode(self):
        return Mode.NEAREST if self is Location.MEAN else Mode.FARTHEST


def as_location(kind):
    if isinstance(kind, Location):
        return kind
    return Location(str(kind).lower())


@dataclass(frozen=True)
class Sample:
    """Observations ``j(x_1), ..., j(x_n)`` stacked along axis 0."""

    descriptor: EmbeddingDescriptor
    points: np.ndarray
    ids: tuple = ()

    def __post_init__(self):
        pts = np.asarray(self.points)
        if pts.ndim == len(self.descriptor.point_shape):
            pts = pts[None]
        if len(pts) < 1:
            raise DomainError("a sample needs at least one point")
        self.descriptor.check_point(pts)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return len(self.points)

    @classmethod
    def from_shapes(cls, shapes):
        shapes = list(shapes)
        if not shapes:
            raise DomainError("no shapes given")
        k = shapes[0].k
        if any(s.k != k for s in shapes):
            raise DescriptorMismatch("shapes have different numbers of landmarks")
        reps = np.array([s.rep for s in shapes])
        return cls.from_vectors(VeroneseWhitney(k), reps, tuple(s.source_id or "" for s in shapes))

    @classmethod
    def from_vectors(cls, descriptor, vectors, ids=()):
        """Build from unit vectors: sphere points, or CP representatives."""
        v = np.asarray(vectors)
        if isinstance(descriptor, VeroneseWhitney):
            v = v.astype(complex)
            pts = v[:, :, None] * v.conj()[:, None, :]
            idx = np.arange(descriptor.q)
            pts[:, idx, idx] = np.abs(v) ** 2
        else:
            pts = v.astype(float)
        return cls(descriptor, pts, tuple(ids))

    def ambient_mean(self):
        return self.points.mean(axis=0)

    def coords(self):
        return self.descriptor.to_coords(self.points)

    def ambient_covariance(self):
        """Covariance of the ambient coordinates, divisor ``n``."""
        c = self.coords()
        c = c - c.mean(axis=0)
        return c.T @ c / self.n

    def concat(self, other):
        if other.descriptor != self.descriptor:
            raise DescriptorMismatch(f"{self.descriptor} vs {other.descriptor}")
        return Sample(self.descriptor, np.concatenate([self.points, other.points]),
                      self.ids + other.ids)


@dataclass(frozen=True)
class LocationEstimate:
    kind: Location
    point: np.ndarray
    ambient_mean: np.ndarray
    eigen: Optional[EigenDecomposition]
    anticov: np.ndarray
    frame: TangentFrame
    n: int
    descriptor: EmbeddingDescriptor


def _check_same(p, s):
    if np.shape(p) != s.descriptor.point_shape:
        raise DescriptorMismatch(f"point of shape {np.shape(p)} for {s.descriptor}")


def frechet_function(p, s: Sample) -> float:
    """Mean squared chord distance from ``p`` to the sample points."""
    _check_same(p, s)
    diff = s.points - np.asarray(p)[None]
    axes = tuple(range(1, diff.ndim))
    return float(np.mean(np.sum(np.abs(diff) ** 2, axis=axes)))


def _projection_data(d, ybar, mode):
    """Projection, eigendata, frame and differential matrix at ``ybar``."""
    if isinstance(d, VeroneseWhitney):
        eig = hermitian_eig(ybar)
        point = d.projection_from_eig(eig, mode)
        frame = d.frame_from_eig(eig, mode)
        dmat = d.differential_matrix_from_eig(eig, mode)
    else:
        eig = None
        point = d.projection(ybar, mode)
        frame = d.tangent_frame_at(point)
        dmat = d.differential_matrix(ybar, mode)
    return point, eig, frame, dmat


def _anticov(s, frame_coords, dmat):
    b = frame_coords @ dmat
    if s.n < 2:
        return np.zeros((len(b), len(b)))
    out = b @ s.ambient_covariance() @ b.T
    return 0.5 * (out + out.T)


def extrinsic_estimate(s: Sample, kind=Location.ANTIMEAN) -> LocationEstimate:
    """Extrinsic sample mean or antimean with its anticovariance.

    For VW this is the eigenvector line of ``J = mean(z z*)`` for the largest
    (mean) or smallest (antimean) eigenvalue. Raises ``FocalPoint`` when that
    eigenvalue is not simple.
    """
    kind = as_location(kind)
    d = s.descriptor
    ybar = s.ambient_mean()
    point, eig, frame, dmat = _projection_data(d, ybar, kind.mode)
    return LocationEstimate(kind, point, ybar, eig, _anticov(s, frame.coords, dmat),
                            frame, s.n, d)


def sample_anticovariance(s: Sample, est: LocationEstimate) -> np.ndarray:
    """``B Sigma B^T`` with ``B`` the frame at the estimate composed with the
    projection differential at the ambient mean."""
    d = s.descriptor
    if isinstance(d, VeroneseWhitney) and est.eigen is not None:
        dmat = d.differential_matrix_from_eig(est.eigen, est.kind.mode)
    else:
        dmat = d.differential_matrix(est.ambient_mean, est.kind.mode)
    return _anticov(s, est.frame.coords, dmat)


class OneSampleResult(NamedTuple):
    statistic: float
    df: int
    pvalue: float


def one_sample_statistic(s: Sample, hypothesized, kind=Location.ANTIMEAN) -> OneSampleResult:
    """Chi-square statistic for ``H0: location == hypothesized``.

    Both the tangential difference and the anticovariance are expressed in
    the frame at the hypothesized point, so the quadratic form does not
    depend on how either tangent basis was completed.
    """
    kind = as_location(kind)
    d = s.descriptor
    hyp = d.check_point(np.asarray(hypothesized), tol=1e-9)
    if s.n < 2:
        raise SingularAnticovariance("need at least two observations")
    ybar = s.ambient_mean()
    point, _, _, dmat = _projection_data(d, ybar, kind.mode)
    frame = d.tangent_frame_at(hyp)
    t = frame.coords @ d.to_coords(point - hyp)
    acov = _anticov(s, frame.coords, dmat)
    try:
        r = sym_inv_sqrt(acov)
    except SingularMatrix as exc:
        raise SingularAnticovariance(str(exc)) from None
    stat = float(s.n * np.sum((r @ t) ** 2))
    df = d.intrinsic_dim
    return OneSampleResult(stat, df, chi2_sf(stat, df))
