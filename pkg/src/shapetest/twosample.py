"""Two-sample chi-square tests for equal extrinsic means or antimeans.

Two routes are provided:

* :func:`vw_two_sample_statistic` works in the coordinates
  ``Re/Im(u_a* X u_1)`` of each VW observation relative to the eigenvectors
  of the pooled ambient mean; df = 2k - 4.
* :func:`generic_two_sample_statistic` works on any descriptor with frames
  and projection differentials; df = intrinsic dimension.
"""
from dataclasses import dataclass
import enum
from typing import Optional, Tuple

import numpy as np

from .cxlinalg import EigenDecomposition, chi2_quantile, chi2_sf, hermitian_eig
from .errors import (
    DescriptorMismatch,
    DomainError,
    SingularCovariance,
    UnsupportedDescriptor,
)
from .estimators import Location, LocationEstimate, Sample, as_location, extrinsic_estimate
from .manifolds import Mode, VeroneseWhitney

RANK_TOL = 1e-10


class Pooling(str, enum.Enum):
    AMBIENT = "ambient"
    PROJECTION = "projection"


class Policy(str, enum.Enum):
    STRICT = "strict"
    PINV = "pinv"


@dataclass(frozen=True)
class PooledEstimate:
    ambient: np.ndarray
    point: np.ndarray
    eigen: Optional[EigenDecomposition]
    weights: Tuple[float, float]
    rule: Pooling
    # mode that maps ``ambient`` to ``point``
    mode: Mode


@dataclass(frozen=True)
class TwoSampleReport:
    statistic: float
    df: int
    pvalue: float
    alpha: float
    critical_value: float
    reject: bool
    location_kind: Location
    method: str
    pooling: Pooling
    pooled: PooledEstimate
    pseudo_inverse_used: bool
    n: int
    m: int
    group_estimates: Optional[Tuple[LocationEstimate, LocationEstimate]] = None

    @property
    def pooled_point(self):
        return self.pooled.point


def _same_descriptor(sa, sb):
    if sa.descriptor != sb.descriptor:
        raise DescriptorMismatch(f"{sa.descriptor} vs {sb.descriptor}")
    return sa.descriptor


def pooled_estimate(sa: Sample, sb: Sample, kind=Location.ANTIMEAN,
                    rule=Pooling.AMBIENT) -> PooledEstimate:
    """Pooled location estimate under the null of a common location.

    ``AMBIENT`` averages the raw ambient means and projects. ``PROJECTION``
    averages the two projected group estimates and takes the point of the
    manifold nearest to that average; for antimeans this keeps the pooled
    point next to both group antimeans instead of at the far side.
    """
    d = _same_descriptor(sa, sb)
    kind = as_location(kind)
    rule = Pooling(rule)
    n, m = sa.n, sb.n
    wa, wb = n / (n + m), m / (n + m)
    if rule is Pooling.AMBIENT:
        ambient = wa * sa.ambient_mean() + wb * sb.ambient_mean()
        mode = kind.mode
    else:
        pa = d.projection(sa.ambient_mean(), kind.mode)
        pb = d.projection(sb.ambient_mean(), kind.mode)
        ambient = wa * pa + wb * pb
        mode = Mode.NEAREST
    if isinstance(d, VeroneseWhitney):
        eig = hermitian_eig(ambient)
        point = d.projection_from_eig(eig, mode)
    else:
        eig = None
        point = d.projection(ambient, mode)
    return PooledEstimate(ambient, point, eig, (wa, wb), rule, mode)


def coordinate_matrices(sa: Sample, sb: Sample, pooled: PooledEstimate):
    """``(T, S)``: rows ``Re(u_a* X_j u_1)`` then ``Im(u_a* X_j u_1)``.

    ``u_1`` is the pooled anchor eigenvector and ``u_a`` runs over the other
    eigenvectors in ascending eigenvalue order; columns are observations.
    """
    d = _same_descriptor(sa, sb)
    if not isinstance(d, VeroneseWhitney):
        raise UnsupportedDescriptor("coordinate matrices are defined for VW samples only")
    eig = pooled.eigen
    idx = d.anchor_index(eig, pooled.mode)
    u = eig.eigenvectors
    anchor = u[:, idx]
    others = u[:, [a for a in range(eig.dim) if a != idx]]

    def coords(points):
        c = np.einsum("ia,nij,j->an", others.conj(), points, anchor)
        return np.concatenate([c.real, c.imag])

    return coords(sa.points), coords(sb.points)


def _rank(a):
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > RANK_TOL * sv[0]))


def chi2_form(delta, combined, group_covs, policy=Policy.STRICT):
    """``delta' combined^{-1} delta`` with the singularity policy applied.

    Returns ``(statistic, df, pseudo_inverse_used)``. The strict policy
    requires each group covariance and the combined matrix to have full
    numerical rank.
    """
    policy = Policy(policy)
    dim = len(delta)
    deficient = [i for i, g in enumerate(group_covs) if _rank(g) < dim]
    combined_rank = _rank(combined)
    singular = bool(deficient) or combined_rank < dim
    if not singular:
        try:
            x = np.linalg.solve(combined, delta)
            return float(delta @ x), dim, False
        except np.linalg.LinAlgError:
            singular = True
    if policy is Policy.STRICT:
        which = ", ".join(f"group {i + 1}" for i in deficient) or "combined"
        raise SingularCovariance(
            f"covariance is singular ({which}); rerun with --pseudo-inverse to use a "
            f"Moore-Penrose inverse outside the asymptotic theory"
        )
    pinv = np.linalg.pinv(combined, rcond=RANK_TOL, hermitian=True)
    return float(delta @ pinv @ delta), combined_rank, True


def statistic_from_coordinates(t, s, policy=Policy.STRICT):
    n, m = t.shape[1], s.shape[1]
    tbar, sbar = t.mean(axis=1), s.mean(axis=1)
    sig1 = t @ t.T / n - np.outer(tbar, tbar)
    sig2 = s @ s.T / m - np.outer(sbar, sbar)
    combined = sig1 / n + sig2 / m
    return chi2_form(tbar - sbar, 0.5 * (combined + combined.T), [sig1, sig2], policy)


def _report(stat, df, pinv, alpha, kind, method, pooled, sa, sb, with_estimates):
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if df == 0:
        raise SingularCovariance("covariance has numerical rank 0")
    crit = chi2_quantile(1.0 - alpha, df)
    pvalue = chi2_sf(max(stat, 0.0), df)
    estimates = None
    if with_estimates:
        estimates = (extrinsic_estimate(sa, kind), extrinsic_estimate(sb, kind))
    return TwoSampleReport(
        statistic=stat, df=df, pvalue=pvalue, alpha=alpha, critical_value=crit,
        reject=bool(stat > crit), location_kind=kind, method=method, pooling=pooled.rule,
        pooled=pooled, pseudo_inverse_used=pinv, n=sa.n, m=sb.n, group_estimates=estimates,
    )


def _check_sizes(sa, sb):
    if sa.n < 2 or sb.n < 2:
        raise DomainError("each group needs at least two observations")


def vw_two_sample_statistic(sa: Sample, sb: Sample, kind=Location.ANTIMEAN, alpha=0.05,
                            policy=Policy.STRICT, pooling=Pooling.AMBIENT,
                            with_estimates=True) -> TwoSampleReport:
    kind = as_location(kind)
    _check_sizes(sa, sb)
    pooled = pooled_estimate(sa, sb, kind, pooling)
    t, s = coordinate_matrices(sa, sb, pooled)
    stat, df, pinv = statistic_from_coordinates(t, s, policy)
    return _report(stat, df, pinv, alpha, kind, "vw", pooled, sa, sb, with_estimates)


def generic_two_sample_statistic(sa: Sample, sb: Sample, kind=Location.ANTIMEAN, alpha=0.05,
                                 policy=Policy.STRICT, pooling=Pooling.PROJECTION,
                                 with_estimates=True, differential_at="pooled") -> TwoSampleReport:
    """Tangent-space statistic for any embedding.

    The difference of the two projected means is read in the frame at the
    pooled point. Each group's covariance is pushed through the projection
    differential at the weighted average of the two raw ambient means
    (``differential_at="pooled"``) or at that group's own ambient mean
    (``"group"``); both are consistent under the null.
    """
    kind = as_location(kind)
    d = _same_descriptor(sa, sb)
    _check_sizes(sa, sb)
    if differential_at not in ("pooled", "group"):
        raise DomainError(f"differential_at must be 'pooled' or 'group', not {differential_at!r}")
    pooled = pooled_estimate(sa, sb, kind, pooling)
    if pooled.eigen is not None:
        frame = d.frame_from_eig(pooled.eigen, pooled.mode)
    else:
        frame = d.tangent_frame_at(pooled.point)
    b = frame.coords

    def projection_data(ybar):
        if isinstance(d, VeroneseWhitney):
            eig = hermitian_eig(ybar)
            return d.projection_from_eig(eig, kind.mode), d.differential_matrix_from_eig(eig, kind.mode)
        return d.projection(ybar, kind.mode), d.differential_matrix(ybar, kind.mode)

    wa, wb = pooled.weights
    shared = None
    if differential_at == "pooled":
        shared = projection_data(wa * sa.ambient_mean() + wb * sb.ambient_mean())[1]
    projections, group_covs, combined = [], [], 0.0
    for smp in (sa, sb):
        proj, dmat = projection_data(smp.ambient_mean())
        projections.append(proj)
        bd = b @ (dmat if shared is None else shared)
        g = bd @ smp.ambient_covariance() @ bd.T
        group_covs.append(g)
        combined = combined + g / smp.n
    delta = b @ d.to_coords(projections[0] - projections[1])
    combined = 0.5 * (combined + combined.T)
    stat, df, pinv = chi2_form(delta, combined, group_covs, policy)
    return _report(stat, df, pinv, alpha, kind, "generic", pooled, sa, sb, with_estimates)


def two_sample_test(sa, sb, kind=Location.ANTIMEAN, alpha=0.05, method="vw",
                    policy=Policy.STRICT, pooling=None, with_estimates=True):
    if method == "vw":
        return vw_two_sample_statistic(sa, sb, kind, alpha, policy,
                                       pooling or Pooling.AMBIENT, with_estimates)
    if method == "generic":
        return generic_two_sample_statistic(sa, sb, kind, alpha, policy,
                                            pooling or Pooling.PROJECTION, with_estimates)
    raise DomainError(f"unknown method {method!r}")
