"""Dense Hermitian eigensolver, SPD helpers and chi-square tail functions.

Matrices are plain numpy arrays. Hermitian inputs are read from their upper
triangle; the lower triangle is ignored and mirrored.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NonConvergence, SingularMatrix

TIE_TOL = 1e-9
MAX_SWEEPS = 60


def as_hermitian(a):
    """Return the Hermitian matrix defined by the upper triangle of ``a``."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    upper = np.triu(a, 1)
    h = upper + upper.conj().T
    h[np.diag_indices_from(h)] = a.diagonal().real
    return h


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues with unit eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    min_gap: float
    phase_canonical: bool = True

    @property
    def dim(self):
        return len(self.eigenvalues)

    @property
    def spectral_radius(self):
        return float(np.max(np.abs(self.eigenvalues)))

    @property
    def tie_tolerance(self):
        return TIE_TOL * max(1.0, self.spectral_radius)

    def is_simple(self, index):
        """True when eigenvalue ``index`` is separated from its neighbours."""
        lam = self.eigenvalues
        index = index % len(lam)
        tol = self.tie_tolerance
        if index > 0 and lam[index] - lam[index - 1] < tol:
            return False
        if index < len(lam) - 1 and lam[index + 1] - lam[index] < tol:
            return False
        return True

    @property
    def has_ties(self):
        return self.min_gap < self.tie_tolerance

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def canonical_phase(vectors):
    """Rotate each column so its largest-magnitude entry is real and >= 0.

    Near-ties in magnitude go to the lowest index, which keeps the map
    idempotent.
    """
    v = np.array(vectors, dtype=complex)
    single = v.ndim == 1
    if single:
        v = v[:, None]
    mags = np.abs(v)
    for j in range(v.shape[1]):
        col = mags[:, j]
        top = col.max()
        if top == 0.0:
            continue
        i = int(np.flatnonzero(col >= top * (1 - 1e-10))[0])
        if v[i, j].imag == 0.0 and v[i, j].real > 0.0:
            continue
        v[:, j] *= np.conj(v[i, j]) / col[i]
        v[i, j] = abs(v[i, j])
    return v[:, 0] if single else v


def _off_norm(a):
    return math.sqrt(2.0) * float(np.linalg.norm(a[np.triu_indices(len(a), 1)]))


def hermitian_eig(h):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Returns an :class:`EigenDecomposition` with ascending eigenvalues and
    phase-canonical eigenvectors. Raises :class:`NonConvergence` if the
    off-diagonal mass does not drop below ``1e-12 * ||H||`` within the sweep
    budget.
    """
    a = as_hermitian(h)
    n = a.shape[0]
    if n == 0:
        raise DomainError("empty matrix")
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale > 0.0:
        target = 1e-14 * scale
        off = _off_norm(a)
        for _ in range(MAX_SWEEPS):
            if off <= target:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    beta = a[p, q]
                    mod = abs(beta)
                    if mod <= 1e-300 or mod < 1e-18 * scale:
                        continue
                    phase = beta / mod
                    # smaller root of t^2 + 2 tau t - 1 = 0 keeps |angle| <= pi/4
                    tau = (a[q, q].real - a[p, p].real) / (2.0 * mod)
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    w = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                    idx = [p, q]
                    a[:, idx] = a[:, idx] @ w
                    a[idx, :] = w.conj().T @ a[idx, :]
                    a[p, q] = a[q, p] = 0.0
                    a[p, p] = a[p, p].real
                    a[q, q] = a[q, q].real
                    v[:, idx] = v[:, idx] @ w
            new_off = _off_norm(a)
            if new_off >= off and new_off <= 1e-12 * scale:
                off = new_off
                break
            off = new_off
        if off > 1e-12 * scale:
            raise NonConvergence(
                f"off-diagonal norm {off:.3e} above tolerance after {MAX_SWEEPS} sweeps"
            )
    lam = a.diagonal().real.copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    vecs = canonical_phase(v[:, order])
    # re-normalise against drift accumulated over many rotations
    vecs /= np.linalg.norm(vecs, axis=0)
    gap = float(np.min(np.diff(lam))) if n > 1 else math.inf
    return EigenDecomposition(lam, vecs, gap, True)


def _check_symmetric(s):
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise DomainError("matrix has non-finite entries")
    return 0.5 * (s + s.T)


def sym_inv_sqrt(s, ridge=0.0):
    """``(S + ridge*I)^(-1/2)`` for a symmetric matrix ``S``."""
    if ridge < 0:
        raise DomainError("ridge must be nonnegative")
    s = _check_symmetric(s) + ridge * np.eye(len(s))
    eig = hermitian_eig(s)
    lam = eig.eigenvalues
    if lam[0] <= 1e-13 * max(lam[-1], 0.0) or lam[-1] <= 0.0:
        raise SingularMatrix(f"smallest eigenvalue {lam[0]:.3e} vs largest {lam[-1]:.3e}")
    u = eig.eigenvectors.real
    r = (u / np.sqrt(lam)) @ u.T
    return 0.5 * (r + r.T)


def solve_spd(s, v):
    """Solve ``S x = v`` for symmetric positive definite ``S``."""
    s = _check_symmetric(s)
    v = np.asarray(v, dtype=float)
    lam = np.linalg.eigvalsh(s)
    if lam[0] <= 1e-13 * max(lam[-1], 0.0) or lam[-1] <= 0.0:
        raise SingularMatrix(f"smallest eigenvalue {lam[0]:.3e} vs largest {lam[-1]:.3e}")
    chol = np.linalg.cholesky(s)
    y = np.linalg.solve(chol, v)
    return np.linalg.solve(chol.T, y)


# -- chi-square tails -------------------------------------------------------

_EPS = 1e-16
_ITMAX = 10_000


def _gamma_series(a, x):
    # lower regularized P(a, x)
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_ITMAX):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a, x):
    # upper regularized Q(a, x), modified Lentz
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _ITMAX):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi2_sf(x, df):
    """Upper tail ``P(chi2_df > x)``."""
    if not df >= 1:
        raise DomainError("df must be >= 1")
    if not x >= 0:
        raise DomainError("x must be nonnegative")
    if x == 0:
        return 1.0
    a, y = 0.5 * df, 0.5 * x
    if y < a + 1.0:
        return max(0.0, 1.0 - _gamma_series(a, y))
    return _gamma_cf(a, y)


def chi2_quantile(p, df):
    """The ``x`` with ``P(chi2_df <= x) = p``."""
    if not 0.0 < p < 1.0:
        raise DomainError("p must lie in (0, 1)")
    target = 1.0 - p
    hi = max(1.0, float(df))
    while chi2_sf(hi, df) > target:
        hi *= 2.0
    return brentq(lambda x: chi2_sf(x, df) - target, 0.0, hi, xtol=1e-14, rtol=1e-15, maxiter=500)
