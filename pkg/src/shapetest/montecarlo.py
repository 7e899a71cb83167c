"""Seeded samplers, grid-search oracles and simulation experiments.

Every replicate draws from its own generator, seeded by
``SeedSequence(master_seed, spawn_key=(index,))``, so results do not depend
on worker count or execution order.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
import time
from typing import Optional

import numpy as np

from .cxlinalg import chi2_quantile
from .errors import DomainError, FocalPoint, ShapeTestError, UnsupportedDescriptor
from .estimators import Location, Sample, as_location, extrinsic_estimate, one_sample_statistic
from .manifolds import Sphere, VeroneseWhitney
from .twosample import Policy, two_sample_test

KINDS = ("projected_gaussian_cp", "projected_gaussian_sphere", "uniform_cp", "uniform_sphere")


@dataclass(frozen=True)
class SamplerSpec:
    """Projected Gaussian ``(c * center + noise) / |.|`` on CP^{k-2} or S^{N-1}.

    ``dim`` is k for the CP kinds and N for the sphere kinds. ``scales``
    multiplies the noise coordinatewise; with unequal scales a CP
    distribution can have a simple smallest eigenvalue for k > 3.
    """

    kind: str
    dim: int
    center: Optional[tuple] = None
    concentration: float = 0.0
    seed: int = 0
    scales: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown sampler kind {self.kind!r}")
        if not (np.isfinite(self.concentration) and self.concentration >= 0):
            raise DomainError("concentration must be finite and nonnegative")
        n = self.vector_dim
        if self.kind.startswith("uniform"):
            object.__setattr__(self, "concentration", 0.0)
        center = self.center
        if center is None:
            center = np.zeros(n, dtype=complex if self.is_cp else float)
            center[0] = 1.0
        center = np.asarray(center, dtype=complex if self.is_cp else float)
        if center.shape != (n,) or abs(np.linalg.norm(center) - 1.0) > 1e-10:
            raise DomainError(f"center must be a unit vector of length {n}")
        object.__setattr__(self, "center", tuple(center.tolist()))
        if self.scales is not None:
            scales = tuple(float(s) for s in self.scales)
            if len(scales) != n or min(scales) <= 0:
                raise DomainError(f"scales must be {n} positive numbers")
            object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "seed", int(self.seed) & 0xFFFFFFFFFFFFFFFF)

    @property
    def is_cp(self):
        return self.kind.endswith("_cp")

    @property
    def vector_dim(self):
        return self.dim - 1 if self.is_cp else self.dim

    @property
    def descriptor(self):
        return VeroneseWhitney(self.dim) if self.is_cp else Sphere(self.dim)

    @classmethod
    def projected_gaussian_cp(cls, k, center=None, concentration=1.0, seed=0, scales=None):
        return cls("projected_gaussian_cp", k, center, concentration, seed, scales)

    @classmethod
    def projected_gaussian_sphere(cls, N, center=None, concentration=1.0, seed=0, scales=None):
        return cls("projected_gaussian_sphere", N, center, concentration, seed, scales)

    @classmethod
    def uniform_cp(cls, k, seed=0):
        return cls("uniform_cp", k, seed=seed)

    @classmethod
    def uniform_sphere(cls, N, seed=0):
        return cls("uniform_sphere", N, seed=seed)

    def to_json(self):
        center = np.asarray(self.center)
        if self.is_cp:
            center = [[c.real, c.imag] for c in center]
        else:
            center = center.tolist()
        return {
            "kind": self.kind, "dim": self.dim, "center": center,
            "concentration": self.concentration, "seed": self.seed,
            "scales": list(self.scales) if self.scales is not None else None,
        }


def replicate_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def draw_vectors(spec: SamplerSpec, n, rng=None):
    """Unit vectors (CP representatives or sphere points), shape ``(n, dim)``."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    dim = spec.vector_dim
    scales = np.ones(dim) if spec.scales is None else np.asarray(spec.scales)
    center = np.asarray(spec.center)
    if spec.is_cp:
        noise = (rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))) / np.sqrt(2)
    else:
        noise = rng.standard_normal((n, dim))
    w = spec.concentration * center + noise * scales
    return w / np.linalg.norm(w, axis=1, keepdims=True)


def sample(spec: SamplerSpec, n, rng=None) -> Sample:
    return Sample.from_vectors(spec.descriptor, draw_vectors(spec, n, rng))


def true_location(spec: SamplerSpec, kind=Location.ANTIMEAN, plug_in_size=10**6):
    """Population mean or antimean as an ambient point on the manifold.

    Closed form for isotropic noise, where the population ambient mean is
    ``a cc* + b (I - cc*)`` (CP) or proportional to the center (sphere);
    otherwise a large-sample plug-in.
    """
    kind = as_location(kind)
    d = spec.descriptor
    center = np.asarray(spec.center)
    isotropic = spec.scales is None or len(set(spec.scales)) == 1
    if spec.concentration == 0:
        raise FocalPoint("uniform distributions have no unique mean or antimean")
    if isotropic:
        if not spec.is_cp:
            return center.copy() if kind is Location.MEAN else -center
        if kind is Location.MEAN:
            return np.outer(center, center.conj())
        if spec.dim == 3:
            perp = np.array([-np.conj(center[1]), np.conj(center[0])])
            return np.outer(perp, perp.conj())
        raise FocalPoint("isotropic CP distribution has a repeated smallest eigenvalue")
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(2**31,)))
    total, done = 0.0, 0
    while done < plug_in_size:
        step = min(100_000, plug_in_size - done)
        total = total + sample(spec, step, rng).points.sum(axis=0)
        done += step
    return d.projection(total / done, kind.mode)


# -- grid oracle on two-dimensional manifolds ---------------------------------

_PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])


def _to_ambient(d, s2):
    """Map unit 3-vectors to points of S^2 or (Bloch sphere) of CP^1."""
    if isinstance(d, Sphere):
        return s2
    return 0.5 * (np.eye(2) + np.einsum("...a,aij->...ij", s2, _PAULI))


def _s2_grid(resolution):
    theta = np.linspace(0.0, np.pi, resolution + 1)
    phi = np.linspace(0.0, 2 * np.pi, 2 * resolution, endpoint=False)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    return np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], -1).reshape(-1, 3)


def _local_patch(center, half_width, steps):
    a = np.linspace(-half_width, half_width, steps)
    # any orthonormal pair perpendicular to center
    helper = np.eye(3)[np.argmin(np.abs(center))]
    t1 = np.cross(center, helper)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(center, t1)
    x, y = np.meshgrid(a, a, indexing="ij")
    pts = center + x[..., None] * t1 + y[..., None] * t2
    pts = pts.reshape(-1, 3)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


@dataclass(frozen=True)
class GridExtremum:
    point: np.ndarray
    value: float
    runner_up: float
    flat: bool


def _check_2d(d):
    if not (d == Sphere(3) or d == VeroneseWhitney(3)):
        raise UnsupportedDescriptor(f"grid oracle needs a two-dimensional manifold, got {d}")


def grid_extremum(objective, d, resolution=200, maximize=True, separation=0.2):
    """Lat/long grid search for an objective on S^2 or CP^1, then one local
    refinement pass around the best grid point.

    ``objective`` maps a stack of ambient points to values. ``runner_up`` is
    the best coarse value at least ``separation`` (S^2 chord) away from the
    winner; ``flat`` flags ``|best - runner_up| < 1e-9``.
    """
    _check_2d(d)
    if resolution < 100:
        raise DomainError("grid_resolution must be >= 100")
    sign = 1.0 if maximize else -1.0
    grid = _s2_grid(resolution)
    vals = sign * objective(_to_ambient(d, grid))
    best = int(np.argmax(vals))
    far = np.linalg.norm(grid - grid[best], axis=1) > separation
    runner_up = float(np.max(vals[far]))
    patch = _local_patch(grid[best], 1.5 * np.pi / resolution, 61)
    pvals = sign * objective(_to_ambient(d, patch))
    j = int(np.argmax(pvals))
    if pvals[j] >= vals[best]:
        s2, value = patch[j], float(pvals[j])
    else:
        s2, value = grid[best], float(vals[best])
    return GridExtremum(_to_ambient(d, s2), sign * value, sign * runner_up,
                        abs(value - runner_up) < 1e-9)


def _frechet_on_grid(s: Sample):
    # mean |X_i - P|^2 = mean|X_i|^2 + |P|^2 - 2 <mean X, P>, exact for any P
    second = float(np.mean(np.sum(np.abs(s.points.reshape(s.n, -1)) ** 2, axis=1)))
    mean = s.ambient_mean().ravel()

    def objective(pts):
        flat = pts.reshape(len(pts), -1)
        return second + np.sum(np.abs(flat) ** 2, axis=1) - 2 * np.real(flat @ mean.conj())

    return objective


def brute_force_antimean(s: Sample, grid_resolution=200) -> GridExtremum:
    """Maximize the Fréchet function over a grid of S^2 or CP^1."""
    return grid_extremum(_frechet_on_grid(s), s.descriptor, grid_resolution, maximize=True)


def brute_force_mean(s: Sample, grid_resolution=200) -> GridExtremum:
    return grid_extremum(_frechet_on_grid(s), s.descriptor, grid_resolution, maximize=False)


def grid_projection(y, d, resolution=200, farthest=True) -> GridExtremum:
    """Farthest/nearest point of the manifold from an ambient ``y`` by grid search."""
    y = np.asarray(y)

    def objective(pts):
        diff = (pts - y).reshape(len(pts), -1)
        return np.sum(np.abs(diff) ** 2, axis=1)

    return grid_extremum(objective, d, resolution, maximize=farthest)


# -- experiments ------------------------------------------------------------

@dataclass
class ExperimentResult:
    experiment: str
    replicates: int
    rejections: int
    errors: int
    empirical_level: float
    per_replicate_stats: list
    wall_clock_seconds: float
    seed: int
    parameters: dict = field(default_factory=dict)


def _two_sample_replicate(args):
    spec_a, spec_b, n, m, alpha, kind, method, pooling, index = args
    rng = replicate_rng(spec_a.seed, index)
    sa = sample(spec_a, n, rng)
    sb = sample(spec_b, m, rng)
    try:
        rep = two_sample_test(sa, sb, kind, alpha, method, Policy.STRICT, pooling,
                              with_estimates=False)
    except ShapeTestError:
        return index, None, False
    return index, rep.statistic, rep.reject


def _one_sample_replicate(args):
    spec, n, alpha, kind, hypothesized, crit, index = args
    rng = replicate_rng(spec.seed, index)
    s = sample(spec, n, rng)
    try:
        res = one_sample_statistic(s, hypothesized, kind)
    except ShapeTestError:
        return index, None, False
    return index, res.statistic, res.statistic > crit


def _run(func, jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(func, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        out = [func(j) for j in jobs]
    return sorted(out, key=lambda r: r[0])


def _collect(name, results, seed, started, params):
    stats = [r[1] for r in results]
    rejections = sum(1 for r in results if r[2])
    errors = sum(1 for r in results if r[1] is None)
    return ExperimentResult(
        experiment=name, replicates=len(results), rejections=rejections, errors=errors,
        empirical_level=rejections / len(results) if results else 0.0,
        per_replicate_stats=stats, wall_clock_seconds=time.perf_counter() - started,
        seed=seed, parameters=params,
    )


def run_power_experiment(spec_a, spec_b, n, m, replicates, alpha=0.05, kind=Location.ANTIMEAN,
                         method="vw", pooling=None, workers=1, experiment="power"):
    """Rejection rate of the two-sample test with groups drawn from two specs.

    Replicate seeds come from ``spec_a.seed``; ``spec_b.seed`` is ignored.
    """
    if replicates < 1 or n < 2 or m < 2:
        raise DomainError("need replicates >= 1 and n, m >= 2")
    kind = as_location(kind)
    started = time.perf_counter()
    jobs = [(spec_a, spec_b, n, m, alpha, kind, method, pooling, i) for i in range(replicates)]
    results = _run(_two_sample_replicate, jobs, workers)
    params = {"n": n, "m": m, "alpha": alpha, "location": kind.value, "method": method,
              "pooling": pooling.value if hasattr(pooling, "value") else pooling,
              "sampler_a": spec_a.to_json(), "sampler_b": spec_b.to_json()}
    return _collect(experiment, results, spec_a.seed, started, params)


def run_level_experiment(spec, n, m, replicates, alpha=0.05, kind=Location.ANTIMEAN,
                         method="vw", pooling=None, workers=1):
    """Empirical level of the two-sample test with both groups from ``spec``."""
    return run_power_experiment(spec, spec, n, m, replicates, alpha, kind, method, pooling,
                                workers, experiment="level")


def run_one_sample_experiment(spec, n, replicates, alpha=0.05, kind=Location.ANTIMEAN,
                              hypothesized=None, workers=1):
    """Rejection rate of the one-sample test; defaults to the true location."""
    kind = as_location(kind)
    if hypothesized is None:
        hypothesized = true_location(spec, kind)
    crit = chi2_quantile(1.0 - alpha, spec.descriptor.intrinsic_dim)
    started = time.perf_counter()
    jobs = [(spec, n, alpha, kind, hypothesized, crit, i) for i in range(replicates)]
    results = _run(_one_sample_replicate, jobs, workers)
    params = {"n": n, "alpha": alpha, "location": kind.value, "sampler": spec.to_json()}
    return _collect("one-sample", results, spec.seed, started, params)


@dataclass
class ConsistencyResult:
    rows: list
    seeds: int
    seed: int
    wall_clock_seconds: float
    parameters: dict = field(default_factory=dict)

    @property
    def strictly_decreasing(self):
        medians = [r[1] for r in self.rows]
        return all(a > b for a, b in zip(medians, medians[1:]))


def run_consistency_experiment(spec, n_grid=(100, 1000, 10000), seeds=100,
                               kind=Location.ANTIMEAN) -> ConsistencyResult:
    """Median chord distance from the sample location to the truth, per n."""
    kind = as_location(kind)
    d = spec.descriptor
    truth = true_location(spec, kind)
    started = time.perf_counter()
    rows = []
    for gi, n in enumerate(n_grid):
        errs = []
        for s in range(seeds):
            rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(gi, s)))
            est = extrinsic_estimate(sample(spec, n, rng), kind)
            errs.append(np.sqrt(d.chord_distance_sq(est.point, truth)))
        rows.append((int(n), float(np.median(errs))))
    return ConsistencyResult(rows, seeds, spec.seed, time.perf_counter() - started,
                             {"n_grid": list(map(int, n_grid)), "location": kind.value,
                              "sampler": spec.to_json()})


def separated_centers(distance, k=3):
    """Two CP^1 centers whose antimean (and mean) lines are ``distance`` apart.

    For k = 3 the chord distance between [a] and [b] is
    ``sqrt(2 - 2|<a, b>|^2)``; the orthogonal lines are equally far apart.
    """
    if k != 3:
        raise DomainError("separated_centers is defined for k = 3")
    overlap = 1.0 - distance**2 / 2.0
    if not 0.0 <= overlap <= 1.0:
        raise DomainError("distance must lie in [0, sqrt(2)]")
    angle = np.arccos(np.sqrt(overlap))
    return (1.0 + 0j, 0j), (complex(np.cos(angle)), complex(np.sin(angle)))


def with_seed(spec, seed):
    return replace(spec, seed=seed)
