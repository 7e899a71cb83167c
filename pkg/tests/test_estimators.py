import numpy as np
import pytest

from shapetest import montecarlo as mc
from shapetest.errors import DescriptorMismatch, FocalPoint, SingularAnticovariance
from shapetest.estimators import (
    Location,
    Sample,
    extrinsic_estimate,
    frechet_function,
    one_sample_statistic,
    sample_anticovariance,
)
from shapetest.manifolds import Mode, Sphere, VeroneseWhitney, vw_embed

from conftest import chord, random_special_unitary, random_unit

S3 = Sphere(3)
VW3 = VeroneseWhitney(3)


def cp_sample(rng, k, n, concentration=1.0):
    spec = mc.SamplerSpec.projected_gaussian_cp(k, concentration=concentration,
                                                scales=np.linspace(1.0, 2.0, k - 1))
    return mc.sample(spec, n, rng)


def test_frechet_examples():
    p = np.array([0.0, 0, 1])
    s = Sample(S3, p)
    assert frechet_function(p, s) == 0
    assert frechet_function(-p, s) == 4
    assert frechet_function(vw_embed([0, 1]), Sample(VW3, vw_embed([1, 0]))) == 2
    with pytest.raises(DescriptorMismatch):
        frechet_function(np.zeros(4), s)


def test_sphere_antimean_examples():
    est = extrinsic_estimate(Sample(S3, np.array([1.0, 0, 0])), "antimean")
    assert np.array_equal(est.point, [-1, 0, 0])
    est = extrinsic_estimate(Sample(S3, np.array([[1.0, 0, 0], [0, 1, 0]])))
    assert np.allclose(est.point, [-(2**-0.5), -(2**-0.5), 0])
    assert est.kind is Location.ANTIMEAN and est.eigen is None


def test_vw_antimean_is_smallest_eigenvector(rng):
    s = cp_sample(rng, 5, 40)
    est = extrinsic_estimate(s, Location.ANTIMEAN)
    lam, u = np.linalg.eigh(s.ambient_mean())
    assert chord(est.point, np.outer(u[:, 0], u[:, 0].conj())) < 1e-9
    mean = extrinsic_estimate(s, Location.MEAN)
    assert chord(mean.point, np.outer(u[:, -1], u[:, -1].conj())) < 1e-9
    assert est.anticov.shape == (6, 6) and est.frame.dim == 6


def test_vw_antimean_matches_grid_oracle(rng):
    for _ in range(50):
        s = cp_sample(rng, 3, 30)
        est = extrinsic_estimate(s)
        oracle = mc.brute_force_antimean(s, grid_resolution=200)
        assert chord(est.point, oracle.point) < 1e-3


def test_vw_antimean_dense_grid(rng):
    s = cp_sample(rng, 3, 30)
    oracle = mc.brute_force_antimean(s, grid_resolution=707)
    assert chord(extrinsic_estimate(s).point, oracle.point) < 1e-3


def test_point_mass_anticov_is_zero():
    s = Sample(S3, np.tile([0.0, 0.6, 0.8], (5, 1)))
    assert np.allclose(extrinsic_estimate(s).anticov, 0)
    assert np.array_equal(extrinsic_estimate(Sample(S3, np.array([0.0, 0, 1]))).anticov,
                          np.zeros((2, 2)))


def test_single_projector_antimean_is_focal():
    s = Sample(VeroneseWhitney(4), vw_embed(random_unit(np.random.default_rng(0), 3)))
    with pytest.raises(FocalPoint):
        extrinsic_estimate(s, "antimean")
    assert chord(extrinsic_estimate(s, "mean").point, s.points[0]) < 1e-12


def test_sphere_anticov_matches_finite_differences(rng):
    pts = np.array([0, 0, 1.0]) + 0.2 * rng.standard_normal((100, 3))
    s = Sample(S3, pts / np.linalg.norm(pts, axis=1, keepdims=True))
    est = extrinsic_estimate(s)
    assert est.point[2] < -0.99
    ybar = s.ambient_mean()
    h = 1e-6
    cols = [(S3.farthest_projection(ybar + h * e) - S3.farthest_projection(ybar - h * e)) / (2 * h)
            for e in np.eye(3)]
    b = est.frame.coords @ np.array(cols).T
    fd = b @ s.ambient_covariance() @ b.T
    assert np.max(np.abs(fd - est.anticov)) < 1e-6
    assert np.allclose(sample_anticovariance(s, est), est.anticov)


def test_sphere_rotation_keeps_anticov_spectrum(rng):
    pts = rng.standard_normal((60, 3)) + [0, 0, 2]
    s = Sample(S3, pts / np.linalg.norm(pts, axis=1, keepdims=True))
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    r = Sample(S3, s.points @ q.T)
    a, b = extrinsic_estimate(s), extrinsic_estimate(r)
    assert np.allclose(b.point, q @ a.point, atol=1e-12)
    assert np.allclose(np.linalg.eigvalsh(a.anticov), np.linalg.eigvalsh(b.anticov), atol=1e-9)


def test_vw_conjugation_keeps_anticov_spectrum(rng):
    s = cp_sample(rng, 4, 50)
    a = random_special_unitary(rng, 3)
    r = Sample(s.descriptor, a @ s.points @ a.conj().T)
    ea, eb = extrinsic_estimate(s), extrinsic_estimate(r)
    assert chord(eb.point, a @ ea.point @ a.conj().T) < 1e-9
    assert np.allclose(np.linalg.eigvalsh(ea.anticov), np.linalg.eigvalsh(eb.anticov), atol=1e-9)


def test_anticov_psd(rng):
    for k in (3, 4, 6):
        for kind in Location:
            est = extrinsic_estimate(cp_sample(rng, k, 25), kind)
            assert np.linalg.eigvalsh(est.anticov).min() >= -1e-10


def test_duplicated_sample_is_unchanged(rng):
    s = cp_sample(rng, 4, 30)
    d = Sample(s.descriptor, np.concatenate([s.points, s.points]))
    a, b = extrinsic_estimate(s), extrinsic_estimate(d)
    # only the floating-point summation order differs
    assert np.max(np.abs(a.point - b.point)) < 1e-14
    assert np.max(np.abs(a.anticov - b.anticov)) < 1e-13 * np.max(np.abs(a.anticov))


def test_one_sample_at_estimate_is_zero(rng):
    s = cp_sample(rng, 4, 50)
    est = extrinsic_estimate(s)
    res = one_sample_statistic(s, est.point)
    assert abs(res.statistic) < 1e-20 and res.df == 4 and res.pvalue == 1.0


def test_one_sample_needs_two_points():
    with pytest.raises(SingularAnticovariance):
        one_sample_statistic(Sample(S3, np.array([0.0, 0, 1])), np.array([0.0, 0, -1]))


def test_one_sample_power_at_distance_half():
    spec = mc.SamplerSpec.projected_gaussian_cp(3, concentration=2.0, seed=11)
    truth = mc.true_location(spec, "antimean")
    # a point of CP^1 at chord distance 0.5 from the true antimean
    ang = np.arccos(np.sqrt(1 - 0.5**2 / 2))
    u = np.linalg.eigh(truth)[1][:, -1]
    w = np.array([-u[1].conj(), u[0].conj()])
    alt = vw_embed(np.cos(ang) * u + np.sin(ang) * w)
    assert abs(chord(alt, truth) - 0.5) < 1e-12
    res = mc.run_one_sample_experiment(spec, 200, 200, hypothesized=alt)
    assert res.empirical_level > 0.9


def test_sample_validation():
    with pytest.raises(Exception):
        Sample(S3, np.array([[1.0, 1.0, 0]]))
    s = Sample.from_vectors(VW3, np.array([[1, 0], [0, 1j]]), ids=("a", "b"))
    assert s.n == 2 and s.ids == ("a", "b")
    assert np.allclose(s.ambient_mean(), np.eye(2) / 2)
    assert s.concat(s).n == 4
    assert Mode.FARTHEST is Location.ANTIMEAN.mode
