import numpy as np
import pytest

from shapetest import montecarlo as mc
from shapetest.errors import DescriptorMismatch, FocalPoint, NotNormalized, NotOnManifold
from shapetest.manifolds import (
    Mode,
    Sphere,
    VeroneseWhitney,
    chord_distance_sq,
    descriptor_from_json,
    farthest_projection,
    nearest_projection,
    projection_differential,
    tangent_frame_at,
    vw_embed,
)

from conftest import chord, random_hermitian, random_special_unitary, random_unit

S3 = Sphere(3)
VW3 = VeroneseWhitney(3)


def unit_trace(rng, q):
    a = random_hermitian(rng, q) + 2 * np.eye(q)
    return a / np.trace(a).real


def test_chord_distance_examples():
    p = np.array([1.0, 0, 0])
    assert chord_distance_sq(p, p, S3) == 0
    assert chord_distance_sq(p, -p, S3) == 4
    e1, e2 = vw_embed([1, 0]), vw_embed([0, 1])
    assert chord_distance_sq(e1, e2, VW3) == 2


def test_chord_distance_shape_mismatch():
    with pytest.raises(DescriptorMismatch):
        chord_distance_sq(np.ones(3), np.ones(4), S3)


def test_vw_embed_examples():
    assert np.array_equal(vw_embed([1, 0]), np.array([[1, 0], [0, 0]]))
    assert np.allclose(vw_embed(np.array([1, 1]) / np.sqrt(2)), 0.5)
    z = np.array([0.6, 0.8j])
    a, b = vw_embed(z), vw_embed(np.exp(1j * np.pi / 3) * z)
    assert np.array_equal(np.round(a, 14), np.round(b, 14))
    with pytest.raises(NotNormalized):
        vw_embed([1, 1])


def test_vw_point_check():
    VeroneseWhitney(4).check_point(vw_embed(random_unit(np.random.default_rng(1), 3)))
    with pytest.raises(NotOnManifold):
        VW3.check_point(np.eye(2) / 2)


def test_projection_examples():
    y = np.array([0.5, 0, 0])
    assert np.array_equal(farthest_projection(y, S3), [-1, 0, 0])
    assert np.array_equal(nearest_projection(y, S3), [1, 0, 0])
    d = VeroneseWhitney(4)
    y = np.diag([0.1, 0.3, 0.6]).astype(complex)
    assert np.allclose(farthest_projection(y, d), np.diag([1, 0, 0]))
    assert np.allclose(nearest_projection(y, d), np.diag([0, 0, 1]))


def test_focal_points():
    with pytest.raises(FocalPoint):
        farthest_projection(np.zeros(3), S3)
    d = VeroneseWhitney(4)
    with pytest.raises(FocalPoint):
        farthest_projection(np.diag([0.2, 0.2, 0.6]).astype(complex), d)
    with pytest.raises(FocalPoint):
        nearest_projection(np.diag([0.2, 0.4, 0.4]).astype(complex), d)
    # the other end of the spectrum is still fine
    assert np.allclose(nearest_projection(np.diag([0.2, 0.2, 0.6]).astype(complex), d),
                       np.diag([0, 0, 1]))


@pytest.mark.parametrize("farthest", [True, False])
def test_vw_projection_matches_dense_grid(rng, farthest):
    # (707 + 1) x 1414 ~ 1e6 grid points on the Bloch sphere of CP^1
    for _ in range(3):
        y = unit_trace(rng, 2)
        oracle = mc.grid_projection(y, VW3, resolution=707, farthest=farthest)
        p = farthest_projection(y, VW3) if farthest else nearest_projection(y, VW3)
        assert chord(p, oracle.point) < 1e-3


def test_farthest_projection_beats_random_points(rng):
    for k in (3, 5):
        d = VeroneseWhitney(k)
        y = unit_trace(rng, k - 1)
        p = farthest_projection(y, d)
        best = d.chord_distance_sq(y, p)
        z = rng.standard_normal((10**5, k - 1)) + 1j * rng.standard_normal((10**5, k - 1))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        # ||y - zz*||^2 = ||y||^2 + 1 - 2 z*yz
        vals = np.sum(np.abs(y) ** 2) + 1 - 2 * np.einsum("ni,ij,nj->n", z.conj(), y, z).real
        assert vals.max() <= best + 1e-9


def test_su_equivariance(rng):
    for k in (3, 4, 6):
        d = VeroneseWhitney(k)
        for _ in range(20):
            y = unit_trace(rng, k - 1)
            a = random_special_unitary(rng, k - 1)
            assert abs(np.linalg.det(a) - 1) < 1e-12
            lhs = farthest_projection(a @ y @ a.conj().T, d)
            rhs = a @ farthest_projection(y, d) @ a.conj().T
            assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_sphere_frame_example():
    f = tangent_frame_at(np.array([0.0, 0, 1]), S3)
    assert np.array_equal(f.basis, [[1, 0, 0], [0, 1, 0]])


def test_vw_frame_example():
    f = tangent_frame_at(vw_embed([1, 0]), VW3)
    e12 = np.array([[0, 1], [0, 0]])
    assert np.allclose(f.basis[0], (e12 + e12.T) / np.sqrt(2))
    assert np.allclose(f.basis[1], 1j * (e12 - e12.T) / np.sqrt(2))


def test_vw_frame_orthonormal_and_tangent(rng):
    d = VeroneseWhitney(5)
    for _ in range(100):
        p = vw_embed(random_unit(rng, 4))
        f = tangent_frame_at(p, d)
        assert f.dim == d.intrinsic_dim
        assert np.max(np.abs(f.coords @ f.coords.T - np.eye(f.dim))) < 1e-10
        # tangent vectors of the projector manifold satisfy pv + vp = v
        for v in f.basis:
            assert np.max(np.abs(p @ v + v @ p - v)) < 1e-10
            assert np.max(np.abs(v - v.conj().T)) < 1e-12


def test_coordinates_are_isometric(rng):
    d = VeroneseWhitney(5)
    a, b = random_hermitian(rng, 4), random_hermitian(rng, 4)
    ca, cb = d.to_coords(a), d.to_coords(b)
    assert len(ca) == d.ambient_dim == 16
    assert np.isclose(ca @ cb, np.trace(a @ b).real)
    assert np.allclose(d.from_coords(ca), a)


def test_differential_unit_gaps_reproduce_tangent_part(rng):
    d = VeroneseWhitney(4)
    # the farthest point moves against a tangential push, the nearest with it
    for diag, mode, sign in [([0.0, 1.0, 1.0], Mode.FARTHEST, -1), ([0.0, 0.0, 1.0], Mode.NEAREST, 1)]:
        y = np.diag(diag).astype(complex)
        f = tangent_frame_at(d.projection(y, mode), d)
        v = np.tensordot(rng.standard_normal(f.dim), f.basis, axes=1)
        w = v + 0.3 * np.diag([1.0, -2.0, 1.0])
        assert np.allclose(projection_differential(y, v, d, mode), sign * v, atol=1e-12)
        assert np.allclose(projection_differential(y, w, d, mode), sign * v, atol=1e-12)


def test_differential_vanishes_off_pairing():
    d = VeroneseWhitney(4)
    y = np.diag([0.1, 0.3, 0.6]).astype(complex)
    v = np.diag([0.0, 1.0, 0.0]).astype(complex)
    assert np.allclose(projection_differential(y, v, d, Mode.FARTHEST), 0)
    assert np.allclose(projection_differential(y, v, d, Mode.NEAREST), 0)


def _fd_errors(d, y, v, mode, steps):
    dv = projection_differential(y, v, d, mode)
    errs = []
    for h in steps:
        fd = (d.projection(y + h * v, mode) - d.projection(y - h * v, mode)) / (2 * h)
        errs.append(np.linalg.norm(fd - dv))
    return errs


@pytest.mark.parametrize("mode", [Mode.FARTHEST, Mode.NEAREST])
def test_vw_differential_finite_differences(rng, mode):
    d = VeroneseWhitney(4)
    for _ in range(5):
        y = unit_trace(rng, 3)
        v = random_hermitian(rng, 3)
        e4, e5, e6 = _fd_errors(d, y, v, mode, (1e-4, 1e-5, 1e-6))
        # one-sided first-order bound at h=1e-5, and the error shrinks with h
        fwd = (d.projection(y + 1e-5 * v, mode) - d.projection(y, mode)) / 1e-5
        assert np.linalg.norm(fwd - projection_differential(y, v, d, mode)) < 1e-5 * 1e3
        assert e5 < e4 and e5 < 1e-6


@pytest.mark.parametrize("mode", [Mode.FARTHEST, Mode.NEAREST])
def test_sphere_differential_finite_differences(rng, mode):
    y = rng.standard_normal(4)
    v = rng.standard_normal(4)
    e4, e5, _ = _fd_errors(Sphere(4), y, v, mode, (1e-4, 1e-5, 1e-6))
    assert e5 < e4 and e5 < 1e-7


def test_descriptor_json():
    assert descriptor_from_json({"kind": "vw", "k": 5}) == VeroneseWhitney(5)
    assert descriptor_from_json({"kind": "sphere", "N": 3}) == S3
