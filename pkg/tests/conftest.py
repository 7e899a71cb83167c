import numpy as np
import pytest

from shapetest import KAdConfig, ShapePoint, write_landmarks
from shapetest import montecarlo as mc


def random_hermitian(rng, dim, scale=1.0):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (a + a.conj().T) / 2


def random_unit(rng, dim):
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_special_unitary(rng, dim):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return q / np.linalg.det(q) ** (1.0 / dim)


def chord(p, q):
    return float(np.sqrt(np.sum(np.abs(np.asarray(p) - np.asarray(q)) ** 2)))


def configs_from_vectors(vectors, prefix="s", scale=10.0, shift=3 + 4j):
    k = vectors.shape[1] + 1
    return [
        KAdConfig(f"{prefix}{i}", scale * ShapePoint(k, v).landmarks() + shift)
        for i, v in enumerate(vectors)
    ]


def write_sample_file(path, spec, n, fmt="blocks", seed=None):
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    write_landmarks(path, configs_from_vectors(mc.draw_vectors(spec, n, rng)), fmt)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
