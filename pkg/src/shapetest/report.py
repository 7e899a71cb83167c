"""JSON report documents.

Floats go through :mod:`json`, which writes the shortest decimal that
round-trips a binary64 value. Complex numbers are ``[re, im]`` pairs.
"""
import hashlib
from importlib import resources
import json
from pathlib import Path

import numpy as np

from .cxlinalg import hermitian_eig
from .manifolds import VeroneseWhitney
from .montecarlo import ConsistencyResult, ExperimentResult
from .shapes import helmert_submatrix

SCHEMA_VERSION = "1"


def load_schema():
    text = resources.files("shapetest").joinpath("schema/report-v1.json").read_text("utf-8")
    return json.loads(text)


def file_digest(path):
    h = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return {"path": str(path), "sha256": h}


def _complex_list(z):
    return [[float(c.real), float(c.imag)] for c in np.ravel(z)]


def _complex_matrix(a):
    return [_complex_list(row) for row in np.asarray(a)]


def _real_matrix(a):
    return [[float(x) for x in row] for row in np.atleast_2d(a)]


def representative(point):
    """Unit eigenvector spanning the projector ``point``, with canonical phase."""
    eig = hermitian_eig(point)
    return eig.eigenvectors[:, -1]


def icon(rep):
    """Helmert-inverse landmarks rotated so landmark 1 -> 2 points along +x."""
    rep = np.asarray(rep, dtype=complex)
    z = helmert_submatrix(len(rep) + 1).T @ rep
    step = z[1] - z[0]
    if abs(step) > 1e-12:
        z = z * (np.conj(step) / abs(step))
    return np.column_stack([z.real, z.imag])


def estimate_to_json(est, source=None):
    d = est.descriptor
    out = {
        "type": "location_estimate",
        "kind": est.kind.value,
        "descriptor": _descriptor(d),
        "n": int(est.n),
        "anticovariance": _real_matrix(est.anticov),
    }
    if isinstance(d, VeroneseWhitney):
        rep = representative(est.point)
        out["k"] = d.k
        out["representative"] = _complex_list(rep)
        out["icon"] = _real_matrix(icon(rep))
        out["eigenvalues"] = [float(x) for x in est.eigen.eigenvalues]
        out["ambient_mean"] = _complex_matrix(est.ambient_mean)
    else:
        out["point"] = [float(x) for x in est.point]
        out["ambient_mean"] = [float(x) for x in est.ambient_mean]
    if source is not None:
        out["source"] = source
    return out


def _descriptor(d):
    if isinstance(d, VeroneseWhitney):
        return {"kind": "vw", "k": d.k}
    return {"kind": "sphere", "N": d.N}


def two_sample_to_json(rep):
    pooled = {"rule": rep.pooled.rule.value, "weights": [float(w) for w in rep.pooled.weights]}
    d = rep.group_estimates[0].descriptor if rep.group_estimates else None
    if rep.pooled.eigen is not None:
        r = representative(rep.pooled.point)
        pooled["representative"] = _complex_list(r)
        pooled["icon"] = _real_matrix(icon(r))
    else:
        pooled["point"] = [float(x) for x in np.ravel(rep.pooled.point)]
    out = {
        "type": "two_sample",
        "statistic": float(rep.statistic),
        "df": int(rep.df),
        "pvalue": float(rep.pvalue),
        "alpha": float(rep.alpha),
        "critical_value": float(rep.critical_value),
        "reject": bool(rep.reject),
        "location": rep.location_kind.value,
        "method": rep.method,
        "pooling": rep.pooling.value,
        "pseudo_inverse_used": bool(rep.pseudo_inverse_used),
        "n": int(rep.n),
        "m": int(rep.m),
        "pooled": pooled,
        "groups": [],
    }
    if rep.group_estimates:
        out["groups"] = [estimate_to_json(e, src) for e, src in zip(rep.group_estimates, "ab")]
    if d is not None:
        out["descriptor"] = _descriptor(d)
    return out


def experiment_to_json(res: ExperimentResult):
    return {
        "type": "experiment",
        "experiment": res.experiment,
        "replicates": int(res.replicates),
        "rejections": int(res.rejections),
        "errors": int(res.errors),
        "empirical_level": float(res.empirical_level),
        "per_replicate_stats": [None if s is None else float(s) for s in res.per_replicate_stats],
        "wall_clock_seconds": float(res.wall_clock_seconds),
        "seed": int(res.seed),
        "parameters": res.parameters,
    }


def consistency_to_json(res: ConsistencyResult):
    return {
        "type": "consistency",
        "rows": [{"n": int(n), "median_chord_error": float(e)} for n, e in res.rows],
        "strictly_decreasing": bool(res.strictly_decreasing),
        "seeds": int(res.seeds),
        "seed": int(res.seed),
        "wall_clock_seconds": float(res.wall_clock_seconds),
        "parameters": res.parameters,
    }


def document(command, result, inputs=(), warnings=()):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": [file_digest(p) for p in inputs],
        "result": result,
        "warnings": list(warnings),
    }


def dumps(doc):
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"

