"""JSON formats for matrix sets, certificates, and counterexample bundles."""

from __future__ import annotations

import json
from typing import Optional, Sequence

import numpy as np

from .errors import FormatError
from .graph import _loads, _require_keys, graph_from_dict
from .lyapunov import DEFAULT_DELTA, Certificate, MatrixSet


def _matrix(value, what) -> np.ndarray:
    try:
        a = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what}: not a numeric matrix") from exc
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise FormatError(f"{what}: expected a square matrix, got shape {a.shape}")
    return a


def matrix_set_from_dict(doc, symbols: Optional[Sequence[str]] = None) -> MatrixSet:
    _require_keys(doc, {"matrices"}, {"n"}, what="matrix set")
    mats = doc["matrices"]
    if not isinstance(mats, dict) or not mats:
        raise FormatError("'matrices' must be a nonempty object keyed by symbol")
    arrays = {k: _matrix(v, f"matrix {k!r}") for k, v in mats.items()}
    shapes = {a.shape for a in arrays.values()}
    if len(shapes) != 1:
        raise FormatError(f"matrices have different shapes: {sorted(shapes)}")
    n = next(iter(shapes))[0]
    if "n" in doc and doc["n"] != n:
        raise FormatError(f"declared n={doc['n']} but matrices are {n}x{n}")
    return MatrixSet.from_mapping(arrays, symbols)


def matrix_set_to_dict(s: MatrixSet) -> dict:
    return {"n": s.n, "matrices": {sym: s.matrices[k].tolist() for k, sym in enumerate(s.symbols)}}


def parse_matrix_set(document, symbols=None) -> MatrixSet:
    return matrix_set_from_dict(_loads(document), symbols)


def certificate_from_dict(doc) -> Certificate:
    _require_keys(doc, set(), {"delta", "quadratics", "diagonals"}, what="certificate")
    has_q, has_d = "quadratics" in doc, "diagonals" in doc
    if has_q == has_d:
        raise FormatError("certificate needs exactly one of 'quadratics' or 'diagonals'")
    delta = float(doc.get("delta", DEFAULT_DELTA))
    if has_d:
        diag = doc["diagonals"]
        if not isinstance(diag, dict):
            raise FormatError("'diagonals' must be an object keyed by node")
        return Certificate.from_diagonals({k: list(v) for k, v in diag.items()}, delta=delta)
    quad = doc["quadratics"]
    if not isinstance(quad, dict):
        raise FormatError("'quadratics' must be an object keyed by node")
    return Certificate({k: _matrix(v, f"form {k!r}") for k, v in quad.items()}, delta=delta)


def certificate_to_dict(c: Certificate) -> dict:
    if c.diagonal:
        return {"delta": c.delta,
                "diagonals": {k: np.diag(p).tolist() for k, p in c.forms.items()}}
    return {"delta": c.delta,
            "quadratics": {k: np.asarray(p).tolist() for k, p in c.forms.items()}}


def parse_certificate(document) -> Certificate:
    return certificate_from_dict(_loads(document))


def bundle_parts(document):
    """Graph, matrix set, and diagonal certificate carried by a counterexample bundle."""
    doc = _loads(document)
    _require_keys(doc, {"word", "n", "graph", "matrices", "diagonals"}, {"verification"},
                  what="bundle")
    for name in ("matrices", "diagonals"):
        for k, v in doc[name].items():
            flat = np.ravel(np.array(v, dtype=object))
            if not all(isinstance(x, int) and not isinstance(x, bool) for x in flat):
                raise FormatError(f"bundle {name} {k!r} must contain integers only")
    g = graph_from_dict(doc["graph"])
    s = matrix_set_from_dict({"n": doc["n"], "matrices": doc["matrices"]}, g.alphabet)
    c = Certificate.from_diagonals(doc["diagonals"])
    return g, s, c, tuple(doc["word"])


def dumps(doc) -> str:
    return json.dumps(doc, indent=2)
