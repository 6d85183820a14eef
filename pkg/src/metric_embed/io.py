"""JSON formats for spaces, skeletons, embeddings and local-map directories.

Metric space: ``{"labels": [...], "dist": [n*n reals, row-major], "base": index|null}``.
Embedding: ``{"labels": [...], "outer_exponent": p|"inf", "block_sizes": [...],
"coords": [[...], ...], "meta": {...}}``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import EmbeddingTable, FiniteMetricSpace, validate_metric
from .gluing import LocalEmbeddingFamily, ball


def _num(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _unnum(x):
    return float(x) if isinstance(x, str) else x


def space_to_json(space: FiniteMetricSpace) -> dict:
    return {"labels": list(space.labels), "dist": space.dist.reshape(-1).tolist(), "base": space.base_index}


def space_from_json(obj: dict) -> FiniteMetricSpace:
    labels = obj["labels"]
    n = len(labels)
    flat = np.asarray(obj["dist"], dtype=float)
    if flat.size != n * n:
        raise ValueError(f"dist has {flat.size} entries, expected {n}*{n}")
    return validate_metric(flat.reshape(n, n), labels, obj.get("base"))


def embedding_to_json(table: EmbeddingTable) -> dict:
    return {
        "labels": list(table.domain.labels),
        "outer_exponent": _num(table.outer_exponent),
        "block_sizes": list(table.block_sizes),
        "coords": table.coords.tolist(),
        "meta": table.meta,
    }


def embedding_from_json(obj: dict, domain: FiniteMetricSpace) -> EmbeddingTable:
    if list(obj.get("labels", domain.labels)) != list(domain.labels):
        raise ValueError("embedding labels do not match the space")
    return EmbeddingTable(domain, np.asarray(obj["coords"], dtype=float), obj["block_sizes"],
                          _unnum(obj.get("outer_exponent", 2.0)), obj.get("meta", {}))


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_default)
    if path is None or str(path) == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n")
    return text


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return _num(float(o))
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def write_family(fam: LocalEmbeddingFamily, directory) -> None:
    """One ``f_<n>.json`` per level holding the ball's parent indices and images."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for n, table in sorted(fam.maps.items()):
        write_json({
            "n": n,
            "points": ball(fam.domain, n).tolist(),
            "outer_exponent": _num(table.outer_exponent),
            "block_sizes": list(table.block_sizes),
            "coords": table.coords.tolist(),
        }, out / f"f_{n}.json")


def read_family(directory, domain: FiniteMetricSpace, eps0: float) -> LocalEmbeddingFamily:
    maps = {}
    for path in sorted(Path(directory).glob("f_*.json")):
        obj = read_json(path)
        n = int(obj["n"])
        members = ball(domain, n)
        if list(obj["points"]) != members.tolist():
            raise ValueError(f"{path.name}: points do not match B_{n} of the space")
        maps[n] = EmbeddingTable(domain.subspace(members), np.asarray(obj["coords"], dtype=float),
                                 obj["block_sizes"], _unnum(obj["outer_exponent"]))
    return LocalEmbeddingFamily(domain, float(eps0), maps)
