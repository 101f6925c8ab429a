"""Magma and factor files.

Two magma formats are read and written:

* text: first line ``order n``, then ``n`` lines of ``n`` space-separated
  integers (row ``a`` holds the products ``a*0 .. a*(n-1)``);
* JSON (``format_version`` 1): ``order``, ``table`` and optional
  ``labels`` and ``metadata`` keys.

JSON is written in one canonical layout (fixed key order, scalar lists on
one line, metadata keys sorted) so that ``write(parse(f)) == f`` for any
file this module produced.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .core import FiniteMagma, magma_from_table
from .errors import ConstructionError, PreconditionError
from .products import SkewFactors, SmashFactors

FORMAT_VERSION = 1


@dataclass
class MagmaFile:
    magma: FiniteMagma
    labels: Optional[list[str]] = None
    metadata: dict = field(default_factory=dict)


def canonical_json(doc: Any, indent: int = 0) -> str:
    """Pretty JSON with scalar lists kept on a single line."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(doc, dict):
        if not doc:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {canonical_json(v, indent + 1)}" for k, v in doc.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(doc, (list, tuple)):
        if all(not isinstance(x, (list, tuple, dict)) for x in doc):
            return "[" + ", ".join(json.dumps(x) for x in doc) + "]"
        items = [inner + canonical_json(x, indent + 1) for x in doc]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(doc, np.generic):
        return json.dumps(doc.item())
    return json.dumps(doc)


def _sorted_meta(meta: dict) -> dict:
    return json.loads(json.dumps(meta, sort_keys=True))


def magma_to_doc(m: FiniteMagma, labels: Optional[list[str]] = None,
                 metadata: Optional[dict] = None) -> dict:
    doc: dict = {"format_version": FORMAT_VERSION, "order": m.order, "table": m.rows()}
    if labels is not None:
        doc["labels"] = list(labels)
    if metadata:
        doc["metadata"] = _sorted_meta(metadata)
    return doc


def format_magma_json(m: FiniteMagma, labels=None, metadata=None) -> str:
    return canonical_json(magma_to_doc(m, labels, metadata)) + "\n"


def format_magma_text(m: FiniteMagma) -> str:
    lines = [f"order {m.order}"]
    lines += [" ".join(str(x) for x in row) for row in m.rows()]
    return "\n".join(lines) + "\n"


def magma_from_doc(doc: dict) -> MagmaFile:
    if not isinstance(doc, dict):
        raise ConstructionError("magma document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ConstructionError(f"unsupported format_version {version!r}")
    for key in ("order", "table"):
        if key not in doc:
            raise ConstructionError(f"magma document lacks {key!r}")
    m = magma_from_table(doc["order"], doc["table"])
    labels = doc.get("labels")
    if labels is not None and len(labels) != m.order:
        raise ConstructionError(f"{len(labels)} labels for order {m.order}")
    return MagmaFile(m, labels, doc.get("metadata") or {})


def parse_magma_text(text: str) -> MagmaFile:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ConstructionError("empty magma file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "order":
        raise ConstructionError("first line must read 'order n'")
    try:
        n = int(head[1])
        rows = [[int(x) for x in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise ConstructionError(f"non-integer entry: {exc}") from None
    return MagmaFile(magma_from_table(n, rows))


def parse_magma(text: str) -> MagmaFile:
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConstructionError(f"invalid JSON: {exc}") from None
        return magma_from_doc(doc)
    return parse_magma_text(text)


def load_magma(path: Union[str, Path]) -> MagmaFile:
    return parse_magma(Path(path).read_text(encoding="utf-8"))


# -- factor files ------------------------------------------------------------

def smash_factors_to_doc(f: SmashFactors, metadata: Optional[dict] = None) -> dict:
    na, nb = f.phi1.shape
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "smash",
        "order_a": na,
        "order_b": nb,
        "xi1": f.xi1.tolist(),
        "xi2": f.xi2.tolist(),
        "phi1": f.phi1.tolist(),
        "phi2": f.phi2.tolist(),
        "phi3": f.phi3.tolist(),
    }
    if metadata:
        doc["metadata"] = _sorted_meta(metadata)
    return doc


def skew_factors_to_doc(f: SkewFactors, metadata: Optional[dict] = None) -> dict:
    na, nb = f.phi.shape
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "skew",
        "order_a": na,
        "order_b": nb,
        "order_n": f.n_group.order,
        "n_table": f.n_group.rows(),
        "embed_a": f.embed_a.tolist(),
        "embed_b": f.embed_b.tolist(),
        "phi": f.phi.tolist(),
        "eta": f.eta.tolist(),
        "kappa": f.kappa.tolist(),
        "xi": f.xi.tolist(),
    }
    if metadata:
        doc["metadata"] = _sorted_meta(metadata)
    return doc


def _arr(doc: dict, key: str, ndim: int) -> np.ndarray:
    if key not in doc:
        raise PreconditionError(f"factors file lacks {key!r}")
    try:
        arr = np.array(doc[key], dtype=np.int64)
    except (ValueError, TypeError):
        raise PreconditionError(f"{key!r} is not a rectangular integer array") from None
    if arr.ndim != ndim:
        raise PreconditionError(f"{key!r} has {arr.ndim} dimensions, expected {ndim}")
    return arr


def factors_from_doc(doc: dict) -> Union[SmashFactors, SkewFactors]:
    if not isinstance(doc, dict) or doc.get("format_version") != FORMAT_VERSION:
        raise PreconditionError("factors file needs format_version 1")
    kind = doc.get("kind")
    if kind == "smash":
        f = SmashFactors(*(_arr(doc, k, 3) for k in ("xi1", "xi2")),
                         *(_arr(doc, k, 2) for k in ("phi1", "phi2", "phi3")))
        errs = f.shape_errors(doc.get("order_a", f.phi1.shape[0]), doc.get("order_b", f.phi1.shape[1]))
        if errs:
            raise PreconditionError("; ".join(errs))
        return f
    if kind == "skew":
        n_table = doc.get("n_table")
        if n_table is None:
            raise PreconditionError("skew factors file lacks 'n_table'")
        n_group = magma_from_table(len(n_table), n_table)
        f = SkewFactors(
            n_group=n_group,
            embed_a=_arr(doc, "embed_a", 1),
            embed_b=_arr(doc, "embed_b", 1),
            phi=_arr(doc, "phi", 2),
            eta=_arr(doc, "eta", 3),
            kappa=_arr(doc, "kappa", 3),
            xi=_arr(doc, "xi", 4),
        )
        errs = f.shape_errors(doc.get("order_a", f.phi.shape[0]), doc.get("order_b", f.phi.shape[1]))
        if errs:
            raise PreconditionError("; ".join(errs))
        return f
    raise PreconditionError(f"unknown factors kind {kind!r}")


def load_factors(path: Union[str, Path]) -> Union[SmashFactors, SkewFactors]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"invalid JSON in factors file: {exc}") from None
    return factors_from_doc(doc)
