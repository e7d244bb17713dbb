"""JSON instance files and report documents.

Instance files carry ``n``, ``m``, ``c``, ``theta`` and ``h`` (k matrices of
size n x n, lower triangle authoritative), plus optional ``seed`` and
``label``. Floats are written with ``repr`` so every value round-trips
bit-exactly; keys are sorted so files are canonical.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .slant_model import SecondFundamentalForm, SlantInstance, make_instance

SYMMETRY_TOL = 1e-12


class InstanceFormatError(ValueError):
    """The instance document is malformed or violates the shape constraints."""


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def instance_to_doc(inst: SlantInstance, *, seed: int | None = None, label: str | None = None) -> dict:
    doc = {
        "n": inst.n,
        "m": inst.m,
        "c": inst.c,
        "theta": inst.theta,
        "h": inst.sff.matrices.tolist(),
    }
    if seed is not None:
        doc["seed"] = int(seed)
    if label is not None:
        doc["label"] = label
    return doc


def _require(doc: dict, key: str, kind):
    if key not in doc:
        raise InstanceFormatError(f"missing key {key!r}")
    value = doc[key]
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise InstanceFormatError(f"{key!r} must be an integer")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceFormatError(f"{key!r} must be a number")
    return float(value)


def instance_from_doc(doc) -> tuple[SlantInstance, dict]:
    """Parse an instance document; returns the instance and its metadata (seed, label)."""
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    n = _require(doc, "n", int)
    m = _require(doc, "m", int)
    c = _require(doc, "c", float)
    theta = _require(doc, "theta", float)
    if "h" not in doc:
        raise InstanceFormatError("missing key 'h'")
    try:
        h = np.asarray(doc["h"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"'h' is not a numeric array: {exc}") from exc
    k = 4 * m - n
    if h.size == 0 and k == 0:
        h = np.zeros((0, n, n))
    if h.shape != (k, n, n):
        raise InstanceFormatError(f"'h' must have shape ({k}, {n}, {n}) for n={n}, m={m}; got {h.shape}")
    if not np.all(np.isfinite(h)):
        raise InstanceFormatError("'h' contains non-finite values")
    asym = np.max(np.abs(h - np.swapaxes(h, 1, 2)), initial=0.0)
    if asym > SYMMETRY_TOL:
        raise InstanceFormatError(f"'h' is not symmetric (max asymmetry {asym:.3g})")
    try:
        inst = make_instance(n, m, c, theta, SecondFundamentalForm.from_matrices(h, use="lower"))
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc
    meta = {key: doc[key] for key in ("seed", "label") if key in doc}
    return inst, meta


def read_instance(path) -> tuple[SlantInstance, dict]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: invalid JSON ({exc})") from exc
    return instance_from_doc(doc)


def write_instance(path, inst: SlantInstance, **meta) -> None:
    Path(path).write_text(dumps(instance_to_doc(inst, **meta)))
