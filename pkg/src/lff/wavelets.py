"""Generalized Haar wavelets and generator files (``.lfgen.json``)."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import LFFError, ValidationError
from .field import FieldParams, root_of_unity
from .funcspace import StepFunction, norm


def haar_generators(params: FieldParams) -> list[StepFunction]:
    """psi^l, l = 1..q-1: value w^(l k) on the coset p u(k) of pD in D, w = exp(2 pi i/q)."""
    q = params.q
    out = []
    for l in range(1, q):
        out.append(StepFunction(params, 0, 1, [root_of_unity(l * k, q) for k in range(q)]))
    return out


def perturbed_haar(params: FieldParams, eps: float = 0.2) -> list[StepFunction]:
    """Haar generators refined to P^1 cells with cells off the digit diagonal scaled by 1 - eps.

    For q = 2 the single generator is (1, 0.8, -0.8, -1) / norm.  Each row
    of cells inside a P^1 coset is scaled the same way, so the mean stays 0.
    """
    q = params.q
    scale = np.array([1.0 if a == b else 1.0 - eps for a in range(q) for b in range(q)])
    out = []
    for psi in haar_generators(params):
        g = psi.embed(0, 2)
        g = g.with_values(g.values * scale)
        out.append(g * (1 / norm(g)))
    return out


def _field_params(doc) -> FieldParams:
    if not isinstance(doc, dict):
        raise ValidationError("field", "must be an object with p, c, modulus")
    for key in ("p", "c"):
        if not isinstance(doc.get(key), int):
            raise ValidationError(f"field.{key}", "missing or not an integer")
    modulus = doc.get("modulus", [])
    if not isinstance(modulus, list) or not all(isinstance(a, int) for a in modulus):
        raise ValidationError("field.modulus", "must be a list of integer coefficients")
    try:
        return FieldParams(doc["p"], doc["c"], tuple(modulus))
    except LFFError as exc:
        name = "field.p" if "prime" in str(exc) else "field.modulus"
        raise ValidationError(name, str(exc)) from None


def step_function_from_json(doc, params: FieldParams, where: str = "generator") -> StepFunction:
    if not isinstance(doc, dict):
        raise ValidationError(where, "must be an object")
    for key in ("M", "N"):
        if not isinstance(doc.get(key), int) or doc[key] < 0:
            raise ValidationError(f"{where}.{key}", "missing or not a nonnegative integer")
    vals = doc.get("values")
    if not isinstance(vals, list):
        raise ValidationError(f"{where}.values", "missing or not a list")
    want = params.q ** (doc["M"] + doc["N"])
    if len(vals) != want:
        raise ValidationError(
            f"{where}.values", f"expected q^(M+N) = {want} values for q={params.q}, M={doc['M']}, N={doc['N']}, got {len(vals)}"
        )
    out = np.empty(want, dtype=np.complex128)
    for i, v in enumerate(vals):
        if isinstance(v, (int, float)):
            out[i] = v
        elif isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
            out[i] = complex(v[0], v[1])
        else:
            raise ValidationError(f"{where}.values[{i}]", "must be a number or a [re, im] pair")
    for key in ("p", "c", "modulus"):
        if key in doc and doc[key] != getattr(params, key) and not (key == "modulus" and tuple(doc[key]) == params.modulus):
            raise ValidationError(f"{where}.{key}", "differs from the file's field parameters")
    return StepFunction(params, doc["M"], doc["N"], out)


def parse_generator_document(doc) -> list[StepFunction]:
    if not isinstance(doc, dict):
        raise ValidationError("document", "top level must be an object")
    if "field" not in doc:
        raise ValidationError("field", "missing")
    params = _field_params(doc["field"])
    gens = doc.get("generators")
    if not isinstance(gens, list) or not gens:
        raise ValidationError("generators", "missing or empty list")
    return [step_function_from_json(g, params, f"generators[{i}]") for i, g in enumerate(gens)]


def generator_document(generators: Sequence[StepFunction]) -> dict:
    if not generators:
        raise ValidationError("generators", "nothing to save")
    params = generators[0].params
    for i, g in enumerate(generators):
        if g.params != params:
            raise ValidationError(f"generators[{i}]", "field parameters differ from generators[0]")
    return {"field": params.to_json(), "generators": [g.to_json() for g in generators]}


def load_generators(path: str | os.PathLike) -> list[StepFunction]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError("path", f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("document", f"invalid JSON: {exc}") from None
    return parse_generator_document(doc)


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_generators(path: str | os.PathLike, generators: Sequence[StepFunction]) -> None:
    # json writes floats with repr(), the shortest string that round-trips.
    write_atomic(path, json.dumps(generator_document(generators), indent=1) + "\n")


def generator_io(path, direction: str, payload: Sequence[StepFunction] | None = None) -> list[StepFunction]:
    if direction == "load":
        return load_generators(path)
    if direction == "save":
        save_generators(path, payload or [])
        return list(payload)
    raise ValueError(f"unknown direction {direction!r}")
