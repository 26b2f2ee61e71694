"""JSON matrix files: ``{"rows", "cols", "data": [[re, im], ...], "kind"}``.

``data`` is row-major.  Floats are written with Python's shortest round-trip
representation, so reading a written file reproduces every bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import PreconditionError, as_hermitian, as_matrix, clip_psd, eigh

KINDS = ("hermitian", "psd", "general")


def matrix_payload(M, kind: str | None = None) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise PreconditionError(f"expected a 2-D matrix, got shape {M.shape}")
    payload = {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in M.ravel()],
    }
    if kind is not None:
        payload["kind"] = kind
    return payload


def matrix_from_payload(payload: dict) -> np.ndarray:
    try:
        rows, cols, data = int(payload["rows"]), int(payload["cols"]), payload["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise PreconditionError(f"malformed matrix file: {exc}") from exc
    if rows < 1 or cols < 1:
        raise PreconditionError("rows and cols must be positive")
    if len(data) != rows * cols:
        raise PreconditionError(f"data has {len(data)} entries, expected rows*cols = {rows * cols}")
    arr = np.asarray(data, dtype=float)
    if arr.shape != (rows * cols, 2):
        raise PreconditionError("data entries must be [re, im] pairs")
    M = as_matrix((arr[:, 0] + 1j * arr[:, 1]).reshape(rows, cols), square=False)
    kind = payload.get("kind")
    if kind is not None and kind not in KINDS:
        raise PreconditionError(f"unknown matrix kind {kind!r}")
    if kind in ("hermitian", "psd"):
        as_hermitian(M)
    if kind == "psd":
        clip_psd(eigh(M).alpha)
    return M


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PreconditionError(f"{path}: not a JSON matrix file ({exc})") from exc
    return matrix_from_payload(payload)


def write_matrix(path, M, kind: str | None = None) -> None:
    Path(path).write_text(json.dumps(matrix_payload(M, kind)) + "\n")
