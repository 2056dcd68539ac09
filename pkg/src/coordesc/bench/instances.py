"""Plain-text instance files: named dense matrices, each CSV with a one-line shape header.

Layout::

    # coordesc instance kind=lasso lambda=1000.0
    A,50,100
    <50 rows of 100 comma-separated values>
    b,50,1
    <50 rows>
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ConfigurationError, FileError
from ..problems import LassoProblem, LogisticProblem, NmfProblem, SvmDualProblem

MAGIC = "# coordesc instance"


def write_matrices(path, matrices: dict, attrs: dict) -> Path:
    path = Path(path)
    head = " ".join(f"{k}={v}" for k, v in attrs.items())
    lines = [f"{MAGIC} {head}".rstrip()]
    for name, mat in matrices.items():
        arr = np.asarray(mat, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        lines.append(f"{name},{arr.shape[0]},{arr.shape[1]}")
        lines.extend(",".join(repr(float(v)) for v in row) for row in arr)
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot write {path}: {exc}") from exc
    return path


def read_matrices(path) -> tuple[dict, dict]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc}") from exc
    if not lines or not lines[0].startswith(MAGIC):
        raise ConfigurationError(f"{path} is not an instance file")
    attrs = dict(tok.split("=", 1) for tok in lines[0][len(MAGIC):].split())
    mats = {}
    k = 1
    while k < len(lines):
        if not lines[k].strip():
            k += 1
            continue
        name, rows, cols = lines[k].split(",")
        rows, cols = int(rows), int(cols)
        body = lines[k + 1:k + 1 + rows]
        if len(body) != rows:
            raise ConfigurationError(f"matrix {name} in {path} is truncated")
        arr = np.array([[float(v) for v in ln.split(",")] for ln in body]).reshape(rows, cols)
        mats[name] = arr
        k += 1 + rows
    return mats, attrs


def save_instance(problem, path) -> Path:
    """Write the data of a LASSO, NMF, logistic or SVM instance."""
    if isinstance(problem, LassoProblem):
        return write_matrices(path, {"A": problem.A, "b": problem.b}, {"kind": "lasso", "lambda": problem.lam})
    if isinstance(problem, NmfProblem):
        return write_matrices(path, {"M": problem.M, "X": problem.X, "Y": problem.Y}, {"kind": "nmf"})
    if isinstance(problem, LogisticProblem):
        return write_matrices(path, {"X": problem.X, "y": problem.y}, {"kind": "logistic", "C": problem.C})
    if isinstance(problem, SvmDualProblem):
        if problem.X is None:
            raise ConfigurationError("an SVM instance built from Q alone cannot be saved")
        return write_matrices(path, {"X": problem.X, "y": problem.y}, {"kind": "svm", "C": problem.C})
    raise ConfigurationError(f"cannot save {type(problem).__name__}")


def load_instance(path):
    """Inverse of :func:`save_instance`."""
    mats, attrs = read_matrices(path)
    kind = attrs.get("kind")
    if kind == "lasso":
        return LassoProblem(mats["A"], mats["b"].ravel(), float(attrs["lambda"]))
    if kind == "nmf":
        return NmfProblem(mats["M"], mats["X"], mats["Y"])
    if kind == "logistic":
        return LogisticProblem(mats["X"], mats["y"].ravel(), float(attrs["C"]))
    if kind == "svm":
        return SvmDualProblem(mats["X"], mats["y"].ravel(), float(attrs["C"]))
    raise ConfigurationError(f"unknown instance kind {kind!r}")
