"""Text formats used by the command line: node files and complex CSV blocks.

Node files hold one location per line, written with ``repr`` so that every
float survives a round trip.  Complex data is CSV with a ``re,im`` column pair
per right-hand side.
"""

import csv

import numpy as np

__all__ = ["write_nodes", "read_nodes", "write_complex_csv", "read_complex_csv"]


def write_nodes(path, p):
    p = np.asarray(p, dtype=float).ravel()
    with open(path, "w", encoding="utf-8") as f:
        for v in p:
            f.write(repr(float(v)) + "\n")


def read_nodes(path):
    vals = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            try:
                vals.append(float(s))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {s!r}") from None
    return np.array(vals, dtype=float)


def _header(ncols):
    if ncols == 1:
        return ["re", "im"]
    return [f"{part}{k}" for k in range(ncols) for part in ("re", "im")]


def write_complex_csv(path, X):
    """Write a complex vector or ``rows x r`` matrix; column pairs are ``re,im`` per column of `X`."""
    X = np.asarray(X, dtype=complex)
    if X.ndim == 1:
        X = X[:, None]
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(_header(X.shape[1]))
        for row in X:
            w.writerow([repr(float(v)) for z in row for v in (z.real, z.imag)])


def read_complex_csv(path):
    """Inverse of :func:`write_complex_csv`.  A header line is optional; returns ``rows x r``."""
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        for lineno, rec in enumerate(csv.reader(f), 1):
            if not rec or all(not c.strip() for c in rec):
                continue
            try:
                vals = [float(c) for c in rec]
            except ValueError:
                if lineno == 1:
                    continue
                raise ValueError(f"{path}:{lineno}: non-numeric field") from None
            if len(vals) % 2:
                raise ValueError(f"{path}:{lineno}: expected re,im pairs, got {len(vals)} fields")
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: ragged rows")
    A = np.array(rows, dtype=float)
    return A[:, 0::2] + 1j * A[:, 1::2]
