"""Plain-text snapshots of matrices and nodal fields.

Matrices are written as ``row col value`` triplets after a ``# rows cols nnz``
header; fields as one line per node with its coordinates followed by the
value.  Floats use ``%.17g`` so a round trip is exact.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp


def write_matrix_triplets(path, matrix) -> None:
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for i in order:
            fh.write(f"{coo.row[i]} {coo.col[i]} {coo.data[i]:.17g}\n")


def read_matrix_triplets(path) -> sp.csr_matrix:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().lstrip("#").split()
        nrow, ncol = int(header[0]), int(header[1])
        data = np.loadtxt(fh, ndmin=2)
    if data.size == 0:
        return sp.csr_matrix((nrow, ncol))
    return sp.csr_matrix((data[:, 2], (data[:, 0].astype(int), data[:, 1].astype(int))),
                         shape=(nrow, ncol))


def write_field(path, coords: np.ndarray, values: np.ndarray, names=None) -> None:
    coords = np.atleast_2d(coords)
    dim = coords.shape[1]
    names = names or ["x", "y", "z"][:dim]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + " ".join(list(names) + ["value"]) + "\n")
        for c, v in zip(coords, values):
            fh.write(" ".join(f"{q:.17g}" for q in c) + f" {v:.17g}\n")


def read_field(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, comments="#", ndmin=2)
    return data[:, :-1], data[:, -1]
