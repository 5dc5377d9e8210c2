"""Plain-text serialization of complex matrices for debugging.

Format: first line "nrows ncols", then one line per row with space-separated
"re,im" pairs written via repr (shortest round-trip form).
"""

import numpy as np


def save_complex_matrix(path, matrix) -> None:
    mat = np.asarray(matrix, dtype=complex)
    if mat.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    with open(path, "w") as fh:
        fh.write(f"{mat.shape[0]} {mat.shape[1]}\n")
        for row in mat:
            fh.write(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
            fh.write("\n")


def load_complex_matrix(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"bad matrix header in {path}")
        nrows, ncols = int(header[0]), int(header[1])
        out = np.empty((nrows, ncols), dtype=complex)
        for i in range(nrows):
            tokens = fh.readline().split()
            if len(tokens) != ncols:
                raise ValueError(f"row {i} has {len(tokens)} entries, expected {ncols}")
            for j, tok in enumerate(tokens):
                re, im = tok.split(",")
                out[i, j] = complex(float(re), float(im))
    return out
