"""JSON-friendly encoding of complex matrices and vectors.

Complex arrays travel as flat row-major lists of [re, im] pairs so that a
round trip through ``json`` preserves every double bit.
"""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch


def matrix_to_entries(m: np.ndarray) -> list[list[float]]:
    """Flatten a complex matrix to row-major [re, im] pairs."""
    a = np.asarray(m, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in a]


def entries_to_matrix(entries, dim: int) -> np.ndarray:
    """Rebuild a dim x dim complex matrix from row-major [re, im] pairs."""
    d = int(dim)
    if d <= 0 or len(entries) != d * d:
        raise DimMismatch(
            f"expected {d * d} entries for a {d}x{d} matrix, got {len(entries)}"
        )
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return flat.reshape(d, d)


def vector_to_entries(v: np.ndarray) -> list[list[float]]:
    """Flatten a complex vector to [re, im] pairs."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in a]


def entries_to_vector(entries, dim: int) -> np.ndarray:
    """Rebuild a complex vector of length dim from [re, im] pairs."""
    d = int(dim)
    if d <= 0 or len(entries) != d:
        raise DimMismatch(f"expected {d} entries for a length-{d} vector, got {len(entries)}")
    return np.array([complex(re, im) for re, im in entries], dtype=complex)
