"""Hashed character n-gram features.

N-grams are hashed with FNV-1a 64-bit over their UTF-8 bytes and masked down
to a power-of-two bucket count, so feature vectors are reproducible across
runs, platforms and implementations. Vectors are L2-normalized.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class FeatureVector:
    """Sparse unit vector: sorted bucket indices with their weights."""

    indices: np.ndarray
    values: np.ndarray
    dim: int


def _check_config(dim: int, n_range: tuple[int, int]) -> None:
    if dim < 1 or dim & (dim - 1):
        raise ValidationError(f"feature dimension must be a power of two, got {dim}")
    n_min, n_max = n_range
    if not (1 <= n_min <= n_max):
        raise ValidationError(f"bad n-gram range {n_range}")


def featurize(text: str, dim: int, n_range: tuple[int, int] = (2, 5)) -> FeatureVector:
    """Count character n-grams for every n in ``n_range``, hash into ``dim``
    buckets, L2-normalize. Empty/too-short text gives the zero vector."""
    _check_config(dim, n_range)
    n_min, n_max = n_range
    mask = dim - 1
    counts: Counter[int] = Counter()
    for n in range(n_min, n_max + 1):
        for start in range(len(text) - n + 1):
            gram = text[start:start + n]
            counts[fnv1a64(gram.encode("utf-8")) & mask] += 1
    if not counts:
        return FeatureVector(indices=np.empty(0, dtype=np.int64),
                             values=np.empty(0, dtype=np.float64), dim=dim)
    indices = np.array(sorted(counts), dtype=np.int64)
    values = np.array([counts[i] for i in indices], dtype=np.float64)
    values /= np.linalg.norm(values)
    return FeatureVector(indices=indices, values=values, dim=dim)


def feature_matrix(texts: Sequence[str], dim: int,
                   n_range: tuple[int, int] = (2, 5)) -> sp.csr_matrix:
    """CSR matrix of featurized texts, one row per text."""
    _check_config(dim, n_range)
    indptr = [0]
    indices: list[np.ndarray] = []
    data: list[np.ndarray] = []
    for text in texts:
        vec = featurize(text, dim, n_range)
        indices.append(vec.indices)
        data.append(vec.values)
        indptr.append(indptr[-1] + len(vec.indices))
    if not texts:
        return sp.csr_matrix((0, dim), dtype=np.float64)
    return sp.csr_matrix(
        (np.concatenate(data) if data else np.empty(0),
         np.concatenate(indices) if indices else np.empty(0, dtype=np.int64),
         np.array(indptr)),
        shape=(len(texts), dim),
    )
