"""Subspace distances and the minimum distance of a sensing codebook."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .codebook import Codebook, _phase_numerators, _unit_phasor


@dataclass(frozen=True)
class DistanceReport:
    d_min: float
    argmin_pair: tuple[int, int]
    lower_bound: float
    upper_bound: float
    pair_count_evaluated: int

    def as_dict(self, m: int, n: int) -> dict:
        out = {"m": m, "n": n}
        out.update(asdict(self))
        out["argmin_pair"] = list(self.argmin_pair)
        return out


TIE_TOL = 1e-12


def _clamp(d):
    return np.clip(d, 0.0, 1.0)


def pair_distance(c1: np.ndarray, c2: np.ndarray) -> float:
    """``1 - |c1^H c2|^2`` for unit-norm vectors, clamped to [0, 1]."""
    c1 = np.asarray(c1)
    c2 = np.asarray(c2)
    if c1.shape != c2.shape:
        raise ValueError(f"dimension mismatch: {c1.shape} vs {c2.shape}")
    return float(_clamp(1.0 - abs(np.vdot(c1, c2)) ** 2))


def general_subspace_distance(u: np.ndarray, v: np.ndarray, atol: float = 1e-10) -> float:
    """Sum of squared sines of the principal angles between span(U) and span(V)."""
    u = np.atleast_2d(np.asarray(u, dtype=complex).T).T
    v = np.atleast_2d(np.asarray(v, dtype=complex).T).T
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    t = u.shape[1]
    eye = np.eye(t)
    for name, b in (("U", u), ("V", v)):
        if not np.allclose(b.conj().T @ b, eye, atol=atol):
            raise ValueError(f"{name} does not have orthonormal columns")
    sv = np.linalg.svd(u.conj().T @ v, compute_uv=False)
    return float(np.clip(t - np.sum(sv**2), 0.0, t))


def _report(book: Codebook, d_min: float, pair: tuple[int, int], count: int) -> DistanceReport:
    m = book.m
    return DistanceReport(float(d_min), pair, 1.0 - 2.0 / m, 1.0 - 1.0 / m, count)


def offset_distances(book: Codebook) -> np.ndarray:
    """Distance between c_1 and c_{1+s} for s = 0..N-1.

    ``d(c_a, c_b)`` depends only on the offset b - a mod N, so this one row
    determines every pairwise distance.
    """
    n = book.n
    d = np.asarray(book.geometry.positions, dtype=np.int64)
    # (alpha_a^* alpha_b)^d = exp(j 2 pi s d / N) with s = b - a
    k = np.mod(np.multiply.outer(np.arange(n, dtype=np.int64), d), n)
    sums = _unit_phasor(k, n).sum(axis=1)
    return _clamp(1.0 - np.abs(sums) ** 2 / book.m**2)


def min_distance(book: Codebook) -> DistanceReport:
    """Minimum pairwise distance via the single-offset scan (O(N*M))."""
    if book.n < 2:
        raise ValueError("need at least two codewords")
    dist = offset_distances(book)
    best = float(dist[1:].min())
    # every offset is realized by the pair (1, 1 + s); take the smallest s within rounding
    s = 1 + int(np.flatnonzero(dist[1:] <= best + TIE_TOL)[0])
    return _report(book, best, (1, 1 + s), book.n - 1)


def min_distance_pairwise(book: Codebook) -> DistanceReport:
    """Exhaustive O(N^2 M) scan over all distinct pairs; cross-check for min_distance."""
    n = book.n
    if n < 2:
        raise ValueError("need at least two codewords")
    gram = np.abs(book.words.conj() @ book.words.T) ** 2
    dist = _clamp(1.0 - gram)
    iu = np.triu_indices(n, k=1)
    vals = dist[iu]
    best = float(vals.min())
    j = int(np.flatnonzero(vals <= best + TIE_TOL)[0])
    return _report(book, best, (int(iu[0][j]) + 1, int(iu[1][j]) + 1), len(vals))
