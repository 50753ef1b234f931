"""Bose-Chowla sensing codebook and its DoA grid.

Grid index n runs over 1..N (1-based at every public boundary). The n-th
grid point has ``sin(theta_n) = -1 + 2(n-1)/N`` and phase base
``alpha_n = exp(j*pi*sin(theta_n))``. Codeword entries are computed from
integer exponents so that large ``d_m`` never accumulate phase error.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .numtheory import ArrayGeometry


def grid_angles(n_points: int) -> np.ndarray:
    if n_points < 1:
        raise ValueError("grid needs at least one point")
    return np.arcsin(grid_sines(n_points))


def grid_sines(n_points: int) -> np.ndarray:
    return -1.0 + 2.0 * np.arange(n_points) / n_points


def _phase_numerators(positions, n_points: int, index0) -> np.ndarray:
    """Integer k with ``alpha^d = exp(j*2*pi*k / (2N))``.

    ``pi * d * (-1 + 2 i/N) = 2*pi * d*(2i - N) / (2N)``, exact mod 2N.
    """
    d = np.asarray(positions, dtype=np.int64)
    i = np.asarray(index0, dtype=np.int64)
    return np.mod(np.multiply.outer(2 * i - n_points, d), 2 * n_points)


def _unit_phasor(k: np.ndarray, denom: int) -> np.ndarray:
    return np.exp(2j * np.pi * k / denom)


def alpha_of_index(n: int, n_points: int) -> complex:
    if not 1 <= n <= n_points:
        raise ValueError(f"grid index {n} outside [1, {n_points}]")
    return complex(_unit_phasor(np.mod(2 * (n - 1) - n_points, 2 * n_points), 2 * n_points))


def manifold(geom: ArrayGeometry, n: int) -> np.ndarray:
    """Unnormalized array response ``h_m = alpha_n ** d_m`` (|h_m| = 1)."""
    if not 1 <= n <= geom.modulus:
        raise ValueError(f"grid index {n} outside [1, {geom.modulus}]")
    k = _phase_numerators(geom.positions, geom.modulus, n - 1)
    return _unit_phasor(k, 2 * geom.modulus)


@dataclass(frozen=True, eq=False)
class Codebook:
    """N unit-norm codewords, stored as rows of ``words`` (shape N x M)."""

    geometry: ArrayGeometry
    words: np.ndarray
    grid: np.ndarray
    _window_cache: dict = field(default_factory=dict, repr=False)

    @property
    def m(self) -> int:
        return self.geometry.m

    @property
    def n(self) -> int:
        return self.geometry.modulus

    def word(self, n: int) -> np.ndarray:
        """Codeword for 1-based grid index ``n``."""
        return self.words[n - 1]

    def correlations(self, y: np.ndarray) -> np.ndarray:
        """``|y^H c_n|`` for every codeword, 0-based array."""
        return np.abs(self.words @ np.conj(y))

    def window_words(self, z: int) -> np.ndarray:
        """Unnormalized sums of each run of ``z`` consecutive codewords.

        The last window is shorter when z does not divide N.
        """
        cached = self._window_cache.get(z)
        if cached is None:
            starts = np.arange(0, self.n, z)
            cached = np.add.reduceat(self.words, starts, axis=0)
            cached.setflags(write=False)
            self._window_cache[z] = cached
        return cached


def build_codebook(geom: ArrayGeometry) -> Codebook:
    n_points = geom.modulus
    k = _phase_numerators(geom.positions, n_points, np.arange(n_points))
    words = _unit_phasor(k, 2 * n_points) / math.sqrt(geom.m)
    words.setflags(write=False)
    grid = grid_angles(n_points)
    grid.setflags(write=False)
    return Codebook(geom, words, grid)


def export_codebook_csv(book: Codebook, path: Union[str, Path]) -> None:
    """Debug dump: n, sin_theta, then re/im per antenna."""
    sines = grid_sines(book.n)
    header = ["n", "sin_theta"]
    for m in range(1, book.m + 1):
        header += [f"re{m}", f"im{m}"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(book.n):
            row = [i + 1, repr(float(sines[i]))]
            for v in book.words[i]:
                row += [repr(float(v.real)), repr(float(v.imag))]
            w.writerow(row)
