"""DoA decoders for the Bose-Chowla sensing code.

Every decoder maps a received vector to a 1-based grid index. Ties (argmax,
mode, top-g ranking) always resolve toward the smallest grid index.

The geometric family works per antenna. For grid index n the noiseless
phase at antenna m is ``pi * d_m * (-1 + 2(n-1)/N)``; multiplying by the
known sign ``(-1)^{d_m}`` leaves ``2*pi * d_m * (n-1) / N``, so after
quantization each antenna constrains ``n - 1`` through the congruence
``(n-1) * d_m / r_m = t_m (mod N / r_m)`` with ``r_m = gcd(d_m, N)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from .channel import ReceivedSignal
from .codebook import Codebook
from .numtheory import ArrayGeometry, mod_inverse

KINDS = ("map", "window", "geometric", "modified-geometric", "geo-reduced-map")
GEOMETRIC_KINDS = ("geometric", "modified-geometric", "geo-reduced-map")


class EmptyVoteError(ValueError):
    """Every antenna abstained, so the geometric vote is undefined."""


@dataclass(frozen=True)
class DecoderConfig:
    kind: str = "map"
    z: int = 2
    k: int = 9
    g: Optional[int] = None
    antenna_subset: Optional[tuple[int, ...]] = None
    enumeration: str = "closed-form"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown decoder kind {self.kind!r}; expected one of {KINDS}")
        if self.z < 1:
            raise ValueError("window size z must be >= 1")
        if self.k < 0:
            raise ValueError("neighbourhood half-width k must be >= 0")
        if self.g is not None and self.g < 1:
            raise ValueError("shortlist size g must be >= 1")
        if self.antenna_subset is not None:
            subset = tuple(int(a) for a in self.antenna_subset)
            if not subset:
                raise ValueError("antenna_subset must be nonempty when given")
            object.__setattr__(self, "antenna_subset", subset)
        if self.enumeration not in ("closed-form", "scan"):
            raise ValueError("enumeration must be 'closed-form' or 'scan'")

    @property
    def label(self) -> str:
        if self.kind == "window":
            return f"window:z={self.z}"
        if self.kind == "modified-geometric":
            return f"modgeo:k={self.k}"
        if self.kind == "geo-reduced-map":
            g = "N/2" if self.g is None else self.g
            return f"grmap:k={self.k}:g={g}"
        return self.kind

    def shortlist_size(self, n: int) -> int:
        return n // 2 if self.g is None else min(self.g, n)


@dataclass
class DecodeOutcome:
    estimated_index: int
    candidate_count_examined: int
    auxiliary: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "estimated_index": self.estimated_index,
            "candidate_count_examined": self.candidate_count_examined,
            "auxiliary": self.auxiliary,
        }


def _vector(y: Union[ReceivedSignal, np.ndarray]) -> np.ndarray:
    return np.asarray(y.y if isinstance(y, ReceivedSignal) else y, dtype=complex)


def _check_len(y: np.ndarray, m: int) -> None:
    if y.shape != (m,):
        raise ValueError(f"dimension mismatch: received length {y.shape}, array has {m} antennas")


def _first_argmax(values: np.ndarray) -> int:
    # np.argmax returns the first maximal position
    return int(np.argmax(values))


def decode_map(y, book: Codebook) -> DecodeOutcome:
    """Exhaustive correlation decoder: argmax_n |y^H c_n|."""
    v = _vector(y)
    _check_len(v, book.m)
    corr = book.correlations(v)
    return DecodeOutcome(_first_argmax(corr) + 1, book.n)


def decode_window(y, book: Codebook, z: int) -> DecodeOutcome:
    """Two-stage search: best window of z summed codewords, then best word inside it."""
    if z < 1:
        raise ValueError("window size z must be >= 1")
    v = _vector(y)
    _check_len(v, book.m)
    summed = book.window_words(z)
    window = _first_argmax(np.abs(summed @ np.conj(v)))
    lo = window * z
    hi = min(lo + z, book.n)
    inner = np.abs(book.words[lo:hi] @ np.conj(v))
    best = lo + _first_argmax(inner)
    return DecodeOutcome(best + 1, len(summed) + (hi - lo), {"window": window + 1})


def quantize_phase(value: complex, circle_size: int) -> int:
    """Nearest point of the ``circle_size``-th roots of unity, as an index."""
    if circle_size < 1:
        raise ValueError("circle_size must be >= 1")
    if value == 0:
        raise ValueError("phase of zero is undefined")
    arg = math.atan2(value.imag, value.real) % (2 * math.pi)
    return math.floor(arg * circle_size / (2 * math.pi) + 0.5) % circle_size


def fast_candidate_enumeration(t: int, d: int, n: int) -> list[int]:
    """All x in [0, N) with ``x * (d/r) = t (mod N/r)``, r = gcd(d, N), in O(r)."""
    r = math.gcd(d, n)
    c = n // r
    inv = mod_inverse((d // r) % c, c)
    x0 = (t * inv) % c
    return [x0 + j * c for j in range(r)]


def scan_candidates(t: int, d: int, n: int) -> list[int]:
    """Literal O(N) scan: positions of t in ``(0..N-1) * d/r mod N/r``."""
    r = math.gcd(d, n)
    table = (np.arange(n) * (d // r)) % (n // r)
    return [int(x) for x in np.flatnonzero(table == t)]


@dataclass(frozen=True)
class AntennaTables:
    """Per-antenna constants reused by every geometric decode."""

    positions: np.ndarray
    gcds: np.ndarray
    circles: np.ndarray
    inverses: np.ndarray
    signs: np.ndarray
    scan_tables: tuple

    @property
    def m(self) -> int:
        return len(self.positions)


@lru_cache(maxsize=64)
def antenna_tables(geom: ArrayGeometry) -> AntennaTables:
    n = geom.modulus
    d = np.asarray(geom.positions, dtype=np.int64)
    r = np.gcd(d, n)
    c = n // r
    inv = np.array([mod_inverse(int(di // ri) % int(ci), int(ci)) for di, ri, ci in zip(d, r, c)])
    signs = np.where(d % 2 == 0, 1.0, -1.0)
    scans = tuple((np.arange(n, dtype=np.int64) * (di // ri)) % ci for di, ri, ci in zip(d, r, c))
    for arr in (d, r, c, inv, signs):
        arr.setflags(write=False)
    return AntennaTables(d, r, c, inv.astype(np.int64), signs, scans)


def select_antennas(geom: ArrayGeometry, count: int) -> tuple[int, ...]:
    """The ``count`` antennas with the smallest gcd(d_m, N), as 1-based indices."""
    if not 1 <= count <= geom.m:
        raise ValueError(f"subset size must lie in [1, {geom.m}]")
    r = antenna_tables(geom).gcds
    order = np.argsort(r, kind="stable")[:count]
    return tuple(sorted(int(i) + 1 for i in order))


def _votes(
    v: np.ndarray,
    geom: ArrayGeometry,
    k: int,
    antenna_subset: Optional[Sequence[int]],
    enumeration: str = "closed-form",
) -> tuple[np.ndarray, int]:
    """Vote counts over 0-based grid indices and the number of votes cast."""
    tab = antenna_tables(geom)
    _check_len(v, tab.m)
    n = geom.modulus
    antennas = range(tab.m) if antenna_subset is None else [a - 1 for a in antenna_subset]
    chunks = []
    for a in antennas:
        val = v[a] * tab.signs[a]
        if val == 0:
            continue
        c = int(tab.circles[a])
        t = quantize_phase(val, c)
        if 2 * k + 1 >= c:
            residues = np.arange(c)
        else:
            residues = np.arange(t - k, t + k + 1) % c
        if enumeration == "scan":
            table = tab.scan_tables[a]
            chunks.extend(np.flatnonzero(table == i) for i in residues)
        else:
            base = (residues * tab.inverses[a]) % c
            chunks.append((base[:, None] + c * np.arange(tab.gcds[a])).ravel())
    if not chunks:
        raise EmptyVoteError("every antenna abstained from voting")
    ballots = np.concatenate(chunks)
    return np.bincount(ballots, minlength=n), len(ballots)


def decode_geometric(y, geom: ArrayGeometry, antenna_subset=None, enumeration="closed-form") -> DecodeOutcome:
    """Per-antenna quantize-and-invert, then majority vote."""
    return decode_modified_geometric(y, geom, 0, antenna_subset, enumeration)


def decode_modified_geometric(
    y, geom: ArrayGeometry, k: int, antenna_subset=None, enumeration="closed-form"
) -> DecodeOutcome:
    """Geometric vote where each antenna also backs the k quantization points either side."""
    if k < 0:
        raise ValueError("k must be >= 0")
    counts, cast = _votes(_vector(y), geom, k, antenna_subset, enumeration)
    best = _first_argmax(counts)
    return DecodeOutcome(
        best + 1, cast, {"votes_cast": cast, "distinct_voted": int(np.count_nonzero(counts)), "top_votes": int(counts[best])}
    )


def top_g(counts: np.ndarray, g: int) -> np.ndarray:
    """0-based indices of the g highest counts; ties and unvoted filler by index."""
    order = np.argsort(-counts, kind="stable")
    return order[:g]


def decode_geo_reduced_map(
    y, geom: ArrayGeometry, book: Codebook, k: int, g: int, antenna_subset=None, enumeration="closed-form"
) -> DecodeOutcome:
    """Vote as in the modified geometric decoder, then correlate against the top-g shortlist."""
    n = geom.modulus
    if not 1 <= g <= n:
        raise ValueError(f"g must lie in [1, {n}]")
    if k < 0:
        raise ValueError("k must be >= 0")
    v = _vector(y)
    counts, cast = _votes(v, geom, k, antenna_subset, enumeration)
    shortlist = np.sort(top_g(counts, g))
    corr = np.abs(book.words[shortlist] @ np.conj(v))
    best = int(shortlist[_first_argmax(corr)])
    return DecodeOutcome(best + 1, len(shortlist), {"votes_cast": cast, "shortlist_size": len(shortlist)})


def decode(y, cfg: DecoderConfig, book: Codebook) -> DecodeOutcome:
    geom = book.geometry
    if cfg.kind == "map":
        return decode_map(y, book)
    if cfg.kind == "window":
        return decode_window(y, book, cfg.z)
    if cfg.kind == "geometric":
        return decode_geometric(y, geom, cfg.antenna_subset, cfg.enumeration)
    if cfg.kind == "modified-geometric":
        return decode_modified_geometric(y, geom, cfg.k, cfg.antenna_subset, cfg.enumeration)
    return decode_geo_reduced_map(y, geom, book, cfg.k, cfg.shortlist_size(geom.modulus), cfg.antenna_subset, cfg.enumeration)
