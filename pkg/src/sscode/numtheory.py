"""Finite-field and modular arithmetic used to build Bose-Chowla arrays.

Elements of GF(q^2) are held as ``c1*x + c0`` modulo a monic irreducible
quadratic ``x^2 + b*x + c`` over GF(q), q prime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union


class GeometryError(ValueError):
    """Raised when an array geometry violates one of its invariants."""


class ConstructionError(RuntimeError):
    """Internal failure while building a field or difference set."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` in ascending order."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class FieldElement:
    coeff0: int
    coeff1: int

    def is_zero(self) -> bool:
        return self.coeff0 == 0 and self.coeff1 == 0


@dataclass(frozen=True)
class QuadraticField:
    """GF(q^2) = GF(q)[x] / (x^2 + b x + c)."""

    q: int
    b: int
    c: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"q={self.q} is not prime")

    @classmethod
    def for_prime(cls, q: int) -> "QuadraticField":
        b, c = find_irreducible_quadratic(q)
        return cls(q, b, c)

    @property
    def order(self) -> int:
        return self.q * self.q

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, 0)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, 0)

    def element(self, coeff0: int, coeff1: int = 0) -> FieldElement:
        return FieldElement(coeff0 % self.q, coeff1 % self.q)

    def elements(self) -> Iterable[FieldElement]:
        for c1 in range(self.q):
            for c0 in range(self.q):
                yield FieldElement(c0, c1)

    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        q = self.q
        return FieldElement((a.coeff0 + b.coeff0) % q, (a.coeff1 + b.coeff1) % q)

    def neg(self, a: FieldElement) -> FieldElement:
        return FieldElement(-a.coeff0 % self.q, -a.coeff1 % self.q)

    def sub(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self.add(a, self.neg(b))

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        q = self.q
        lo = a.coeff0 * b.coeff0
        mid = a.coeff0 * b.coeff1 + a.coeff1 * b.coeff0
        hi = a.coeff1 * b.coeff1
        # x^2 = -b x - c
        return FieldElement((lo - hi * self.c) % q, (mid - hi * self.b) % q)

    def pow(self, a: FieldElement, e: int) -> FieldElement:
        if e < 0:
            return self.pow(self.inverse(a), -e)
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inverse(self, a: FieldElement) -> FieldElement:
        if a.is_zero():
            raise ZeroDivisionError("zero has no inverse in GF(q^2)")
        return self.pow(a, self.order - 2)

    def multiplicative_order(self, a: FieldElement) -> int:
        """Exact order by trimming prime factors off q^2 - 1."""
        if a.is_zero():
            raise ZeroDivisionError("zero has no multiplicative order")
        n = self.order - 1
        order = n
        for p in prime_factors(n):
            while order % p == 0 and self.pow(a, order // p) == self.one:
                order //= p
        return order


def gf_mul(a: FieldElement, b: FieldElement, ctx: QuadraticField) -> FieldElement:
    return ctx.mul(a, b)


def gf_add(a: FieldElement, b: FieldElement, ctx: QuadraticField) -> FieldElement:
    return ctx.add(a, b)


def gf_inverse(a: FieldElement, ctx: QuadraticField) -> FieldElement:
    return ctx.inverse(a)


def _has_root(q: int, b: int, c: int) -> bool:
    return any((x * x + b * x + c) % q == 0 for x in range(q))


def find_irreducible_quadratic(q: int) -> tuple[int, int]:
    """Deterministic monic irreducible ``x^2 + b x + c`` over GF(q).

    Prefers ``x^2 - n`` with n the smallest quadratic non-residue, then
    falls back to the lexicographically smallest (b, c).
    """
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")
    for n in range(1, q):
        if not _has_root(q, 0, -n % q):
            return 0, -n % q
    for b in range(q):
        for c in range(q):
            if not _has_root(q, b, c):
                return b, c
    raise ConstructionError(f"no irreducible quadratic over GF({q})")


def find_primitive_element(ctx: QuadraticField) -> FieldElement:
    """Smallest element, in (coeff1, coeff0) order, of order q^2 - 1."""
    n = ctx.order - 1
    exps = [n // p for p in prime_factors(n)]
    for a in ctx.elements():
        if a.is_zero():
            continue
        if ctx.pow(a, n) != ctx.one:
            continue
        if all(ctx.pow(a, e) != ctx.one for e in exps):
            return a
    raise ConstructionError(
        f"no primitive element in GF({ctx.q}^2); x^2+{ctx.b}x+{ctx.c} is not irreducible"
    )


@dataclass(frozen=True)
class ArrayGeometry:
    """Antenna positions ``d_1 < ... < d_M`` on the cyclic grid Z_N."""

    positions: tuple[int, ...]
    modulus: int

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(int(p) for p in self.positions))

    @property
    def m(self) -> int:
        return len(self.positions)

    @property
    def n(self) -> int:
        return self.modulus

    def shifted(self, s: int) -> "ArrayGeometry":
        """All positions moved by ``s`` mod N (kept sorted)."""
        return ArrayGeometry(tuple(sorted((p + s) % self.modulus for p in self.positions)), self.modulus)


def verify_sidon(
    geom: Union[ArrayGeometry, Sequence[int]], modulus: Optional[int] = None
) -> bool:
    """True iff every ordered difference ``d_a - d_b`` (a != b) is distinct mod N."""
    if isinstance(geom, ArrayGeometry):
        positions, modulus = geom.positions, geom.modulus
    else:
        positions = list(geom)
        if modulus is None:
            raise TypeError("modulus is required for a bare position list")
    seen = set()
    for i, a in enumerate(positions):
        for j, b in enumerate(positions):
            if i == j:
                continue
            diff = (a - b) % modulus
            if diff in seen or diff == 0:
                return False
            seen.add(diff)
    return True


def check_geometry(geom: ArrayGeometry) -> ArrayGeometry:
    """Validate a Bose-Chowla style geometry; raise GeometryError naming the failure."""
    m, n = geom.m, geom.modulus
    if m < 2:
        raise GeometryError(f"antenna count M={m} must be at least 2")
    if n != m * m - 1:
        raise GeometryError(f"modulus invariant N = M^2 - 1 violated: M={m}, N={n}")
    if len(set(geom.positions)) != m:
        raise GeometryError("positions must be distinct")
    bad = [p for p in geom.positions if not 0 <= p < n]
    if bad:
        raise GeometryError(f"positions out of range [0, N): {bad}")
    if 0 in geom.positions:
        raise GeometryError("position 0 is not allowed (gcd(0, N) is degenerate)")
    if list(geom.positions) != sorted(geom.positions):
        raise GeometryError("positions must be sorted ascending")
    if not verify_sidon(geom):
        raise GeometryError("Sidon invariant violated: pairwise differences mod N collide")
    return geom


@lru_cache(maxsize=None)
def bose_chowla_set(m: int) -> ArrayGeometry:
    """Bose-Chowla Sidon set of size m in Z_{m^2 - 1}, m prime.

    Positions are the discrete logs (base a primitive element t) of the q
    field elements ``t + c``, c in GF(q). Exponent 0 cannot occur since
    t is not in the prime subfield.
    """
    if not is_prime(m):
        raise GeometryError(f"m={m} must be prime")
    ctx = QuadraticField.for_prime(m)
    theta = find_primitive_element(ctx)
    n = ctx.order - 1
    targets = {ctx.add(theta, ctx.element(c)) for c in range(m)}
    positions = []
    power = ctx.one
    for a in range(1, n + 1):
        power = ctx.mul(power, theta)
        if power in targets:
            positions.append(a % n)
    if len(positions) != m:
        raise ConstructionError(f"expected {m} logs, found {len(positions)}")
    geom = ArrayGeometry(tuple(sorted(positions)), n)
    try:
        return check_geometry(geom)
    except GeometryError as exc:
        raise ConstructionError(f"Bose-Chowla output failed validation: {exc}") from exc


def mod_inverse(a: int, n: int) -> Optional[int]:
    """Inverse of ``a`` mod ``n``, or None when gcd(a, n) != 1."""
    if n < 1:
        raise ValueError("modulus must be >= 1")
    if n == 1:
        return 0
    try:
        return pow(a, -1, n)
    except ValueError:
        return None


def gcd_table(geom: ArrayGeometry) -> list[int]:
    return [math.gcd(d, geom.modulus) for d in geom.positions]


def load_geometry(path: Union[str, Path]) -> ArrayGeometry:
    """Read a geometry file: ``M N`` on line 1, M positions on line 2."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if len(lines) < 2:
        raise GeometryError("geometry file needs a header line 'M N' and a positions line")
    try:
        m, n = (int(v) for v in lines[0].split())
        positions = [int(v) for v in lines[1].split()]
    except ValueError as exc:
        raise GeometryError(f"malformed geometry file: {exc}") from exc
    if len(positions) != m:
        raise GeometryError(f"header says M={m} but {len(positions)} positions given")
    return check_geometry(ArrayGeometry(tuple(sorted(positions)), n))


def save_geometry(geom: ArrayGeometry, path: Union[str, Path]) -> None:
    Path(path).write_text(f"{geom.m} {geom.modulus}\n{' '.join(map(str, geom.positions))}\n")
