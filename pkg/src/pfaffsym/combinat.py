"""Integer partitions, Frobenius coordinates and the four-parameter weight."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .ring import Poly


class PartitionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        for p in parts:
            if p < 1:
                raise PartitionError("parts must be positive integers")
        for p, q in zip(parts, parts[1:]):
            if p < q:
                raise PartitionError("parts must be weakly decreasing")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse comma-separated parts; the empty string is the empty partition."""
        text = "".join(text.split())
        if not text:
            return cls(())
        try:
            parts = tuple(int(p) for p in text.split(","))
        except ValueError:
            raise PartitionError(f"cannot parse partition {text!r}") from None
        return cls(parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def padded(self, m: int) -> tuple[int, ...]:
        if len(self.parts) > m:
            raise PartitionError(f"length {len(self.parts)} exceeds {m}")
        return self.parts + (0,) * (m - len(self.parts))

    def conjugate(self) -> "Partition":
        return conjugate(self)

    def is_even(self) -> bool:
        return all(p % 2 == 0 for p in self.parts)

    def __str__(self):
        return ",".join(map(str, self.parts))

    def __repr__(self):
        return f"Partition({self.parts})"


@dataclass(frozen=True)
class FrobeniusCoords:
    arms: tuple[int, ...]
    legs: tuple[int, ...]


def _partitions_of(n: int, max_part: int, max_len: int):
    if n == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions_of(n - first, first, max_len - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def partitions_of(n: int, max_length: int | None = None) -> tuple[Partition, ...]:
    """Partitions of ``n`` in reverse lexicographic order."""
    if max_length is None:
        max_length = n
    return tuple(Partition(p) for p in _partitions_of(n, n, max_length))


def enumerate_partitions(max_size: int, max_length: int) -> list[Partition]:
    """All partitions with size <= max_size and length <= max_length.

    Ordered by size, then reverse lexicographically within a size.
    """
    if max_size < 0 or max_length < 0:
        raise ValueError("max_size and max_length must be nonnegative")
    out: list[Partition] = []
    for n in range(max_size + 1):
        out.extend(partitions_of(n, max_length))
    return out


def conjugate(lam: Partition) -> Partition:
    parts = lam.parts
    if not parts:
        return Partition(())
    return Partition(tuple(sum(1 for p in parts if p > j) for j in range(parts[0])))


def omega_exponents(lam: Partition) -> tuple[int, int, int, int]:
    """Exponents of a, b, c, d in the weight of ``lam``."""
    ea = eb = ec = ed = 0
    for i, p in enumerate(lam.parts):
        hi, lo = (p + 1) // 2, p // 2
        if i % 2 == 0:
            ea += hi
            eb += lo
        else:
            ec += hi
            ed += lo
    return ea, eb, ec, ed


def omega_weight(lam: Partition) -> Poly:
    """Fill odd rows with a,b,a,b,... and even rows with c,d,c,d,...; multiply."""
    ea, eb, ec, ed = omega_exponents(lam)
    return Poly.monomial({"a": ea, "b": eb, "c": ec, "d": ed})


def frobenius(lam: Partition) -> FrobeniusCoords:
    conj = conjugate(lam)
    d = sum(1 for i, p in enumerate(lam.parts) if p > i)
    arms = tuple(lam.parts[i] - (i + 1) for i in range(d))
    legs = tuple(conj.parts[i] - (i + 1) for i in range(d))
    return FrobeniusCoords(arms, legs)


def from_frobenius(coords: FrobeniusCoords) -> Partition:
    arms, legs = tuple(coords.arms), tuple(coords.legs)
    if len(arms) != len(legs):
        raise PartitionError("arms and legs must have the same length")
    for seq in (arms, legs):
        if any(v < 0 for v in seq):
            raise PartitionError("Frobenius coordinates must be nonnegative")
        if any(u <= v for u, v in zip(seq, seq[1:])):
            raise PartitionError("Frobenius coordinates must be strictly decreasing")
    d = len(arms)
    if d == 0:
        return Partition(())
    nrows = legs[0] + 1
    rows = []
    for i in range(nrows):
        if i < d:
            rows.append(arms[i] + i + 1)
        else:
            # cells left of the diagonal: columns j < d whose leg reaches row i
            rows.append(sum(1 for j in range(d) if legs[j] + j >= i))
    return Partition(tuple(r for r in rows if r > 0))


def enumerate_Pn(n: int) -> list[Partition]:
    """Partitions (alpha | alpha+1) with length at most n.

    The arms range over subsets of {0, ..., n-2}; |result| = 2^(n-1) for n >= 1.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    pool = list(range(max(n - 1, 0)))
    out = []
    for r in range(len(pool) + 1):
        for sub in combinations(pool, r):
            arms = tuple(sorted(sub, reverse=True))
            out.append(from_frobenius(FrobeniusCoords(arms, tuple(a + 1 for a in arms))))
    out.sort(key=lambda p: (p.size, tuple(-x for x in p.parts)))
    return out


def staircase_shift(lam: Partition, m: int) -> tuple[int, ...]:
    """The strictly decreasing sequence lam + (m-1, ..., 1, 0)."""
    padded = lam.padded(m)
    return tuple(p + m - 1 - i for i, p in enumerate(padded))


def factorial_z(mu: Partition) -> int:
    """The centralizer order z_mu = prod_i i^{m_i} m_i!."""
    from collections import Counter
    from math import factorial

    z = 1
    for part, mult in Counter(mu.parts).items():
        z *= part ** mult * factorial(mult)
    return z
