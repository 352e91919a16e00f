"""Exact integer and modular arithmetic primitives.

Residues are always the representatives {0, ..., r-1}. Negative inputs are
rejected instead of being normalized, so a caller bug surfaces immediately.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence, Union

import numpy as np
from sympy import divisors, factorint

from .errors import (
    AccumulatorOverflowError,
    DimensionError,
    DomainError,
    InvalidPartitionError,
    InvalidRadixError,
    NegativeEntryError,
)

ENTRY_LIMIT = 1 << 62
DIM_LIMIT = 1 << 32

IntOrVec = Union[int, Sequence[int]]


def _check_radix(r: int) -> None:
    if r < 1:
        raise InvalidRadixError(f"radix must be >= 1, got {r}")


def vmod(v: IntOrVec, r: int):
    """``v`` modulo ``r`` (componentwise for sequences)."""
    _check_radix(r)
    if isinstance(v, (int, np.integer)):
        if v < 0:
            raise NegativeEntryError(f"negative entry {v}")
        return int(v) % r
    out = []
    for x in v:
        if x < 0:
            raise NegativeEntryError(f"negative entry {x}")
        out.append(int(x) % r)
    return tuple(out)


def vdiv(v: IntOrVec, r: int):
    """``(v - vmod(v, r)) / r``, so that ``v == r * vdiv(v, r) + vmod(v, r)``."""
    _check_radix(r)
    if isinstance(v, (int, np.integer)):
        if v < 0:
            raise NegativeEntryError(f"negative entry {v}")
        return int(v) // r
    out = []
    for x in v:
        if x < 0:
            raise NegativeEntryError(f"negative entry {x}")
        out.append(int(x) // r)
    return tuple(out)


def inner_product(u: Sequence[int], v: Sequence[int]) -> int:
    """Exact inner product over Z.

    Entries must be below 2**62 in absolute value and the dimension below
    2**32; outside that contract an overflow error is raised rather than
    producing a value a fixed-width accumulator could not hold.
    """
    if len(u) != len(v):
        raise DimensionError(f"length mismatch: {len(u)} vs {len(v)}")
    if len(u) >= DIM_LIMIT:
        raise AccumulatorOverflowError("dimension exceeds accumulator contract")
    total = 0
    for a, b in zip(u, v):
        a, b = int(a), int(b)
        if abs(a) >= ENTRY_LIMIT or abs(b) >= ENTRY_LIMIT:
            raise AccumulatorOverflowError("entry exceeds accumulator contract")
        total += a * b
    return total


def gram(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """All pairwise inner products ``G[i, j] = <U[i], V[j]>`` computed exactly.

    Uses int64 when the worst case fits, otherwise falls back to Python ints.
    """
    U = np.asarray(U)
    V = np.asarray(V)
    if U.shape[1:] != V.shape[1:]:
        raise DimensionError(f"dimension mismatch: {U.shape} vs {V.shape}")
    n = U.shape[1] if U.ndim == 2 else 0
    if U.size == 0 or V.size == 0:
        return np.zeros((U.shape[0], V.shape[0]), dtype=np.int64)
    bound = int(np.abs(U).max()) * int(np.abs(V).max()) * max(n, 1)
    if bound < (1 << 62):
        return U.astype(np.int64) @ V.astype(np.int64).T
    return np.asarray(U, dtype=object) @ np.asarray(V, dtype=object).T


@dataclass(frozen=True)
class Partition:
    r1: int
    r2: int
    r3: int

    @property
    def m(self) -> int:
        return self.r1 * self.r2 * self.r3

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r1, self.r2, self.r3)

    def __str__(self) -> str:
        return f"({self.r1},{self.r2},{self.r3})"


def validate_partition(r1: int, r2: int, r3: int, m: int) -> Partition:
    if min(r1, r2, r3, m) < 1:
        raise InvalidPartitionError(f"components must be positive: {(r1, r2, r3, m)}")
    if r1 * r2 * r3 != m:
        raise InvalidPartitionError(f"{r1}*{r2}*{r3} = {r1 * r2 * r3} != {m}")
    return Partition(r1, r2, r3)


def all_partitions(m: int) -> list[Partition]:
    """Every ordered triple (r1, r2, r3) of positive integers with product m."""
    out = []
    for r1 in divisors(m):
        for r2 in divisors(m // r1):
            out.append(Partition(r1, r2, m // (r1 * r2)))
    return out


def character_order(j: int, r3: int) -> int:
    """Order of the character x -> exp(2*pi*i*j*x/r3), i.e. r3 / gcd(j, r3)."""
    if not 1 <= j <= r3 - 1:
        raise DomainError(f"j={j} outside [1, {r3 - 1}]")
    return r3 // gcd(j, r3)


def is_squarefree(m: int) -> bool:
    return m >= 1 and all(e == 1 for e in factorint(m).values())
