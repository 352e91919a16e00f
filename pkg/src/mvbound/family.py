"""Matching-vector families: the data type, its predicates and generators."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DimensionError, DomainError, FormatError, InvalidPartitionError, SelectionError
from .modular import Partition, gram


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


class MVFamily:
    """Paired ordered lists ``U``, ``V`` of vectors in Z_m^n.

    ``U`` and ``V`` are read-only ``(t, n)`` int64 arrays. Construction checks
    shape and range only; use :func:`verify_mv` for the matching property.
    """

    __slots__ = ("m", "n", "U", "V")

    def __init__(self, m: int, n: int, U, V):
        if m < 2:
            raise DomainError(f"modulus must be >= 2, got {m}")
        if n < 1:
            raise DomainError(f"dimension must be >= 1, got {n}")
        U = np.asarray(U, dtype=np.int64).reshape(-1, n) if len(U) else np.zeros((0, n), np.int64)
        V = np.asarray(V, dtype=np.int64).reshape(-1, n) if len(V) else np.zeros((0, n), np.int64)
        if U.shape != V.shape:
            raise DimensionError(f"|U|={U.shape[0]} but |V|={V.shape[0]}")
        for name, arr in (("U", U), ("V", V)):
            if arr.size and (arr.min() < 0 or arr.max() >= m):
                raise DomainError(f"{name} has entries outside [0, {m - 1}]")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "U", _frozen(U))
        object.__setattr__(self, "V", _frozen(V))

    def __setattr__(self, key, value):
        raise AttributeError("MVFamily is immutable")

    @classmethod
    def from_pairs(cls, m: int, pairs: Iterable[tuple[Sequence[int], Sequence[int]]], n: Optional[int] = None):
        pairs = list(pairs)
        if n is None:
            if not pairs:
                raise DimensionError("cannot infer n from an empty pair list")
            n = len(pairs[0][0])
        for u, v in pairs:
            if len(u) != n or len(v) != n:
                raise DimensionError(f"vector length differs from n={n}")
        return cls(m, n, [p[0] for p in pairs], [p[1] for p in pairs])

    @property
    def t(self) -> int:
        return self.U.shape[0]

    def __len__(self) -> int:
        return self.t

    def pairs(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        return [(tuple(int(x) for x in u), tuple(int(x) for x in v)) for u, v in zip(self.U, self.V)]

    def gram(self) -> np.ndarray:
        return gram(self.U, self.V)

    def __eq__(self, other):
        if not isinstance(other, MVFamily):
            return NotImplemented
        return (self.m, self.n) == (other.m, other.n) and np.array_equal(self.U, other.U) and np.array_equal(self.V, other.V)

    def __hash__(self):
        return hash((self.m, self.n, self.U.tobytes(), self.V.tobytes()))

    def __repr__(self):
        return f"MVFamily(m={self.m}, n={self.n}, t={self.t})"


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    pair: Optional[tuple[int, int]] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def verify_mv(F: MVFamily) -> VerifyReport:
    """Check the matching-vector property; report the first violation in row-major (i, j) order."""
    if F.t <= 1:
        if F.t == 1 and int(F.gram()[0, 0]) % F.m != 0:
            return VerifyReport(False, (0, 0), "diagonal inner product nonzero")
        return VerifyReport(True)
    zero = (F.gram() % F.m) == 0
    bad = zero.copy()
    np.fill_diagonal(bad, ~np.diagonal(zero))
    hits = np.argwhere(bad)
    if len(hits) == 0:
        return VerifyReport(True)
    i, j = (int(x) for x in hits[0])
    reason = "diagonal inner product nonzero" if i == j else "off-diagonal inner product is zero"
    return VerifyReport(False, (i, j), reason)


@dataclass(frozen=True)
class RespectWitness:
    u0: tuple[int, ...]
    v0: tuple[int, ...]
    cU: int
    cV: int


def _check_partition(F: MVFamily, P: Partition) -> None:
    if P.m != F.m:
        raise InvalidPartitionError(f"partition {P} has product {P.m}, family modulus is {F.m}")


def respects(F: MVFamily, P: Partition) -> Optional[RespectWitness]:
    """The witness (u0, v0, cU, cV) if ``F`` respects ``P``, else ``None``."""
    _check_partition(F, P)
    r1, r2 = P.r1, P.r2
    if F.t == 0:
        z = (0,) * F.n
        return RespectWitness(z, z, 0, 0)
    umod = F.U % r1
    vmod = F.V % r2
    if not (umod == umod[0]).all() or not (vmod == vmod[0]).all():
        return None
    u0, v0 = umod[0], vmod[0]
    cu = gram(F.U // r1, v0[None, :])[:, 0] % r2
    cv = gram(F.V // r2, u0[None, :])[:, 0] % r1
    if not (cu == cu[0]).all() or not (cv == cv[0]).all():
        return None
    return RespectWitness(tuple(int(x) for x in u0), tuple(int(x) for x in v0), int(cu[0]), int(cv[0]))


def zero_block_check(F: MVFamily, P: Partition) -> bool:
    """True iff every cross inner product (i != j included) is 0 mod r1*r2."""
    _check_partition(F, P)
    return bool(((F.gram() % (P.r1 * P.r2)) == 0).all())


def subfamily(F: MVFamily, T: Iterable[int]) -> MVFamily:
    """Restrict to the index set ``T``, keeping parent order."""
    idx = [int(i) for i in T]
    if not idx:
        raise SelectionError("empty subfamily selection")
    if len(set(idx)) != len(idx):
        raise SelectionError("duplicate index in selection")
    if min(idx) < 0 or max(idx) >= F.t:
        raise SelectionError(f"index out of range for family of size {F.t}")
    idx.sort()
    return MVFamily(F.m, F.n, F.U[idx], F.V[idx])


# ---------------------------------------------------------------- generators


def unit_family(m: int, t: int) -> MVFamily:
    """u_i = e_i and v_j = 1 - e_j in Z_m^t, so <u_i, v_j> = [i != j]."""
    if m < 2 or t < 1:
        raise DomainError("need m >= 2 and t >= 1")
    eye = np.eye(t, dtype=np.int64)
    return MVFamily(m, t, eye, 1 - eye)


def canonical_family(m: int) -> MVFamily:
    """u_i = (i, 1), v_j = (1, -j mod m), so <u_i, v_j> = i - j (mod m)."""
    if m < 2:
        raise DomainError("need m >= 2")
    i = np.arange(m)
    U = np.stack([i, np.ones(m, np.int64)], axis=1)
    V = np.stack([np.ones(m, np.int64), (m - i) % m], axis=1)
    return MVFamily(m, 2, U, V)


def pad_family(F: MVFamily, n: int) -> MVFamily:
    """Append zero coordinates up to dimension ``n``; inner products are unchanged."""
    if n < F.n:
        raise DimensionError(f"cannot pad dimension {F.n} down to {n}")
    pad = np.zeros((F.t, n - F.n), dtype=np.int64)
    return MVFamily(F.m, n, np.hstack([F.U, pad]), np.hstack([F.V, pad]))


def lift_family(F: MVFamily, k: int) -> MVFamily:
    """Embed a family over Z_m into Z_{k*m} by scaling every u by k."""
    if k < 1:
        raise DomainError("lift factor must be >= 1")
    return MVFamily(F.m * k, F.n, F.U * k, F.V)


def crt_product(F1: MVFamily, F2: MVFamily) -> MVFamily:
    """Size |F1|*|F2| family over Z_{m1*m2} for coprime moduli and equal dimension."""
    if gcd(F1.m, F2.m) != 1:
        raise DomainError("moduli must be coprime")
    if F1.n != F2.n:
        raise DimensionError("dimensions differ")
    m1, m2 = F1.m, F2.m
    m = m1 * m2
    e1 = m2 * pow(m2, -1, m1)  # 1 mod m1, 0 mod m2
    e2 = m1 * pow(m1, -1, m2)
    U, V = [], []
    for a in range(F1.t):
        for b in range(F2.t):
            U.append((F1.U[a] * e1 + F2.U[b] * e2) % m)
            V.append((F1.V[a] * e1 + F2.V[b] * e2) % m)
    return MVFamily(m, F1.n, U, V)


def random_greedy_family(m: int, n: int, t: int, rng: random.Random, tries: int = 5000) -> MVFamily:
    """Greedily add random zero-product pairs compatible with all previous ones.

    Stops at size ``t`` or after ``tries`` candidates; always returns at least
    one pair.
    """
    U: list[list[int]] = []
    V: list[list[int]] = []
    for _ in range(tries):
        if len(U) >= t:
            break
        u = [rng.randrange(m) for _ in range(n)]
        v = [rng.randrange(m) for _ in range(n)]
        # fix the last nonzero coordinate of u so that <u, v> = 0 (mod m)
        k = next((k for k in range(n - 1, -1, -1) if u[k] and gcd(u[k], m) == 1), None)
        if k is None:
            continue
        rest = sum(u[i] * v[i] for i in range(n) if i != k)
        v[k] = (-rest * pow(u[k], -1, m)) % m
        if not any(v):
            continue
        ok = True
        for a, b in zip(U, V):
            if sum(x * y for x, y in zip(u, b)) % m == 0 or sum(x * y for x, y in zip(a, v)) % m == 0:
                ok = False
                break
        if ok:
            U.append(u)
            V.append(v)
    if not U:
        # only zero v's came up (e.g. m = 2, n = 1); (e_n, 0) is always a valid singleton
        U, V = [[0] * (n - 1) + [1]], [[0] * n]
    return MVFamily(m, n, U, V)


# ---------------------------------------------------------------- JSON


def family_to_dict(F: MVFamily) -> dict:
    return {"m": F.m, "n": F.n, "pairs": [{"u": list(u), "v": list(v)} for u, v in F.pairs()]}


def family_from_dict(d: dict) -> MVFamily:
    try:
        m, n, pairs = int(d["m"]), int(d["n"]), d["pairs"]
        U = [list(map(int, p["u"])) for p in pairs]
        V = [list(map(int, p["v"])) for p in pairs]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed family JSON: {exc}") from exc
    for vec in U + V:
        if len(vec) != n:
            raise FormatError(f"vector of length {len(vec)} in a family with n={n}")
        if any(x < 0 or x >= m for x in vec):
            raise FormatError(f"entry out of range [0, {m - 1}]: {vec}")
    try:
        return MVFamily(m, n, U, V)
    except (DomainError, DimensionError) as exc:
        raise FormatError(str(exc)) from exc


def load_family(path) -> MVFamily:
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not JSON: {exc}") from exc
    return family_from_dict(d)
