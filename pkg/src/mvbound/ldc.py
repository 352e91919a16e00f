"""Matching-vector locally decodable code over a prime field.

With p the smallest prime = 1 (mod m) and gamma of exact order m in Z_p^*,
message x in Z_p^t is encoded as C(w) = sum_j x_j gamma^(<u_j, w> mod m) for
every w in Z_m^n. Symbol i is recovered from the m positions w + lambda v_i:
the diagonal term survives and every cross term is a full geometric sum
over the m-th roots of unity, which vanishes.

Codeword positions use mixed-radix row-major order: w = (w_1, ..., w_n)
sits at index sum_k w_k m^(n-k).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from sympy import factorint, isprime, primitive_root

from .errors import DimensionError, DomainError, FormatError, SetupError
from .family import MVFamily, verify_mv

PRIME_CAP = 10**9
MAX_CODEWORD = 10**7
CODEWORD_MAGIC = b"MVCW"
_HEADER = struct.Struct("<4sIIQI")  # magic, m, n, p, t


@dataclass(frozen=True)
class CodeParams:
    family: MVFamily = field(repr=False)
    p: int
    gamma: int

    @property
    def m(self) -> int:
        return self.family.m

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def K(self) -> int:
        return self.family.t

    @property
    def N(self) -> int:
        return self.family.m ** self.family.n

    @property
    def q(self) -> int:
        return self.family.m

    @property
    def symbol_bits(self) -> int:
        return math.ceil(math.log2(self.p))


def element_order(g: int, p: int) -> int:
    order = p - 1
    for q in factorint(p - 1):
        while order % q == 0 and pow(g, order // q, p) == 1:
            order //= q
    return order


def setup(F: MVFamily) -> CodeParams:
    if F.t < 1:
        raise SetupError("need a nonempty family")
    if not verify_mv(F):
        raise SetupError("family is not a verified MV family")
    m = F.m
    if m ** F.n > MAX_CODEWORD:
        raise SetupError(f"N = m^n = {m ** F.n} exceeds the {MAX_CODEWORD} dense-storage cap")
    p = m + 1
    while not isprime(p):
        p += m
        if p > PRIME_CAP:
            raise SetupError(f"no prime = 1 mod {m} below {PRIME_CAP}")
    g = int(primitive_root(p))
    gamma = pow(g, (p - 1) // m, p)
    if pow(gamma, m, p) != 1 or any(pow(gamma, m // q, p) == 1 for q in factorint(m)):
        raise SetupError(f"gamma={gamma} does not have order {m} mod {p}")
    return CodeParams(F, p, gamma)


def all_positions(m: int, n: int) -> np.ndarray:
    """All w in Z_m^n in row-major order, shape (m^n, n)."""
    grids = np.indices((m,) * n).reshape(n, -1).T
    return grids.astype(np.int64)


def position_index(w: Sequence[int], m: int) -> int:
    idx = 0
    for x in w:
        idx = idx * m + int(x)
    return idx


@dataclass
class Codeword:
    m: int
    n: int
    p: int
    t: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.values.shape != (self.m**self.n,):
            raise DimensionError(f"codeword needs {self.m ** self.n} symbols, got {self.values.shape}")
        if self.values.size and (self.values.min() < 0 or self.values.max() >= self.p):
            raise DomainError("codeword symbol outside [0, p-1]")

    def __getitem__(self, idx: int) -> int:
        return int(self.values[idx])

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, Codeword):
            return NotImplemented
        return (self.m, self.n, self.p, self.t) == (other.m, other.n, other.p, other.t) and np.array_equal(self.values, other.values)

    def to_bytes(self) -> bytes:
        return _HEADER.pack(CODEWORD_MAGIC, self.m, self.n, self.p, self.t) + self.values.astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Codeword":
        if len(data) < _HEADER.size:
            raise FormatError("codeword file shorter than its header")
        magic, m, n, p, t = _HEADER.unpack_from(data)
        if magic != CODEWORD_MAGIC:
            raise FormatError(f"bad codeword magic {magic!r}")
        body = data[_HEADER.size:]
        if len(body) != 8 * m**n:
            raise FormatError(f"expected {m ** n} symbols, file holds {len(body) // 8}")
        vals = np.frombuffer(body, dtype="<u8").astype(np.int64)
        try:
            return cls(m, n, p, t, vals)
        except (DimensionError, DomainError) as exc:
            raise FormatError(str(exc)) from exc


def encode(params: CodeParams, x: Sequence[int], chunk: int = 1 << 16) -> Codeword:
    F, p = params.family, params.p
    x = np.asarray(x, dtype=np.int64) % p
    if x.shape != (F.t,):
        raise DimensionError(f"message must have {F.t} symbols, got {x.shape}")
    powers = np.array([pow(params.gamma, k, p) for k in range(F.m)], dtype=np.int64)
    W = all_positions(F.m, F.n)
    out = np.empty(len(W), dtype=np.int64)
    for start in range(0, len(W), chunk):
        E = (W[start:start + chunk] @ F.U.T) % F.m  # (chunk, t)
        # terms < p^2 and t*p^2 stays far below 2^63 at desk scale
        out[start:start + chunk] = (powers[E] * x).sum(axis=1) % p
    return Codeword(F.m, F.n, p, F.t, out)


class CountingOracle:
    """Position-indexed codeword access that counts queries."""

    def __init__(self, codeword):
        self.codeword = codeword
        self.queries = 0

    def __getitem__(self, idx: int) -> int:
        self.queries += 1
        return int(self.codeword[idx])


@dataclass(frozen=True)
class DecodeResult:
    value: int
    in_alphabet: bool
    w: tuple[int, ...]


def decode_at(params: CodeParams, oracle, i: int, w: Sequence[int]) -> int:
    """Recover symbol i from the m positions w + lambda v_i (lambda = 0..m-1)."""
    F, p, m = params.family, params.p, params.m
    if not 0 <= i < F.t:
        raise DomainError(f"index {i} outside [0, {F.t - 1}]")
    w = np.asarray(w, dtype=np.int64)
    v = F.V[i]
    total = 0
    for lam in range(m):
        total += oracle[position_index((w + lam * v) % m, m)]
    shift = int(F.U[i] @ w) % m
    inv = pow(pow(params.gamma, shift, p), -1, p) * pow(m, -1, p)
    return (total % p) * inv % p


def decode_bit(params: CodeParams, oracle, i: int, rng) -> DecodeResult:
    """Decode symbol i (0-based) from one uniformly random line; ``rng`` is a seed or Generator."""
    rng = np.random.default_rng(rng)
    w = rng.integers(0, params.m, size=params.n)
    val = decode_at(params, oracle, i, w)
    return DecodeResult(val, val in (0, 1), tuple(int(a) for a in w))


@dataclass(frozen=True)
class ChannelSpec:
    delta: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError("delta must be in [0, 1]")


def corrupt(c: Codeword, ch: ChannelSpec) -> Codeword:
    """Replace exactly floor(delta N) distinct positions by different random symbols."""
    rng = np.random.default_rng(ch.seed)
    N = len(c)
    k = math.floor(ch.delta * N)
    vals = c.values.copy()
    if k:
        pos = rng.choice(N, size=k, replace=False)
        vals[pos] = (vals[pos] + rng.integers(1, c.p, size=k)) % c.p
    return Codeword(c.m, c.n, c.p, c.t, vals)


@dataclass
class SimulationReport:
    delta: float
    trials: int
    seed: int
    corrupted_positions: int
    per_bit: list[float]
    mean: float
    union_floor: float
    floor_vacuous: bool

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "trials": self.trials,
            "seed": self.seed,
            "corrupted_positions": self.corrupted_positions,
            "per_bit_success": self.per_bit,
            "mean_success": self.mean,
            "union_bound_floor": self.union_floor,
            "floor_vacuous": self.floor_vacuous,
        }


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, trial])


def simulate(params: CodeParams, x: Sequence[int], delta: float, trials: int, seed: int = 0) -> SimulationReport:
    if trials < 1:
        raise DomainError("need at least one trial")
    clean = encode(params, x)
    x = [int(a) % params.p for a in x]
    hits = np.zeros(params.K, dtype=np.int64)
    for trial in range(trials):
        ss_channel, ss_decode = trial_seed(seed, trial).spawn(2)
        noisy = corrupt(clean, ChannelSpec(delta, int(ss_channel.generate_state(1, np.uint64)[0])))
        rng = np.random.default_rng(ss_decode)
        for i in range(params.K):
            if decode_bit(params, noisy, i, rng).value == x[i]:
                hits[i] += 1
    per_bit = (hits / trials).tolist()
    floor = 1 - params.q * delta
    return SimulationReport(delta, trials, seed, math.floor(delta * params.N), per_bit,
                            float(np.mean(per_bit)), floor, floor <= 0)
