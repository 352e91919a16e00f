"""Distributions over Z_r, character sums and the biased-character finder.

Distributions are exact integer counts over a total; floating point only
enters when a character sum is evaluated. Character sums are stated for
E_{x~mu}[omega_r^{jx}] directly (no 1/r normalisation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CannotBoundError,
    ContractError,
    DomainError,
    FormatError,
    IntegralityError,
    LemmaPreconditionError,
)
from .family import MVFamily
from .modular import Partition, character_order

TOL = 1e-9
BUDGET_LIMIT = 0.99


@dataclass(frozen=True)
class ResidueDistribution:
    r: int
    counts: tuple[int, ...]
    total: int

    def __post_init__(self):
        if self.r < 1:
            raise DomainError(f"modulus must be >= 1, got {self.r}")
        if len(self.counts) != self.r:
            raise DomainError(f"expected {self.r} counts, got {len(self.counts)}")
        if any(c < 0 for c in self.counts) or self.total <= 0 or sum(self.counts) != self.total:
            raise DomainError("counts must be nonnegative and sum to a positive total")

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "ResidueDistribution":
        counts = tuple(int(c) for c in counts)
        return cls(len(counts), counts, sum(counts))

    @classmethod
    def from_weights(cls, weights: Sequence[float], max_denominator: int = 10**9) -> "ResidueDistribution":
        fr = [Fraction(w).limit_denominator(max_denominator) for w in weights]
        den = math.lcm(*(f.denominator for f in fr))
        return cls.from_counts([f.numerator * (den // f.denominator) for f in fr])

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.total

    def mass_at_zero(self) -> Fraction:
        return Fraction(self.counts[0], self.total)


def inner_residue_distribution(F: MVFamily, P: Partition) -> ResidueDistribution:
    """Distribution of (<u, v> / (r1 r2)) mod r3 over all t^2 ordered pairs."""
    if F.t == 0:
        raise DomainError("empty family has no pair distribution")
    G = F.gram()
    q = P.r1 * P.r2
    if (G % q != 0).any():
        i, j = (int(x) for x in np.argwhere(G % q != 0)[0])
        raise IntegralityError(f"<u_{i}, v_{j}> = {G[i, j]} is not divisible by r1*r2 = {q}")
    x = (G // q) % P.r3
    counts = np.bincount(x.ravel().astype(np.int64), minlength=P.r3)
    return ResidueDistribution(P.r3, tuple(int(c) for c in counts), F.t * F.t)


def bias_at(mu: ResidueDistribution, j: int) -> complex:
    """E_{x~mu}[exp(2 pi i j x / r)]."""
    r = mu.r
    if not 0 <= j <= r - 1:
        raise DomainError(f"j={j} outside [0, {r - 1}]")
    x = (j * np.arange(r)) % r
    return complex(np.dot(mu.weights, np.exp(2j * np.pi * x / r)))


def bias_spectrum(mu: ResidueDistribution) -> np.ndarray:
    """``bias_at(mu, j)`` for every j in 0..r-1 as one array."""
    r = mu.r
    x = np.arange(r)
    phase = np.exp(2j * np.pi * ((np.outer(x, x)) % r) / r)
    return phase @ mu.weights


def fourier_identity_residual(mu: ResidueDistribution) -> float:
    """|1 + sum_{j>=1} E[omega^{-jx}] - r mu(0)|, which vanishes identically."""
    spectrum = bias_spectrum(mu)
    lhs = 1 + np.conj(spectrum[1:]).sum()
    return float(abs(lhs - mu.r * mu.counts[0] / mu.total))


# ---------------------------------------------------------------- f-budgets


@dataclass(frozen=True)
class FBudget:
    """A weight function f with sum_{s>=2} 1/f(s) meant to stay below 0.99.

    kind is ``"power"`` (f(s) = s**alpha), ``"loglaw"`` (f(s) = 3 s ln^2 s) or
    ``"table"`` (tabulated values for s = 2, 3, ... with an optional
    power-law tail exponent beyond the table).
    """

    kind: str
    alpha: float = 0.0
    table: tuple[float, ...] = field(default=(), repr=False)
    tail_alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("power", "loglaw", "table"):
            raise DomainError(f"unknown f kind {self.kind!r}")

    @classmethod
    def power(cls, alpha: float) -> "FBudget":
        return cls("power", alpha=float(alpha))

    @classmethod
    def loglaw(cls) -> "FBudget":
        return cls("loglaw")

    @classmethod
    def parse(cls, text: str) -> "FBudget":
        """``power:1.735`` or ``loglaw``."""
        if text == "loglaw":
            return cls.loglaw()
        if text.startswith("power:"):
            try:
                return cls.power(float(text.split(":", 1)[1]))
            except ValueError as exc:
                raise DomainError(f"bad exponent in {text!r}") from exc
        raise DomainError(f"unrecognised f {text!r}; use power:ALPHA or loglaw")

    def __str__(self) -> str:
        if self.kind == "power":
            return f"power:{self.alpha!r}"
        if self.kind == "loglaw":
            return "loglaw"
        return f"table:{len(self.table)}"

    def __call__(self, s: int) -> float:
        if s < 2:
            raise DomainError("f is only defined for s >= 2")
        if self.kind == "power":
            return float(s) ** self.alpha
        if self.kind == "loglaw":
            return 3.0 * s * math.log(s) ** 2
        if s - 2 < len(self.table):
            return self.table[s - 2]
        if self.tail_alpha is None or not self.table:
            raise DomainError(f"tabulated f has no value at s={s}")
        last = len(self.table) + 1
        return self.table[-1] * (s / last) ** self.tail_alpha

    def log(self, s: int) -> float:
        if self.kind == "power":
            return self.alpha * math.log(s)
        return math.log(self(s))

    def values(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.kind == "power":
            return s**self.alpha
        if self.kind == "loglaw":
            return 3.0 * s * np.log(s) ** 2
        return np.array([self(int(x)) for x in s])


@dataclass(frozen=True)
class BudgetCheck:
    accepted: bool
    partial_sum: float
    tail_bound: float
    s_max: int

    @property
    def bound(self) -> float:
        return self.partial_sum + self.tail_bound


def _tail_integral(f: FBudget, s_max: int) -> float:
    """Upper bound on sum_{s > s_max} 1/f(s) by the integral from s_max."""
    if f.kind == "power":
        if f.alpha <= 1:
            return math.inf
        return s_max ** (1 - f.alpha) / (f.alpha - 1)
    if f.kind == "loglaw":
        # d/ds [-1/(3 ln s)] = 1/(3 s ln^2 s)
        return 1.0 / (3.0 * math.log(s_max))
    if f.tail_alpha is None:
        raise CannotBoundError("tabulated f declares no tail behaviour beyond its table")
    if f.tail_alpha <= 1:
        return math.inf
    # f(s) >= f(s_max) (s / s_max)^tail_alpha beyond s_max by declaration
    return s_max / (f(s_max) * (f.tail_alpha - 1))


def check_f_budget(f: FBudget, s_max: int = 10**6) -> BudgetCheck:
    """Partial sum over s = 2..s_max plus an integral tail bound; accept iff <= 0.99."""
    if s_max < 2:
        raise DomainError("s_max must be >= 2")
    s = np.arange(2, s_max + 1, dtype=float)
    vals = f.values(s)
    if (vals <= 0).any():
        raise CannotBoundError("f must be positive")
    if f.kind == "table":
        window = vals[-max(2, len(vals) // 10):]
        if (np.diff(window) < 0).any():
            raise CannotBoundError("tabulated f is not monotone near s_max")
    # summing smallest terms first keeps the float error ~1e-16 relative
    partial = math.fsum((1.0 / vals)[::-1])
    tail = _tail_integral(f, s_max)
    return BudgetCheck(partial + tail <= BUDGET_LIMIT, partial, tail, s_max)


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class BiasCertificate:
    j: int
    s: int
    magnitude: float
    threshold: float
    margin: float
    below_threshold: bool = False


def character_certificate(mu: ResidueDistribution, j: int, f: FBudget) -> BiasCertificate:
    """Certificate for one given character, flagged if it misses its threshold."""
    s = character_order(j, mu.r)
    sf = s * f(s)
    mag = abs(bias_at(mu, j))
    return BiasCertificate(j, s, mag, 1.0 / sf, mag * sf, below_threshold=mag < 1.0 / sf - TOL)


def lemma_precondition_holds(mu: ResidueDistribution) -> bool:
    """Exact test of mu(0) <= 1 / (100 r)."""
    return 100 * mu.r * mu.counts[0] <= mu.total


def find_biased_character(mu: ResidueDistribution, f: FBudget, diagnostic: bool = False) -> BiasCertificate:
    """Scan j = 1..r-1 for |E[omega^{jx}]| >= 1/(s f(s)).

    Among the characters meeting their threshold the one maximising
    ``magnitude * s * f(s)`` wins, ties going to the smallest j. With
    ``diagnostic=True`` the precondition is waived and, if nothing meets its
    threshold, the best margin found is returned flagged ``below_threshold``.
    """
    r = mu.r
    if r < 2:
        raise DomainError("need r >= 2")
    if not diagnostic and not lemma_precondition_holds(mu):
        raise LemmaPreconditionError(
            f"mu(0) = {mu.counts[0]}/{mu.total} exceeds 1/(100*{r})"
        )
    mags = np.abs(bias_spectrum(mu))
    best = None
    best_any = None
    for j in range(1, r):
        s = character_order(j, r)
        sf = s * f(s)
        threshold = 1.0 / sf
        mag = float(mags[j])
        cert = BiasCertificate(j, s, mag, threshold, mag * sf)
        # strict > keeps the smallest j on ties; 1e-12 relative absorbs roundoff
        if best_any is None or cert.margin > best_any.margin * (1 + 1e-12) + 1e-15:
            best_any = cert
        if mag >= threshold - TOL:
            if best is None or cert.margin > best.margin * (1 + 1e-12) + 1e-15:
                best = cert
    if best is not None:
        return best
    if diagnostic:
        c = best_any
        return BiasCertificate(c.j, c.s, c.magnitude, c.threshold, c.margin, below_threshold=True)
    raise ContractError("precondition holds but no character meets its threshold")


# ---------------------------------------------------------------- JSON


def distribution_to_dict(mu: ResidueDistribution) -> dict:
    return {"r": mu.r, "counts": list(mu.counts), "total": mu.total}


def distribution_from_dict(d: dict) -> ResidueDistribution:
    try:
        mu = ResidueDistribution(int(d["r"]), tuple(int(c) for c in d["counts"]), int(d["total"]))
    except (KeyError, TypeError, ValueError, DomainError) as exc:
        raise FormatError(f"malformed distribution JSON: {exc}") from exc
    return mu

