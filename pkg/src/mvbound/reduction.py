"""One-round extraction, the squarefree variant, the iterative driver and the trace auditor.

A round takes a family respecting (r1, r2, r3), finds a character of order
s | r3 with a large bias on the distribution of <u, v>/(r1 r2) mod r3, buckets
the family by residues mod s, keeps the largest bucket on the better side and
then filters twice by the most frequent residue. The survivor respects
(r1 s, r2, r3/s) on the U side or (r1, r2 s, r3/s) on the V side.

All size bounds are compared in natural-log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

import numpy as np

from .errors import (
    ContractError,
    DomainError,
    InvalidPartitionError,
    PreconditionError,
    TraceStructureError,
)
from .family import MVFamily, RespectWitness, respects, subfamily, verify_mv
from .fourier import (
    TOL,
    BiasCertificate,
    FBudget,
    ResidueDistribution,
    character_certificate,
    find_biased_character,
)
from .modular import Partition, is_squarefree

GENERAL = "general"
DISTINCT_PRIME = "distinct-prime"
STRICT = "strict"
BEST_EFFORT = "best-effort"

LOG_RTOL = 1e-12


@dataclass
class ReductionRound:
    j: int
    s: int
    bias: float
    shifted_bias: float
    u_tilde_index: Optional[int]
    branch: str  # "U" or "V"
    bucket_label: tuple[tuple[int, int], ...]  # nonzero (coordinate, value) pairs of w0
    c1: int
    c2: int
    size_before: int
    size_after: int
    guarantee_met: bool
    partition_before: Partition
    partition_after: Partition
    variant: str = GENERAL
    below_threshold: bool = False
    threshold: float = 0.0
    bucket_size: int = 0
    sum_p2: float = 0.0
    sum_q2: float = 0.0
    distinct_c1: int = 0
    distinct_c2: int = 0
    cs_slack: float = 0.0  # log(sum_p2 * sum_q2 * s^n) - log(B^2)
    size_bound_slack: float = 0.0  # log(size_after) - log(required size)
    tau1: Optional[int] = None
    tau2: Optional[int] = None
    kept: tuple[int, ...] = ()


def _most_frequent(vals: np.ndarray) -> tuple[int, int]:
    """(value, number of distinct values); ties go to the smallest value."""
    uniq, cnt = np.unique(vals, return_counts=True)
    return int(uniq[int(np.argmax(cnt))]), len(uniq)


def _constant_row(a: np.ndarray, what: str) -> np.ndarray:
    if not (a == a[0]).all():
        raise ContractError(f"{what} is not constant over the bucket")
    return a[0]


def size_exponents(n: int, variant: str) -> tuple[float, int]:
    """(exponent of s, exponent of f(s)) in the per-round loss factor."""
    return (n / 2 + 4, 2) if variant == GENERAL else (n / 2 + 2, 1)


def reduce_once(
    F: MVFamily,
    P: Partition,
    W: RespectWitness,
    f: FBudget,
    mode: str = STRICT,
    variant: str = GENERAL,
    j: Optional[int] = None,
) -> tuple[MVFamily, Partition, RespectWitness, ReductionRound]:
    """Run one extraction round; see the module docstring.

    ``j`` pins the character instead of taking the best-margin one; in strict
    mode it must still meet its bias threshold.
    """
    if mode not in (STRICT, BEST_EFFORT):
        raise DomainError(f"unknown mode {mode!r}")
    if variant not in (GENERAL, DISTINCT_PRIME):
        raise DomainError(f"unknown variant {variant!r}")
    if P.m != F.m:
        raise InvalidPartitionError(f"partition {P} does not multiply to m={F.m}")
    if P.r3 < 2:
        raise DomainError("r3 must be >= 2 for a reduction round")
    if variant == DISTINCT_PRIME and not is_squarefree(F.m):
        raise DomainError(f"m={F.m} is not a product of distinct primes")
    t, n, m = F.t, F.n, F.m
    if mode == STRICT and t < 100 * m:
        raise PreconditionError(f"strict mode needs t >= 100m = {100 * m}, got t = {t}")
    if t == 0:
        raise PreconditionError("empty family")
    if respects(F, P) != W:
        raise PreconditionError(f"family does not respect {P} with the given witness")
    r1, r2, r3 = P.r1, P.r2, P.r3
    U, V = F.U, F.V

    # Step 1: biased character
    G = F.gram()
    zero_rows = (G % m) == 0
    if not zero_rows.diagonal().all() or zero_rows.sum() != t:
        raise PreconditionError("input is not a verified MV family")
    q = r1 * r2
    if (G % q != 0).any():
        raise ContractError("respected partition but <u, v> not divisible by r1*r2")
    X = ((G // q) % r3).astype(np.int64)
    counts = np.bincount(X.ravel(), minlength=r3)
    mu = ResidueDistribution(r3, tuple(int(c) for c in counts), t * t)
    if j is None:
        cert: BiasCertificate = find_biased_character(mu, f, diagnostic=(mode == BEST_EFFORT))
    else:
        cert = character_certificate(mu, j, f)
        if mode == STRICT and cert.below_threshold:
            raise PreconditionError(f"character j={j} misses its bias threshold")
    j, s = cert.j, cert.s
    phase = np.exp(2j * np.pi * ((j * np.arange(r3)) % r3) / r3)
    E = phase[X]
    bias = float(abs(E.mean()))

    tau1 = tau2 = None
    if variant == GENERAL:
        col = E.mean(axis=0)
        bbar = np.abs(np.conj(E) @ col) / t
        top = float(bbar.max())
        ut = int(np.nonzero(bbar >= top * (1 - LOG_RTOL))[0][0])
        shifted = float(bbar[ut])
        if shifted < bias * bias - TOL:
            raise ContractError(f"shifted bias {shifted} below bias^2 {bias * bias}")
        Ulab = (U // r1 - U[ut] // r1) % s
        Vlab = (V // r2) % s
        cs_target = shifted
    else:
        ut = None
        if gcd(s, r1) != 1 or gcd(s, r2) != 1:
            raise ContractError(f"s={s} shares a factor with r1={r1} or r2={r2}")
        tau1, tau2 = pow(r1, -1, s), pow(r2, -1, s)
        if (tau1 * r1) % s != 1 % s or (tau2 * r2) % s != 1 % s:
            raise ContractError("modular inverse check failed")
        Egm = phase[((G % r3) * (tau1 * tau2)) % r3]
        if np.abs(Egm - E).max() > TOL:
            raise ContractError("inverse-rewritten character disagrees with the original")
        shifted = float(abs(Egm.mean()))
        Ulab = U % s
        Vlab = V % s
        cs_target = shifted

    # Step 2: sparse buckets keyed by occupied labels
    ulabels, uinv, ucnt = np.unique(Ulab, axis=0, return_inverse=True, return_counts=True)
    vlabels, vinv, vcnt = np.unique(Vlab, axis=0, return_inverse=True, return_counts=True)
    uinv, vinv = uinv.ravel(), vinv.ravel()
    sum_p2 = float((ucnt.astype(float) ** 2).sum()) / (t * t)
    sum_q2 = float((vcnt.astype(float) ** 2).sum()) / (t * t)
    if cs_target > 0:
        cs_slack = math.log(sum_p2) + math.log(sum_q2) + n * math.log(s) - 2 * math.log(cs_target)
    else:
        cs_slack = math.inf
    if cs_slack < -TOL:
        raise ContractError(f"Cauchy-Schwarz diagnostic violated (log slack {cs_slack})")

    # Step 3: the larger max bucket decides the side (ties -> U)
    branch = "U" if ucnt.max() >= vcnt.max() else "V"
    if branch == "U":
        k = int(np.argmax(ucnt))
        w0 = ulabels[k]
        idx = np.nonzero(uinv == k)[0]
    else:
        k = int(np.argmax(vcnt))
        w0 = vlabels[k]
        idx = np.nonzero(vinv == k)[0]
    Ub, Vb = U[idx], V[idx]
    u0 = np.array(W.u0, dtype=np.int64)
    v0 = np.array(W.v0, dtype=np.int64)

    # Step 4: two most-frequent-residue filters
    if branch == "U":
        if variant == GENERAL:
            delta = Ub // r1 - U[ut] // r1 - w0
            if (delta % s != 0).any():
                raise ContractError("bucket offset not divisible by s")
            first = delta // s
        else:
            first = Ub // (r1 * s)
        vals1 = (first @ v0) % r2
        cap1 = gcd(s, r2)
        mod2 = s * r1
    else:
        if variant == GENERAL:
            first = (Vb // r2 - w0) // s
        else:
            first = Vb // (r2 * s)
        vals1 = (first @ u0) % r1
        cap1 = gcd(s, r1)
        mod2 = s * r2
    c1, d1 = _most_frequent(vals1)
    if d1 > cap1:
        raise ContractError(f"{d1} distinct first-filter residues exceed gcd bound {cap1}")
    keep = idx[vals1 == c1]
    if branch == "U":
        new0 = _constant_row(U[keep] % mod2, "u mod r1*s")
        vals2 = ((V[keep] // r2) @ new0) % mod2
    else:
        new0 = _constant_row(V[keep] % mod2, "v mod r2*s")
        vals2 = ((U[keep] // r1) @ new0) % mod2
    c2, d2 = _most_frequent(vals2)
    if d2 > s:
        raise ContractError(f"{d2} distinct second-filter residues exceed s={s}")
    keep = keep[vals2 == c2]

    P2 = Partition(r1 * s, r2, r3 // s) if branch == "U" else Partition(r1, r2 * s, r3 // s)
    F2 = subfamily(F, keep.tolist())
    if not verify_mv(F2):
        raise ContractError("filtered subfamily failed verification")
    W2 = respects(F2, P2)
    if W2 is None:
        raise ContractError(f"filtered subfamily does not respect {P2}")

    e_s, e_f = size_exponents(n, variant)
    log_required = math.log(t) - e_s * math.log(s) - e_f * f.log(s)
    slack = math.log(F2.t) - log_required
    # the size guarantee is claimed only in strict mode
    guarantee = mode == STRICT and t >= 100 * m and not cert.below_threshold
    if guarantee and slack < -LOG_RTOL * max(1.0, abs(log_required)):
        raise ContractError(f"size guarantee violated (log slack {slack})")

    label = tuple((int(i), int(x)) for i, x in enumerate(w0) if x)
    rnd = ReductionRound(
        j=j,
        s=s,
        bias=bias,
        shifted_bias=shifted,
        u_tilde_index=ut,
        branch=branch,
        bucket_label=label,
        c1=c1,
        c2=c2,
        size_before=t,
        size_after=F2.t,
        guarantee_met=guarantee,
        partition_before=P,
        partition_after=P2,
        variant=variant,
        below_threshold=cert.below_threshold,
        threshold=cert.threshold,
        bucket_size=len(idx),
        sum_p2=sum_p2,
        sum_q2=sum_q2,
        distinct_c1=d1,
        distinct_c2=d2,
        cs_slack=cs_slack,
        size_bound_slack=slack,
        tau1=tau1,
        tau2=tau2,
        kept=tuple(int(i) for i in keep),
    )
    return F2, P2, W2, rnd


def reduce_once_distinct_primes(F, P, W, f, mode=STRICT):
    return reduce_once(F, P, W, f, mode=mode, variant=DISTINCT_PRIME)


# ---------------------------------------------------------------- driver

R3_DONE = "r3=1"
SIZE_100M = "t<100m"
SIZE_2 = "t<2"


@dataclass
class ReductionTrace:
    m: int
    n: int
    t0: int
    variant: str
    mode: str
    f: str
    rounds: list[ReductionRound]
    terminal: str
    families: list[MVFamily] = field(default_factory=list, repr=False, compare=False)

    @property
    def final_size(self) -> int:
        return self.rounds[-1].size_after if self.rounds else self.t0

    @property
    def final_partition(self) -> Partition:
        return self.rounds[-1].partition_after if self.rounds else Partition(1, 1, self.m)


def drive(F: MVFamily, f: FBudget, variant: str = GENERAL, mode: str = STRICT) -> ReductionTrace:
    """Apply rounds from (1, 1, m) until r3 = 1 or the family is too small."""
    if not verify_mv(F):
        raise PreconditionError("drive needs a verified MV family")
    P = Partition(1, 1, F.m)
    W = respects(F, P)
    rounds: list[ReductionRound] = []
    families = [F]
    cur = F
    while True:
        if P.r3 == 1:
            terminal = R3_DONE
            break
        if mode == STRICT and cur.t < 100 * F.m:
            terminal = SIZE_100M
            break
        if mode == BEST_EFFORT and cur.t < 2:
            terminal = SIZE_2
            break
        cur, P, W, rnd = reduce_once(cur, P, W, f, mode=mode, variant=variant)
        rounds.append(rnd)
        families.append(cur)
    if terminal == R3_DONE and cur.t != 1:
        raise ContractError(f"respects (r1, r2, 1) with size {cur.t} != 1")
    if mode == STRICT and cur.t >= 100 * F.m:
        raise ContractError("strict drive ended with size >= 100m")
    return ReductionTrace(F.m, F.n, F.t, variant, mode, str(f), rounds, terminal, families)


# ---------------------------------------------------------------- audit


@dataclass
class Check:
    name: str
    round: Optional[int]
    passed: bool
    slack: Optional[float] = None
    required: bool = True


@dataclass
class AuditReport:
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.required and not c.passed]


def audit_trace(T: ReductionTrace, f: Optional[FBudget] = None) -> AuditReport:
    """Recheck partition chaining, divisibility and the size accounting of a trace.

    The size-chain inequalities are required only over rounds flagged
    ``guarantee_met``; for the other rounds they are reported for
    information.
    """
    if f is None:
        f = FBudget.parse(T.f)
    if T.variant not in (GENERAL, DISTINCT_PRIME):
        raise TraceStructureError(f"unknown variant {T.variant!r}")
    checks: list[Check] = []
    P = Partition(1, 1, T.m)
    size = T.t0
    prod_s = 1
    e_total = 0.0
    all_guaranteed = True
    for i, rd in enumerate(T.rounds):
        if not isinstance(rd, ReductionRound):
            raise TraceStructureError(f"round {i} is not a round record")
        checks.append(Check("partition chains", i, rd.partition_before == P))
        pb = rd.partition_before
        checks.append(Check("partition multiplies to m", i, pb.m == T.m and rd.partition_after.m == T.m))
        ok_s = rd.s >= 2 and pb.r3 % rd.s == 0
        checks.append(Check("s >= 2 divides r3", i, ok_s))
        if ok_s:
            expect = (
                Partition(pb.r1 * rd.s, pb.r2, pb.r3 // rd.s)
                if rd.branch == "U"
                else Partition(pb.r1, pb.r2 * rd.s, pb.r3 // rd.s)
            )
            checks.append(Check("refined partition matches branch", i, rd.branch in ("U", "V") and rd.partition_after == expect))
        checks.append(Check("sizes chain", i, rd.size_before == size and 1 <= rd.size_after <= rd.size_before))
        if rd.variant != T.variant:
            checks.append(Check("variant consistent", i, False))
        e_s, e_f = size_exponents(T.n, T.variant)
        if rd.s >= 2:
            loss = e_s * math.log(rd.s) + e_f * f.log(rd.s)
            slack = math.log(max(rd.size_after, 1)) + loss - math.log(max(rd.size_before, 1))
            tol = LOG_RTOL * max(1.0, abs(loss))
            checks.append(Check("round size bound", i, slack >= -tol, slack, required=rd.guarantee_met))
            e_total += loss
        all_guaranteed &= rd.guarantee_met
        prod_s *= max(rd.s, 1)
        P = rd.partition_after
        size = rd.size_after
    if T.rounds:
        checks.append(Check("product of s divides m", None, T.m % prod_s == 0 and prod_s <= T.m))
        slack = math.log(T.final_size) + e_total - math.log(T.t0)
        tol = LOG_RTOL * max(1.0, e_total)
        checks.append(Check("size chain t0 <= t_final * prod(loss)", None, slack >= -tol, slack, required=all_guaranteed))
    if T.terminal == R3_DONE:
        checks.append(Check("terminal r3 = 1", None, P.r3 == 1))
        checks.append(Check("size 1 at r3 = 1", None, size == 1))
    elif T.terminal == SIZE_100M:
        checks.append(Check("terminal size < 100m", None, size < 100 * T.m))
    elif T.terminal == SIZE_2:
        checks.append(Check("terminal size < 2", None, size < 2))
    else:
        raise TraceStructureError(f"unknown terminal reason {T.terminal!r}")
    if T.mode == STRICT and T.rounds:
        checks.append(Check("strict rounds guaranteed", None, all_guaranteed))
    return AuditReport(checks)


# ---------------------------------------------------------------- JSON

_ROUND_FIELDS = [
    "j", "s", "bias", "shifted_bias", "u_tilde_index", "branch", "bucket_label", "c1", "c2",
    "size_before", "size_after", "guarantee_met", "partition_before", "partition_after", "variant",
    "below_threshold", "threshold", "bucket_size", "sum_p2", "sum_q2", "distinct_c1", "distinct_c2",
    "cs_slack", "size_bound_slack", "tau1", "tau2", "kept",
]


def round_to_dict(rd: ReductionRound) -> dict:
    out = {}
    for name in _ROUND_FIELDS:
        val = getattr(rd, name)
        if isinstance(val, Partition):
            val = list(val.as_tuple())
        elif name == "bucket_label":
            val = [list(p) for p in val]
        elif name == "kept":
            val = list(val)
        out[name] = val
    return out


def round_from_dict(d: dict) -> ReductionRound:
    try:
        kw = {name: d[name] for name in _ROUND_FIELDS}
        for name in ("partition_before", "partition_after"):
            r = [int(x) for x in kw[name]]
            if len(r) != 3:
                raise ValueError(f"{name} needs three components")
            kw[name] = Partition(*r)
        kw["bucket_label"] = tuple((int(a), int(b)) for a, b in kw["bucket_label"])
        kw["kept"] = tuple(int(x) for x in kw["kept"])
        for name in ("j", "s", "c1", "c2", "size_before", "size_after", "bucket_size", "distinct_c1", "distinct_c2"):
            if isinstance(kw[name], bool) or not isinstance(kw[name], int):
                raise ValueError(f"{name} must be an integer")
        for name in ("bias", "shifted_bias", "threshold", "sum_p2", "sum_q2", "cs_slack", "size_bound_slack"):
            kw[name] = math.inf if kw[name] is None else float(kw[name])
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceStructureError(f"malformed round record: {exc}") from exc
    return ReductionRound(**kw)


def trace_to_dict(T: ReductionTrace) -> dict:
    return {
        "m": T.m,
        "n": T.n,
        "t0": T.t0,
        "variant": T.variant,
        "mode": T.mode,
        "f": T.f,
        "terminal": T.terminal,
        "rounds": [round_to_dict(r) for r in T.rounds],
    }


def trace_from_dict(d: dict) -> ReductionTrace:
    try:
        rounds = [round_from_dict(r) for r in d["rounds"]]
        return ReductionTrace(
            int(d["m"]), int(d["n"]), int(d["t0"]), str(d["variant"]), str(d["mode"]), str(d["f"]), rounds, str(d["terminal"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceStructureError(f"malformed trace: {exc}") from exc
