"""Multiplexed rolls: superpositions of components traveling at speeds w*p.

A bank of W component vectors is rolled at speeds 1*p, 2*p, ..., W*p and
summed.  With a single component this reduces exactly to the plain roll;
with two or more the cross-speed terms make scores depend on absolute
position, so translation invariance breaks (generically), which
``equivariance_violation_witness`` demonstrates by seeded search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .roll_core import roll_discrete

__all__ = [
    "MultiplexBank",
    "EquivarianceWitness",
    "mproll",
    "mproll_score",
    "equivariance_violation_witness",
]


@dataclass(frozen=True)
class MultiplexBank:
    """W precomputed component vectors; components[w-1] travels at speed w."""

    components: tuple

    def __init__(self, components):
        comps = tuple(np.asarray(c, dtype=float) for c in components)
        if not comps:
            raise ValueError("bank must hold at least one component")
        n = comps[0].size
        for c in comps:
            if c.ndim != 1 or c.size != n or n == 0:
                raise ValueError("all components must be 1-D vectors of one shared length")
        object.__setattr__(self, "components", comps)

    @property
    def waves(self) -> int:
        return len(self.components)

    @property
    def n(self) -> int:
        return self.components[0].size


def mproll(bank: MultiplexBank, p: int) -> np.ndarray:
    """Sum of components[w-1] rolled by w*p, w = 1..W."""
    out = np.zeros(bank.n)
    for w, comp in enumerate(bank.components, start=1):
        out += roll_discrete(comp, w * p)
    return out


def mproll_score(
    bank_q: MultiplexBank,
    bank_k: MultiplexBank,
    p_q: int,
    p_k: int,
    d: float | None = None,
) -> float:
    """Scaled dot product of the two multiplexed encodings."""
    if bank_q.n != bank_k.n:
        raise ValueError("query and key banks must share vector length")
    if d is None:
        d = float(bank_q.n)
    if not d > 0:
        raise ValueError("d must be positive")
    return float(mproll(bank_q, p_q) @ mproll(bank_k, p_k) / math.sqrt(d))


@dataclass(frozen=True)
class EquivarianceWitness:
    """Outcome of the translation-invariance violation search.

    ``found`` is False when the budget was exhausted without a violating
    configuration (inconclusive, e.g. always for W = 1); the remaining
    fields then describe the best attempt seen.
    """

    found: bool
    attempts: int
    gap: float
    bank_q: MultiplexBank | None = None
    bank_k: MultiplexBank | None = None
    p_q: int = 0
    p_k: int = 0
    t: int = 0
    score_before: float = 0.0
    score_after: float = 0.0


def equivariance_violation_witness(
    n: int,
    waves: int,
    seed: int,
    budget: int = 10_000,
    gap_threshold: float = 1e-3,
) -> EquivarianceWitness:
    """Search seeded random banks/offsets for a score that moves under a common shift.

    Draws banks and positions from a deterministic generator until
    |score(p_q + t, p_k + t) - score(p_q, p_k)| exceeds ``gap_threshold``.
    A single-wave bank can never produce a witness; the search then
    simply exhausts its budget.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    if waves < 1:
        raise ValueError("waves must be at least 1")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    rng = np.random.default_rng(seed)
    best = EquivarianceWitness(found=False, attempts=budget, gap=0.0)
    for attempt in range(budget):
        bank_q = MultiplexBank(rng.standard_normal((waves, n)))
        bank_k = MultiplexBank(rng.standard_normal((waves, n)))
        p_q, p_k = (int(x) for x in rng.integers(0, n, size=2))
        t = int(rng.integers(1, n))
        before = mproll_score(bank_q, bank_k, p_q, p_k)
        after = mproll_score(bank_q, bank_k, p_q + t, p_k + t)
        gap = abs(after - before)
        witness = EquivarianceWitness(
            found=gap > gap_threshold,
            attempts=attempt + 1,
            gap=gap,
            bank_q=bank_q,
            bank_k=bank_k,
            p_q=p_q,
            p_k=p_k,
            t=t,
            score_before=before,
            score_after=after,
        )
        if witness.found:
            return witness
        if gap > best.gap:
            best = witness
    return EquivarianceWitness(
        found=False,
        attempts=budget,
        gap=best.gap,
        bank_q=best.bank_q,
        bank_k=best.bank_k,
        p_q=best.p_q,
        p_k=best.p_k,
        t=best.t,
        score_before=best.score_before,
        score_after=best.score_after,
    )
