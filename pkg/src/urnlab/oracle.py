"""Ground-truth absorption distributions.

Two independent routes: exact dynamic programming on the transition
recurrences (any size), and exhaustive weighted-path enumeration (tiny
instances only).  Both run in exact rational arithmetic for rational weight
sequences, so closed forms can be checked for literal equality.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .numerics import FLOAT, RATIONAL, falling_factorial
from .weights import MODEL_OKCORRAL, MODEL_SAMPLING, UrnSpec

ENUMERATION_LIMIT = 16


@dataclass(frozen=True)
class ExactDistribution:
    """Probabilities over a finite support: 0..n for two colors, the full
    k-grid for r colors.  In rational mode the probabilities sum to exactly 1."""

    support: tuple
    probs: dict
    mode: str = RATIONAL

    def __post_init__(self):
        if self.mode == RATIONAL:
            total = sum(self.probs.values(), Fraction(0))
            if total != 1:
                raise ValueError(f"probabilities sum to {total}, not 1")
            if any(p < 0 or p > 1 for p in self.probs.values()):
                raise ValueError("probability outside [0, 1]")

    def __getitem__(self, point):
        zero = Fraction(0) if self.mode == RATIONAL else 0.0
        return self.probs.get(point, zero)

    def items(self):
        for point in self.support:
            yield point, self[point]

    def total(self):
        return sum(self.probs.values())

    def moment(self, s: int):
        """Raw moment sum(k^s p) over a scalar support."""
        return sum(p * Fraction(k) ** s for k, p in self.items())

    def factorial_moment(self, s: int):
        return sum(p * falling_factorial(k, s) for k, p in self.items())

    def mixed_factorial_moment(self, svec):
        """sum over the grid of p * prod_j k_j^(s_j falling)."""
        acc = 0
        for kvec, p in self.items():
            term = p
            for k, s in zip(kvec, svec):
                term = term * falling_factorial(k, s)
            acc = acc + term
        return acc

    def mean(self):
        return self.moment(1)

    def to_jsonable(self, render=str):
        return [
            {"k": list(k) if isinstance(k, tuple) else k, "p": render(p)}
            for k, p in self.items()
        ]


def _two_color_coeffs(model, a_j, b_m):
    den = a_j + b_m
    if model == MODEL_SAMPLING:
        return a_j / den, b_m / den
    return b_m / den, a_j / den


def absorption_pmf_lattice(spec: UrnSpec) -> list:
    """DP fill of the whole (n+1) x (m+1) lattice for a two-color spec.

    Returns rows[mp][j] = tuple of P{k survivors | start (j, mp)} for
    k = 0..n, so one fill serves every smaller instance of the same weights.
    Memory is two rows of k-vectors (the DP frontier).
    """
    if not spec.is_two_color:
        raise ValueError("two-color spec required")
    n, m = spec.counts
    alpha = spec.A.table(n)
    beta = spec.B.table(m)
    zero = Fraction(0) if spec.mode == RATIONAL else 0.0
    one = Fraction(1) if spec.mode == RATIONAL else 1.0

    def unit(k):
        row = [zero] * (n + 1)
        row[k] = one
        return tuple(row)

    rows = [[unit(j) for j in range(n + 1)]]  # m' = 0: all whites survive
    prev = rows[0]
    for mp in range(1, m + 1):
        cur = [unit(0)]  # n' = 0: whites already gone
        for j in range(1, n + 1):
            pw, pb = _two_color_coeffs(spec.model, alpha[j], beta[mp])
            after_white = cur[j - 1]
            after_black = prev[j]
            cur.append(
                tuple(
                    pw * after_white[k] + pb * after_black[k]
                    for k in range(n + 1)
                )
            )
        rows.append(cur)
        prev = cur
    return rows


def absorption_pmf(spec: UrnSpec) -> ExactDistribution:
    """Distribution of surviving first-color balls for a two-color spec,
    by exact DP on the drawing recurrence."""
    lattice = absorption_pmf_lattice(spec)
    vec = lattice[spec.m][spec.n]
    support = tuple(range(spec.n + 1))
    return ExactDistribution(support, dict(zip(support, vec)), spec.mode)


def _drawing_weights(model, tables, state):
    r = len(state)
    if model == MODEL_SAMPLING:
        return [tables[j][state[j]] for j in range(r)]
    weights = []
    for ell in range(r):
        if state[ell] == 0:
            weights.append(0)
            continue
        w = 1
        for j in range(r):
            if j != ell and state[j] > 0:
                w = w * tables[j][state[j]]
        weights.append(w)
    return weights


def _absorbed(state):
    return state[-1] == 0 or all(c == 0 for c in state[:-1])


def _outcome(state):
    # at absorption either the last color is gone (survivors as counted)
    # or every other color is gone (all-zero outcome)
    if state[-1] == 0:
        return state[:-1]
    return (0,) * (len(state) - 1)


def absorption_pmf_multi(spec: UrnSpec) -> ExactDistribution:
    """Joint distribution of surviving type-1..r-1 balls when the last color
    runs out, for r >= 2 colors.  DP proceeds by total ball count so only
    one frontier layer of state distributions is alive at a time."""
    counts = spec.counts
    if counts[-1] < 1:
        raise ValueError("the last color needs at least one ball")
    tables = [seq.table(c) for seq, c in zip(spec.sequences, counts)]
    zero = Fraction(0) if spec.mode == RATIONAL else 0.0

    by_total = defaultdict(list)
    for state in product(*[range(c + 1) for c in counts]):
        by_total[sum(state)].append(state)

    prev_layer: dict = {}
    layer: dict = {}
    for total in range(sum(counts) + 1):
        layer = {}
        for state in by_total[total]:
            if _absorbed(state):
                layer[state] = {_outcome(state): zero + 1}
                continue
            weights = _drawing_weights(spec.model, tables, state)
            den = sum(weights)
            dist: dict = defaultdict(lambda: zero)
            for ell, w in enumerate(weights):
                if w == 0:
                    continue
                child = tuple(
                    c - 1 if j == ell else c for j, c in enumerate(state)
                )
                child_dist = prev_layer[child]
                coeff = w / den
                for k, p in child_dist.items():
                    dist[k] += coeff * p
            layer[state] = dict(dist)
        prev_layer = layer

    final = prev_layer[counts]
    support = tuple(product(*[range(c + 1) for c in counts[:-1]]))
    probs = {k: final.get(k, zero) for k in support}
    return ExactDistribution(support, probs, spec.mode)


def enumerate_pmf(spec: UrnSpec) -> ExactDistribution:
    """Sum weighted lattice paths by depth-first traversal.

    Exponential in the ball count; refused above ENUMERATION_LIMIT balls.
    Must agree exactly with the DP route wherever both run.
    """
    counts = spec.counts
    if sum(counts) > ENUMERATION_LIMIT:
        raise ValueError(
            f"instance too large: {sum(counts)} balls exceeds the "
            f"enumeration limit of {ENUMERATION_LIMIT}"
        )
    if counts[-1] < 1 and not spec.is_two_color:
        raise ValueError("the last color needs at least one ball")
    tables = [seq.table(c) for seq, c in zip(spec.sequences, counts)]
    zero = Fraction(0) if spec.mode == RATIONAL else 0.0
    out: dict = defaultdict(lambda: zero)

    def walk(state, weight):
        if _absorbed(state):
            out[_outcome(state)] += weight
            return
        weights = _drawing_weights(spec.model, tables, state)
        den = sum(weights)
        for ell, w in enumerate(weights):
            if w == 0:
                continue
            child = tuple(c - 1 if j == ell else c for j, c in enumerate(state))
            walk(child, weight * w / den)

    walk(counts, zero + 1)

    if spec.is_two_color:
        support = tuple(range(counts[0] + 1))
        probs = {k: out.get((k,), zero) for k in support}
    else:
        support = tuple(product(*[range(c + 1) for c in counts[:-1]]))
        probs = {k: out.get(k, zero) for k in support}
    return ExactDistribution(support, probs, spec.mode)
