"""Closed-form measure components, with small LPs for general alphabets.

The quantities here are the building blocks of the contextuality measures:

* maximal coupling probability of a family of same-alphabet marginals,
  sum over outcomes of the smallest probability assigned by any marginal;
* total variation distance, 1 minus the maximal coupling probability of a
  pair (equivalently half the L1 distance, and half the absolute difference
  of means for +/-1-valued variables);
* the per-property floor `delta_p`: the smallest achievable sum of TV
  distances from one approximating distribution to all marginals of a
  connection (for +/-1 variables this is an L1 median problem, solved by
  the median of the means; general alphabets go through a small LP);
* the per-context minimal mismatch between a bunch and an approximating
  bunch over all couplings (closed form for two binary properties,
  otherwise an optimal-transport LP with Hamming cost).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import (
    AlphabetMismatch,
    MeanOutOfRange,
    ShapeMismatch,
    UnrealizableStats,
)
from .lp import LinearProgram, solve_certified
from .system import (
    Pmf,
    System,
    connection_of,
    expectation,
    is_plus_minus,
    product_expectation,
)

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Couplings of marginals
# ---------------------------------------------------------------------------

def max_coupling_probability(marginals: Sequence[Pmf]) -> Fraction:
    """Largest achievable probability that coupled copies all agree."""
    if len(marginals) < 2:
        raise AlphabetMismatch("need at least two marginals")
    alphas = marginals[0].alphabets
    for m in marginals[1:]:
        if m.alphabets != alphas:
            raise AlphabetMismatch(f"alphabets differ: {m.alphabets} vs {alphas}")
    total = ZERO
    for atom in marginals[0].atoms():
        total += min(m[atom] for m in marginals)
    return total


def tv_distance(a: Pmf, b: Pmf) -> Fraction:
    """Total variation distance = 1 - maximal coupling probability."""
    return ONE - max_coupling_probability([a, b])


def pmf_from_mean(mean: Fraction) -> Pmf:
    """The +/-1-valued pmf with the given expectation."""
    mean = Fraction(mean)
    if not -1 <= mean <= 1:
        raise MeanOutOfRange(f"mean {mean} outside [-1, 1]")
    return Pmf([(1, -1)], {(1,): (1 + mean) / 2, (-1,): (1 - mean) / 2})


# ---------------------------------------------------------------------------
# Binary pair statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BinaryStats:
    """Means and product expectation of a +/-1-valued pair.

    Validity requires the standard realizability bounds
    |mean1 + mean2| - 1 <= product <= 1 - |mean1 - mean2|,
    which are exactly nonnegativity of the four joint atoms.
    """

    mean1: Fraction
    mean2: Fraction
    product: Fraction

    def __post_init__(self):
        for name in ("mean1", "mean2", "product"):
            v = Fraction(getattr(self, name))
            object.__setattr__(self, name, v)
            if not -1 <= v <= 1:
                raise MeanOutOfRange(f"{name}={v} outside [-1, 1]")
        if not abs(self.mean1 + self.mean2) - 1 <= self.product <= 1 - abs(self.mean1 - self.mean2):
            raise UnrealizableStats(
                f"no +/-1 pair has means ({self.mean1}, {self.mean2}) "
                f"and product mean {self.product}"
            )

    @classmethod
    def from_pmf(cls, pmf: Pmf) -> "BinaryStats":
        return cls(
            mean1=expectation(pmf.marginal([0])),
            mean2=expectation(pmf.marginal([1])),
            product=product_expectation(pmf),
        )

    def to_pmf(self) -> Pmf:
        weights = {}
        for a, b in itertools.product((1, -1), repeat=2):
            weights[(a, b)] = (1 + a * self.mean1 + b * self.mean2 + a * b * self.product) / 4
        return Pmf([(1, -1), (1, -1)], weights)


def cyclic2_min_partial(q: BinaryStats, r: BinaryStats) -> Fraction:
    """Minimal mismatch sum for one two-binary-property context.

    Over all couplings of two bunches with these statistics, the smallest
    possible value of Pr[first components differ] + Pr[second differ].
    """
    return HALF * max(
        abs(q.product - r.product),
        abs(q.mean1 - r.mean1) + abs(q.mean2 - r.mean2),
    )


# ---------------------------------------------------------------------------
# Per-property floor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MedianResult:
    """Median interval of the connection means and the floor it attains.

    Every q in [lo, hi] minimizes half the summed absolute deviations; the
    canonical representative is the interval midpoint.
    """

    lo: Fraction
    hi: Fraction
    delta_p: Fraction

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


@dataclass(frozen=True)
class DeltaP:
    value: Fraction
    optimizer: Union[Pmf, MedianResult]


def median_binary(means: Sequence[Fraction]) -> MedianResult:
    """L1-optimal approximating mean for a binary connection."""
    if not means:
        raise MeanOutOfRange("empty list of means")
    vals = [Fraction(m) for m in means]
    for v in vals:
        if not -1 <= v <= 1:
            raise MeanOutOfRange(f"mean {v} outside [-1, 1]")
    vals.sort()
    n = len(vals)
    if n % 2:
        lo = hi = vals[n // 2]
    else:
        lo, hi = vals[n // 2 - 1], vals[n // 2]
    delta = HALF * sum((abs(v - lo) for v in vals), ZERO)
    return MedianResult(lo, hi, delta)


def delta_p(sys: System, pid: str) -> DeltaP:
    """Smallest sum of TV distances from one distribution to a connection.

    +/-1 alphabets use the median characterization; anything else solves
    the equivalent small LP (see delta_p_via_lp).
    """
    prop = sys.property(pid)
    conn = connection_of(sys, pid)
    if is_plus_minus(prop.alphabet):
        med = median_binary([expectation(m) for m in conn.marginals])
        return DeltaP(med.delta_p, med)
    return delta_p_via_lp(sys, pid)


def build_delta_p_lp(sys: System, pid: str) -> LinearProgram:
    """Program for delta_p over any finite alphabet.

    Variables: the approximating distribution q (first |alphabet| columns,
    in alphabet order) plus one coupling block per context; each block's
    q-side marginal is tied to q and its other marginal to the observed
    one, with mismatch mass as cost.
    """
    prop = sys.property(pid)
    conn = connection_of(sys, pid)
    alpha = prop.alphabet
    names: list[str] = [f"q[{_sym(s)}]" for s in alpha]
    cost: list[Fraction] = [ZERO] * len(alpha)
    col = {("q", s): j for j, s in enumerate(alpha)}
    for cid in conn.contexts:
        for x in alpha:
            for y in alpha:
                col[("w", cid, x, y)] = len(names)
                names.append(f"w[{cid}][{_sym(x)}|{_sym(y)}]")
                cost.append(ZERO if x == y else ONE)
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for cid, marg in zip(conn.contexts, conn.marginals):
        for y in alpha:  # observed-side marginal fixed by the data
            rows.append({col[("w", cid, x, y)]: ONE for x in alpha})
            rhs.append(marg[(y,)])
        for x in alpha:  # q-side marginal tied to the shared q block
            row = {col[("w", cid, x, y)]: ONE for y in alpha}
            row[col[("q", x)]] = -ONE
            rows.append(row)
            rhs.append(ZERO)
    return LinearProgram(tuple(names), tuple(cost), tuple(rows), tuple(rhs))


def delta_p_via_lp(sys: System, pid: str) -> DeltaP:
    """LP route for delta_p; the optimizer is read off the q block."""
    alpha = sys.property(pid).alphabet
    lp = build_delta_p_lp(sys, pid)
    sol = solve_certified(lp)
    q = Pmf([alpha], {(s,): sol.primal[j] for j, s in enumerate(alpha)})
    return DeltaP(sol.objective, q)


def delta0_present(sys: System) -> Fraction:
    """Sum of the per-property floors delta_p."""
    return sum((delta_p(sys, p.id).value for p in sys.properties), ZERO)


def delta0_cbd(sys: System) -> Fraction:
    """Per-property minimal disagreement mass over couplings of connections.

    Each property with two or more contexts contributes 1 minus the maximal
    coupling probability of its connection.
    """
    total = ZERO
    for p in sys.properties:
        conn = connection_of(sys, p.id)
        if len(conn.marginals) >= 2:
            total += ONE - max_coupling_probability(conn.marginals)
    return total


# ---------------------------------------------------------------------------
# Per-context minima and the bunch-set distance
# ---------------------------------------------------------------------------

def _sym(s) -> str:
    return str(s)


def hamming(u: tuple, v: tuple) -> int:
    return sum(1 for a, b in zip(u, v) if a != b)


def coupling_mismatch_lp(observed: Pmf, approx: Pmf) -> LinearProgram:
    """Transport program between two same-alphabet joints, Hamming cost."""
    if observed.alphabets != approx.alphabets:
        raise AlphabetMismatch(
            f"alphabets differ: {observed.alphabets} vs {approx.alphabets}"
        )
    atoms = list(observed.atoms())
    names = []
    cost = []
    for u in atoms:
        for v in atoms:
            names.append(f"w[{','.join(map(_sym, u))}|{','.join(map(_sym, v))}]")
            cost.append(Fraction(hamming(u, v)))
    na = len(atoms)
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for i, u in enumerate(atoms):
        rows.append({i * na + j: ONE for j in range(na)})
        rhs.append(observed[u])
    for j, v in enumerate(atoms):
        rows.append({i * na + j: ONE for i in range(na)})
        rhs.append(approx[v])
    return LinearProgram(tuple(names), tuple(cost), tuple(rows), tuple(rhs))


def min_mismatch(observed: Pmf, approx: Pmf, force_lp: bool = False) -> Fraction:
    """Minimal expected number of disagreeing positions over all couplings.

    Single variables reduce to TV distance; two +/-1-valued variables use
    the cyclic-2 closed form; everything else (or force_lp=True) solves the
    transport LP.
    """
    if observed.alphabets != approx.alphabets:
        raise AlphabetMismatch(
            f"alphabets differ: {observed.alphabets} vs {approx.alphabets}"
        )
    if not force_lp:
        if len(observed.alphabets) == 1:
            return tv_distance(observed, approx)
        if len(observed.alphabets) == 2 and all(
            is_plus_minus(a) for a in observed.alphabets
        ):
            return cyclic2_min_partial(
                BinaryStats.from_pmf(approx), BinaryStats.from_pmf(observed)
            )
    return solve_certified(coupling_mismatch_lp(observed, approx)).objective


def per_context_min_delta(
    sys: System, q_joint: Pmf, cid: str, force_lp: bool = False
) -> Fraction:
    """Minimal mismatch sum in one context against a joint approximator.

    `q_joint` must be a distribution over the full property tuple in
    canonical (sorted-by-id) property order; its marginal on the context's
    properties plays the approximating bunch.
    """
    expected = tuple(p.alphabet for p in sys.properties)
    if q_joint.alphabets != expected:
        raise ShapeMismatch(
            f"q_joint alphabets {q_joint.alphabets} do not match the "
            f"system's property alphabets {expected}"
        )
    ctx = sys.context(cid)
    positions = [sys.property_index[pid] for pid in ctx.properties]
    return min_mismatch(sys.bunch(cid), q_joint.marginal(positions), force_lp)


def bunch_set_distance(a: System, b: System, force_lp: bool = False) -> Fraction:
    """Sum over contexts of the per-context minimal mismatch.

    This is a metric on systems sharing properties and contexts: zero iff
    all bunch distributions coincide, symmetric, triangle inequality.
    """
    if [c.id for c in a.contexts] != [c.id for c in b.contexts]:
        raise ShapeMismatch("systems have different contexts")
    return sum(
        (min_mismatch(a.bunch(c.id), b.bunch(c.id), force_lp) for c in a.contexts),
        ZERO,
    )
