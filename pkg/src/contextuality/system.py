"""Measurement systems: properties, contexts, bunches, and connections.

A *system* records, for every context, the joint distribution (a *bunch*)
of the properties measured together in that context.  The *connection* of a
property is the family of its single-variable marginals across the contexts
containing it.  Everything is exact: weights are `fractions.Fraction` and
validation rejects anything that is not a genuine probability distribution.

Outcome symbols are arbitrary hashable values (ints after file parsing,
but strings work too).  Binary fast paths elsewhere in the package require
the alphabet to be exactly the pair {+1, -1} of ints.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import (
    AlphabetMismatch,
    DuplicateOutcome,
    EmptyContext,
    InvalidPosition,
    NegativeWeight,
    NonBinaryAlphabet,
    NonNormalizedPmf,
    UnknownContext,
    UnknownProperty,
    ValidationError,
)

Symbol = Union[int, str]
Outcome = tuple  # tuple of Symbol
RationalLike = Union[Fraction, int, str]

PLUS_MINUS = (1, -1)

ONE = Fraction(1)
ZERO = Fraction(0)


def as_fraction(x: RationalLike) -> Fraction:
    """Convert exactly; accepts Fraction, int, and 'num/den' or decimal strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise ValidationError(
            f"refusing inexact float {x!r}; pass a Fraction or a string"
        )
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"not a rational number: {x!r}") from exc


def is_plus_minus(alphabet: Sequence[Symbol]) -> bool:
    return len(alphabet) == 2 and set(alphabet) == {1, -1}


class Pmf:
    """Probability mass function over a product of finite alphabets.

    `alphabets` is a tuple of per-position alphabets (ordered, no duplicate
    symbols).  Weights are exact rationals, nonnegative, summing to one.
    Zero-weight atoms are dropped; iteration follows the lexicographic order
    induced by the declared alphabet orders.
    """

    __slots__ = ("alphabets", "_weights")

    def __init__(
        self,
        alphabets: Sequence[Sequence[Symbol]],
        weights: Union[Mapping[Outcome, RationalLike], Iterable[tuple[Outcome, RationalLike]]],
    ):
        alphas = tuple(tuple(a) for a in alphabets)
        if not alphas:
            raise ValidationError("pmf needs at least one position")
        for a in alphas:
            if not a:
                raise ValidationError("empty alphabet")
            if len(set(a)) != len(a):
                raise DuplicateOutcome(f"duplicate symbol in alphabet {a}")
        items = weights.items() if isinstance(weights, Mapping) else weights
        acc: dict[Outcome, Fraction] = {}
        for outcome, w in items:
            key = tuple(outcome) if isinstance(outcome, (tuple, list)) else (outcome,)
            if len(key) != len(alphas):
                raise AlphabetMismatch(
                    f"outcome {key} has {len(key)} positions, expected {len(alphas)}"
                )
            for sym, a in zip(key, alphas):
                if sym not in a:
                    raise AlphabetMismatch(f"symbol {sym!r} not in alphabet {a}")
            if key in acc:
                raise DuplicateOutcome(f"outcome {key} listed twice")
            wf = as_fraction(w)
            if wf < 0:
                raise NegativeWeight(f"weight {wf} of outcome {key} is negative")
            acc[key] = wf
        total = sum(acc.values(), ZERO)
        if total != 1:
            raise NonNormalizedPmf(f"weights sum to {total}, expected 1")
        self.alphabets = alphas
        self._weights = {k: v for k, v in acc.items() if v != 0}

    # -- mapping-style access ------------------------------------------------
    def __getitem__(self, outcome) -> Fraction:
        key = tuple(outcome) if isinstance(outcome, (tuple, list)) else (outcome,)
        return self._weights.get(key, ZERO)

    def atoms(self) -> Iterable[Outcome]:
        """All outcomes of the declared product alphabet, lexicographic."""
        return itertools.product(*self.alphabets)

    def items(self) -> list[tuple[Outcome, Fraction]]:
        """Nonzero (outcome, weight) pairs in lexicographic order."""
        order = {a: {s: i for i, s in enumerate(a)} for a in self.alphabets}
        key = lambda kv: tuple(order[a][s] for s, a in zip(kv[0], self.alphabets))
        return sorted(self._weights.items(), key=key)

    def support(self) -> list[Outcome]:
        return [o for o, _ in self.items()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pmf):
            return NotImplemented
        return self.alphabets == other.alphabets and self._weights == other._weights

    def __hash__(self):
        return hash((self.alphabets, frozenset(self._weights.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{o}: {w}" for o, w in self.items())
        return f"Pmf({{{body}}})"

    # -- operations ------------------------------------------------------------
    def marginal(self, keep: Sequence[int]) -> "Pmf":
        """Exact marginal on the positions in `keep`, in the given order."""
        keep = tuple(keep)
        if not keep:
            raise InvalidPosition("keep must be nonempty")
        n = len(self.alphabets)
        if len(set(keep)) != len(keep) or any(not (0 <= i < n) for i in keep):
            raise InvalidPosition(f"invalid positions {keep} for {n}-position pmf")
        out: dict[Outcome, Fraction] = {}
        for outcome, w in self._weights.items():
            sub = tuple(outcome[i] for i in keep)
            out[sub] = out.get(sub, ZERO) + w
        return Pmf([self.alphabets[i] for i in keep], out)


def marginal(pmf: Pmf, keep: Sequence[int]) -> Pmf:
    return pmf.marginal(keep)


def point_mass(alphabets: Sequence[Sequence[Symbol]], outcome: Outcome) -> Pmf:
    return Pmf(alphabets, {tuple(outcome): ONE})


@dataclass(frozen=True)
class Property:
    """A measurable property with its finite outcome alphabet."""

    id: str
    alphabet: tuple[Symbol, ...]

    def __post_init__(self):
        _check_id(self.id, "property")
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if len(self.alphabet) < 2:
            raise ValidationError(f"property {self.id}: alphabet must have >= 2 symbols")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise DuplicateOutcome(f"property {self.id}: duplicate symbols")


@dataclass(frozen=True)
class Context:
    """A set of properties measured jointly, in a fixed order."""

    id: str
    properties: tuple[str, ...]

    def __post_init__(self):
        _check_id(self.id, "context")
        object.__setattr__(self, "properties", tuple(self.properties))
        if not self.properties:
            raise EmptyContext(f"context {self.id} lists no properties")
        if len(set(self.properties)) != len(self.properties):
            raise DuplicateOutcome(f"context {self.id}: duplicate property")


def _check_id(ident: str, kind: str) -> None:
    if not ident or any(ch.isspace() for ch in ident):
        raise ValidationError(f"{kind} id {ident!r} must be nonempty without whitespace")


@dataclass(frozen=True)
class Connection:
    """Per-context single-variable marginals of one property."""

    property_id: str
    contexts: tuple[str, ...]
    marginals: tuple[Pmf, ...]


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    max_tv: dict[str, Fraction]  # property id -> largest pairwise TV in its connection


class System:
    """A validated measurement system.

    Construction checks every invariant (one normalized bunch per context,
    contexts referencing known properties, every property used somewhere)
    and canonicalizes: properties and contexts are sorted by id, and each
    bunch is re-expressed over its context's alphabets.  Instances are
    immutable; all derived indices are precomputed.
    """

    __slots__ = ("properties", "contexts", "bunches", "property_index",
                 "context_index", "contexts_of")

    def __init__(
        self,
        properties: Iterable[Property],
        contexts: Iterable[Context],
        bunches: Mapping[str, Pmf],
    ):
        props = sorted(properties, key=lambda p: p.id)
        ctxs = sorted(contexts, key=lambda c: c.id)
        if len({p.id for p in props}) != len(props):
            raise ValidationError("duplicate property id")
        if len({c.id for c in ctxs}) != len(ctxs):
            raise ValidationError("duplicate context id")
        pindex = {p.id: i for i, p in enumerate(props)}
        used: set[str] = set()
        for c in ctxs:
            for pid in c.properties:
                if pid not in pindex:
                    raise UnknownProperty(f"context {c.id} references unknown property {pid!r}")
                used.add(pid)
        missing = [p.id for p in props if p.id not in used]
        if missing:
            raise ValidationError(f"properties in no context: {missing}")
        fixed: dict[str, Pmf] = {}
        for c in ctxs:
            if c.id not in bunches:
                raise ValidationError(f"missing bunch for context {c.id}")
            pmf = bunches[c.id]
            expected = tuple(props[pindex[pid]].alphabet for pid in c.properties)
            if pmf.alphabets != expected:
                raise AlphabetMismatch(
                    f"bunch for {c.id}: alphabets {pmf.alphabets} != context's {expected}"
                )
            fixed[c.id] = pmf
        extra = set(bunches) - {c.id for c in ctxs}
        if extra:
            raise UnknownContext(f"bunches for unknown contexts: {sorted(extra)}")

        self.properties: tuple[Property, ...] = tuple(props)
        self.contexts: tuple[Context, ...] = tuple(ctxs)
        self.bunches: dict[str, Pmf] = fixed
        self.property_index: dict[str, int] = pindex
        self.context_index: dict[str, int] = {c.id: i for i, c in enumerate(ctxs)}
        co: dict[str, list[str]] = {p.id: [] for p in props}
        for c in ctxs:
            for pid in c.properties:
                co[pid].append(c.id)
        self.contexts_of: dict[str, tuple[str, ...]] = {k: tuple(v) for k, v in co.items()}

    # -- lookups ----------------------------------------------------------------
    def property(self, pid: str) -> Property:
        try:
            return self.properties[self.property_index[pid]]
        except KeyError:
            raise UnknownProperty(f"unknown property {pid!r}") from None

    def context(self, cid: str) -> Context:
        try:
            return self.contexts[self.context_index[cid]]
        except KeyError:
            raise UnknownContext(f"unknown context {cid!r}") from None

    def bunch(self, cid: str) -> Pmf:
        self.context(cid)
        return self.bunches[cid]

    def context_alphabets(self, cid: str) -> tuple[tuple[Symbol, ...], ...]:
        return tuple(self.property(pid).alphabet for pid in self.context(cid).properties)

    def __eq__(self, other) -> bool:
        if not isinstance(other, System):
            return NotImplemented
        return (self.properties == other.properties
                and self.contexts == other.contexts
                and self.bunches == other.bunches)

    def __repr__(self) -> str:
        return (f"System({len(self.properties)} properties, "
                f"{len(self.contexts)} contexts)")


def validate_system(
    properties: Iterable[Property],
    contexts: Iterable[Context],
    bunches: Mapping[str, Pmf],
) -> System:
    """Validate raw pieces and return the canonical immutable system."""
    return System(properties, contexts, bunches)


def connection_of(sys: System, pid: str) -> Connection:
    """Marginals of property `pid` in each context containing it."""
    sys.property(pid)
    cids = sys.contexts_of[pid]
    margs = []
    for cid in cids:
        ctx = sys.context(cid)
        pos = ctx.properties.index(pid)
        margs.append(sys.bunches[cid].marginal([pos]))
    return Connection(pid, cids, tuple(margs))


def consistency_report(sys: System) -> ConsistencyReport:
    """Check consistent connectedness; report the worst TV gap per property.

    The system is consistently connected iff every property's marginals
    agree exactly across its contexts (max pairwise total variation 0).
    """
    from .analytic import tv_distance  # local import to avoid a cycle

    max_tv: dict[str, Fraction] = {}
    consistent = True
    for p in sys.properties:
        conn = connection_of(sys, p.id)
        worst = ZERO
        for a, b in itertools.combinations(conn.marginals, 2):
            worst = max(worst, tv_distance(a, b))
        max_tv[p.id] = worst
        if worst != 0:
            consistent = False
    return ConsistencyReport(consistent, max_tv)


def _require_plus_minus(pmf: Pmf, positions: int) -> None:
    if len(pmf.alphabets) != positions:
        raise NonBinaryAlphabet(
            f"expected a {positions}-variable pmf, got {len(pmf.alphabets)} positions"
        )
    for a in pmf.alphabets:
        if not is_plus_minus(a):
            raise NonBinaryAlphabet(f"alphabet {a} is not the pair {{+1, -1}}")


def expectation(pmf: Pmf) -> Fraction:
    """Mean of a single +/-1-valued variable."""
    _require_plus_minus(pmf, 1)
    return sum((w * o[0] for o, w in pmf.items()), ZERO)


def product_expectation(pmf: Pmf) -> Fraction:
    """Mean of the product of the components of a +/-1-valued pair."""
    _require_plus_minus(pmf, 2)
    return sum((w * o[0] * o[1] for o, w in pmf.items()), ZERO)
