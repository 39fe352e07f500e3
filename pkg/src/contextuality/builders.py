"""Compilation of contextuality measures into exact linear programs.

Four program families over a shared canonical layout (joint block first,
then per-context coupling blocks in context order, atoms lexicographic):

* ``present`` - one nonnegative joint over all properties plus, per context,
  a coupling of the observed bunch with the joint's marginal there; cost is
  the total mass on disagreeing positions.  The optimum is the smallest
  distance from the data to any single-indexed approximating system.
* ``cbd`` - one joint coupling of all bunches at once (a column per
  assignment of an outcome tuple to every context); cost is the per-property
  mass where a connection's copies are not all equal.
* ``np`` - a signed joint over all properties, split into positive and
  negative parts, constrained to reproduce every bunch; cost is the total
  negative mass.  Requires consistent connectedness.
* ``np_inside`` - signed joint plus coupling blocks; the couplings force
  every context marginal of the signed joint to be a proper distribution
  and pin the approximation distance to its floor, while minimizing the
  negative mass.  Infeasible when no optimally-approximating signed joint
  exists.

``fixed_model`` couples the data against one externally supplied
consistently connected model (no free joint block).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .analytic import delta0_cbd, delta0_present, hamming
from .errors import (
    AlphabetTooLarge,
    InconsistentlyConnected,
    ModelNotConsistentlyConnected,
    ShapeMismatch,
    ValidationError,
)
from .lp import LinearProgram, solve_certified
from .system import Pmf, System, consistency_report

ZERO = Fraction(0)
ONE = Fraction(1)

METHODS = ("present", "cbd", "np", "np_inside", "fixed_model")

DEFAULT_ATOM_CAP = 1 << 20


@dataclass(frozen=True)
class MeasureReport:
    """Result of one measure computation.

    ``measure`` equals ``delta - delta0``; for the negative-probability
    methods the baseline is zero, so the measure is the negative mass
    itself.  ``witness`` is the nonzero part of the optimal primal point,
    keyed by variable name.  Reports are only emitted after the exact
    certificate check passes, so ``certified`` is always True.
    """

    method: str
    delta: Fraction
    delta0: Fraction
    measure: Fraction
    noncontextual: bool
    witness: dict[str, Fraction]
    certified: bool

    def __post_init__(self):
        assert self.measure == self.delta - self.delta0 >= 0
        assert self.noncontextual == (self.measure == 0)


@dataclass(frozen=True)
class ProblemSizes:
    method: str
    variable_count: int
    equality_count: int
    inequality_count: int


def _atom_label(atom: tuple) -> str:
    return ",".join(str(s) for s in atom)


def _joint_atoms(sys: System, cap: int) -> list[tuple]:
    sizes = [len(p.alphabet) for p in sys.properties]
    count = math.prod(sizes)
    if count > cap:
        raise AlphabetTooLarge(
            f"joint over all properties has {count} atoms (cap {cap})"
        )
    return list(itertools.product(*(p.alphabet for p in sys.properties)))


def _context_atoms(sys: System, cid: str) -> list[tuple]:
    return list(itertools.product(*sys.context_alphabets(cid)))


def _restriction(sys: System, cid: str):
    """Map a full-property atom to its sub-atom on the context's properties."""
    ctx = sys.context(cid)
    positions = [sys.property_index[pid] for pid in ctx.properties]
    return lambda atom: tuple(atom[k] for k in positions)


def build_present_lp(sys: System, max_joint_atoms: int = DEFAULT_ATOM_CAP) -> LinearProgram:
    """Program whose optimum is the minimal approximating-system distance."""
    joint = _joint_atoms(sys, max_joint_atoms)
    names = [f"q[{_atom_label(z)}]" for z in joint]
    cost: list[Fraction] = [ZERO] * len(joint)
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for ctx in sys.contexts:
        atoms = _context_atoms(sys, ctx.id)
        restrict = _restriction(sys, ctx.id)
        fibers: dict[tuple, list[int]] = {v: [] for v in atoms}
        for j, z in enumerate(joint):
            fibers[restrict(z)].append(j)
        base = len(names)
        na = len(atoms)
        for u in atoms:
            for v in atoms:
                names.append(f"w[{ctx.id}][{_atom_label(u)}|{_atom_label(v)}]")
                cost.append(Fraction(hamming(u, v)))
        bunch = sys.bunch(ctx.id)
        for i, u in enumerate(atoms):  # observed-side marginal = data
            rows.append({base + i * na + j: ONE for j in range(na)})
            rhs.append(bunch[u])
        for j, v in enumerate(atoms):  # approximating-side marginal = joint
            row = {base + i * na + j: ONE for i in range(na)}
            for qcol in fibers[v]:
                row[qcol] = -ONE
            rows.append(row)
            rhs.append(ZERO)
    return LinearProgram(tuple(names), tuple(cost), tuple(rows), tuple(rhs))


def build_cbd_lp(sys: System, max_joint_atoms: int = DEFAULT_ATOM_CAP) -> LinearProgram:
    """Program whose optimum is the minimal total connection disagreement."""
    ctx_atoms = [_context_atoms(sys, c.id) for c in sys.contexts]
    count = math.prod(len(a) for a in ctx_atoms)
    if count > max_joint_atoms:
        raise AlphabetTooLarge(
            f"coupling of all bunches has {count} atoms (cap {max_joint_atoms})"
        )
    # Where each property sits inside each of its contexts.
    slots: list[list[tuple[int, int]]] = []
    for p in sys.properties:
        where = []
        for t, ctx in enumerate(sys.contexts):
            if p.id in ctx.properties:
                where.append((t, ctx.properties.index(p.id)))
        slots.append(where)
    names: list[str] = []
    cost: list[Fraction] = []
    buckets: dict[tuple[int, tuple], dict[int, Fraction]] = {}
    for t, atoms in enumerate(ctx_atoms):
        for u in atoms:
            buckets[(t, u)] = {}
    for col, assign in enumerate(itertools.product(*ctx_atoms)):
        names.append("z[" + ";".join(_atom_label(u) for u in assign) + "]")
        broken = 0
        for where in slots:
            if len(where) < 2:
                continue
            first = assign[where[0][0]][where[0][1]]
            if any(assign[t][k] != first for t, k in where[1:]):
                broken += 1
        cost.append(Fraction(broken))
        for t, u in enumerate(assign):
            buckets[(t, u)][col] = ONE
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for t, ctx in enumerate(sys.contexts):
        bunch = sys.bunch(ctx.id)
        for u in ctx_atoms[t]:
            rows.append(buckets[(t, u)])
            rhs.append(bunch[u])
    return LinearProgram(tuple(names), tuple(cost), tuple(rows), tuple(rhs))


def build_np_lp(sys: System, max_joint_atoms: int = DEFAULT_ATOM_CAP) -> LinearProgram:
    """Program whose optimum is the minimal negative mass of a signed joint.

    Only defined for consistently connected systems.  The unit-total-mass
    condition is implied by any one context's marginal rows, so no separate
    normalization row is added.
    """
    if not consistency_report(sys).consistent:
        raise InconsistentlyConnected(
            "a signed joint with context marginals equal to the bunches "
            "requires consistent connectedness"
        )
    joint = _joint_atoms(sys, max_joint_atoms)
    n = len(joint)
    names = [f"pos[{_atom_label(z)}]" for z in joint]
    names += [f"neg[{_atom_label(z)}]" for z in joint]
    cost = [ZERO] * n + [ONE] * n
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for ctx in sys.contexts:
        atoms = _context_atoms(sys, ctx.id)
        restrict = _restriction(sys, ctx.id)
        fibers: dict[tuple, list[int]] = {v: [] for v in atoms}
        for j, z in enumerate(joint):
            fibers[restrict(z)].append(j)
        bunch = sys.bunch(ctx.id)
        for v in atoms:
            row: dict[int, Fraction] = {}
            for j in fibers[v]:
                row[j] = ONE
                row[n + j] = -ONE
            rows.append(row)
            rhs.append(bunch[v])
    return LinearProgram(tuple(names), tuple(cost), tuple(rows), tuple(rhs))


def build_np_inside_lp(
    sys: System, delta0: Fraction, max_joint_atoms: int = DEFAULT_ATOM_CAP
) -> LinearProgram:
    """Minimal negative mass over optimally-approximating signed joints.

    `delta0` must be the per-property floor of the system; the distance
    expression is pinned to it through one slack variable (the distance can
    never go below the floor, so the inequality binds exactly).  The
    coupling blocks are nonnegative, which forces every context marginal of
    the signed joint to be a proper distribution.
    """
    joint = _joint_atoms(sys, max_joint_atoms)
    n = len(joint)
    names = [f"pos[{_atom_label(z)}]" for z in joint]
    names += [f"neg[{_atom_label(z)}]" for z in joint]
    cost: list[Fraction] = [ZERO] * n + [ONE] * n
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    delta_row: dict[int, Fraction] = {}
    for ctx in sys.contexts:
        atoms = _context_atoms(sys, ctx.id)
        restrict = _restriction(sys, ctx.id)
        fibers: dict[tuple, list[int]] = {v: [] for v in atoms}
        for j, z in enumerate(joint):
            fibers[restrict(z)].append(j)
        base = len(names)
        na = len(atoms)
        for u in atoms:
            for v in atoms:
                names.append(f"w[{ctx.id}][{_atom_label(u)}|{_atom_label(v)}]")
                cost.append(ZERO)
                h = hamming(u, v)
                if h:
                    delta_row[len(names) - 1] = Fraction(h)
        bunch = sys.bunch(ctx.id)
        for i, u in enumerate(atoms):
            rows.append({base + i * na + j: ONE for j in range(na)})
            rhs.append(bunch[u])
        for j, v in enumerate(atoms):
            row = {base + i * na + j: ONE for i in range(na)}
            for z in fibers[v]:
                row[z] = -ONE
                row[n + z] = ONE
            rows.append(row)
            rhs.append(ZERO)
    names.append("slack")
    cost.append(ZERO)
    delta_row[len(names) - 1] = ONE
    rows.append(delta_row)
    rhs.append(Fraction(delta0))
    return LinearProgram(tuple(names), tuple(cost), tuple(rows), tuple(rhs))


def build_fixed_model_lp(sys: System, model: Mapping[str, Pmf]) -> LinearProgram:
    """Distance from the data to one fixed consistently connected model."""
    want = {c.id for c in sys.contexts}
    have = set(model)
    if want != have:
        raise ShapeMismatch(
            f"model contexts {sorted(have)} do not match system contexts {sorted(want)}"
        )
    try:
        model_sys = System(sys.properties, sys.contexts, dict(model))
    except ValidationError as exc:
        raise ShapeMismatch(f"model does not fit the system: {exc}") from exc
    if not consistency_report(model_sys).consistent:
        raise ModelNotConsistentlyConnected(
            "approximating model must have context-independent marginals"
        )
    names: list[str] = []
    cost: list[Fraction] = []
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for ctx in sys.contexts:
        atoms = _context_atoms(sys, ctx.id)
        base = len(names)
        na = len(atoms)
        for u in atoms:
            for v in atoms:
                names.append(f"w[{ctx.id}][{_atom_label(u)}|{_atom_label(v)}]")
                cost.append(Fraction(hamming(u, v)))
        bunch = sys.bunch(ctx.id)
        mpmf = model[ctx.id]
        for i, u in enumerate(atoms):
            rows.append({base + i * na + j: ONE for j in range(na)})
            rhs.append(bunch[u])
        for j, v in enumerate(atoms):
            rows.append({base + i * na + j: ONE for i in range(na)})
            rhs.append(mpmf[v])
    return LinearProgram(tuple(names), tuple(cost), tuple(rows), tuple(rhs))


def build_lp(
    sys: System,
    method: str,
    model: Optional[Mapping[str, Pmf]] = None,
    max_joint_atoms: int = DEFAULT_ATOM_CAP,
) -> LinearProgram:
    """Build the program for any supported method (dispatch helper)."""
    if method == "present":
        return build_present_lp(sys, max_joint_atoms)
    if method == "cbd":
        return build_cbd_lp(sys, max_joint_atoms)
    if method == "np":
        return build_np_lp(sys, max_joint_atoms)
    if method == "np_inside":
        return build_np_inside_lp(sys, delta0_present(sys), max_joint_atoms)
    if method == "fixed_model":
        if model is None:
            raise ShapeMismatch("fixed_model requires a model")
        return build_fixed_model_lp(sys, model)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def measure(
    sys: System,
    method: str,
    model: Optional[Mapping[str, Pmf]] = None,
    max_joint_atoms: int = DEFAULT_ATOM_CAP,
) -> MeasureReport:
    """Build, solve exactly, certify, and compare against the baseline.

    For ``present``/``cbd``/``fixed_model`` the measure is the excess of
    the optimal distance over the floor forced by the marginals alone; for
    ``np``/``np_inside`` it is the minimal negative mass (baseline zero).
    """
    lp = build_lp(sys, method, model=model, max_joint_atoms=max_joint_atoms)
    if method in ("present", "fixed_model"):
        delta0 = delta0_present(sys)
    elif method == "cbd":
        delta0 = delta0_cbd(sys)
    else:
        delta0 = ZERO
    sol = solve_certified(lp)
    delta = sol.objective
    return MeasureReport(
        method=method,
        delta=delta,
        delta0=delta0,
        measure=delta - delta0,
        noncontextual=(delta == delta0),
        witness=sol.named_primal(lp),
        certified=True,
    )


def problem_sizes(m: int, n: int) -> list[ProblemSizes]:
    """Program dimensions for a binary system with m-by-n paired contexts.

    The coupling-of-all-bunches program has 4**(m*n) columns (each of the
    m*n contexts contributes a factor of 4, its number of outcome pairs).
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    mn = m * n
    return [
        ProblemSizes("cbd", 4**mn, 4 * mn, 0),
        ProblemSizes("np", 2 ** (m + n + 1), 4 * mn, 0),
        ProblemSizes("present", 2 ** (m + n) + 16 * mn, 8 * mn, 0),
    ]
