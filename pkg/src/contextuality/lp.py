"""Exact rational linear programming.

Standard form only: minimize c'x subject to Ax = b, x >= 0, with equality
rows and named columns.  The solver is a dense two-phase simplex over exact
rationals with Bland's pivoting rule (anti-cycling, deterministic given the
column order).  Optimal solutions carry a primal vector, a dual vector, and
the optimal basis, so optimality can be re-verified independently:
primal feasibility, dual feasibility (y'A <= c'), and zero duality gap.

Internally the tableau uses gmpy2.mpq when available (several times faster
than fractions.Fraction); the public API is Fraction end to end.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import CertificationFailure, DimensionMismatch, Infeasible, ParseError, SolverError

try:  # optional fast exact rationals
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _Q = Fraction

_Q0 = _Q(0)
_Q1 = _Q(1)


@dataclass(frozen=True)
class LinearProgram:
    """min cost'x  s.t.  rows[i] . x = rhs[i] for all i,  x >= 0.

    Rows are sparse maps from column index to a nonzero coefficient.
    """

    variables: tuple[str, ...]
    cost: tuple[Fraction, ...]
    rows: tuple[Mapping[int, Fraction], ...]
    rhs: tuple[Fraction, ...]

    def __post_init__(self):
        n = len(self.variables)
        if len(self.cost) != n:
            raise DimensionMismatch(f"{len(self.cost)} cost entries for {n} variables")
        if len(self.rows) != len(self.rhs):
            raise DimensionMismatch(
                f"{len(self.rows)} rows but {len(self.rhs)} right-hand sides"
            )
        if len(set(self.variables)) != n:
            raise DimensionMismatch("duplicate variable names")
        for name in self.variables:
            if not name or any(ch.isspace() for ch in name):
                raise DimensionMismatch(f"bad variable name {name!r}")
        for i, row in enumerate(self.rows):
            for j in row:
                if not (0 <= j < n):
                    raise DimensionMismatch(f"row {i} references column {j} (n={n})")

    @property
    def column_count(self) -> int:
        return len(self.variables)

    @property
    def row_count(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class LpSolution:
    """Solver output; primal/dual/basis are populated only when optimal."""

    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: Fraction | None = None
    primal: tuple[Fraction, ...] | None = None
    dual: tuple[Fraction, ...] | None = None
    basis: tuple[int, ...] | None = None

    def named_primal(self, lp: LinearProgram, nonzero_only: bool = True) -> dict[str, Fraction]:
        assert self.status == "optimal" and self.primal is not None
        out = {}
        for name, v in zip(lp.variables, self.primal):
            if v != 0 or not nonzero_only:
                out[name] = v
        return out


def _to_q(fr: Fraction):
    return _Q(fr.numerator, fr.denominator)


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _pivot(tableau: list[list], basis: list[int], cost_row: list, leave: int, enter: int) -> None:
    prow = tableau[leave]
    piv = prow[enter]
    if piv != 1:
        for j, v in enumerate(prow):
            if v:
                prow[j] = v / piv
    nz = [j for j, v in enumerate(prow) if v]
    for row in itertools.chain(tableau, (cost_row,)):
        if row is prow:
            continue
        f = row[enter]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
    basis[leave] = enter


def _bland(tableau: list[list], basis: list[int], cost_row: list, ncols: int) -> str:
    """Run simplex iterations until optimal or unbounded (Bland's rule)."""
    while True:
        enter = -1
        for j in range(ncols):
            if cost_row[j] < 0:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i, row in enumerate(tableau):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leave]
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(tableau, basis, cost_row, leave, enter)


def solve_exact(lp: LinearProgram) -> LpSolution:
    """Two-phase simplex; returns an exactly certified optimum when one exists."""
    n = lp.column_count
    m = lp.row_count

    # Sign-normalize so every right-hand side is nonnegative.
    sign = [1] * m
    amat: list[list] = []
    bvec: list = []
    for i in range(m):
        bi = _to_q(lp.rhs[i])
        s = 1
        if bi < 0:
            s, bi = -1, -bi
        row = [_Q0] * n
        for j, v in lp.rows[i].items():
            q = _to_q(v)
            row[j] = q if s > 0 else -q
        sign[i] = s
        amat.append(row)
        bvec.append(bi)
    orig = [row[:] for row in amat]  # untouched copy for dual extraction

    # Phase one: artificial basis, minimize the artificial mass.
    ncols1 = n + m
    tableau = []
    for i in range(m):
        row = amat[i]
        row.extend(_Q1 if k == i else _Q0 for k in range(m))
        row.append(bvec[i])
        tableau.append(row)
    basis = list(range(n, n + m))
    cost_row = [_Q0] * (ncols1 + 1)
    for row in tableau:
        for j in range(n):
            if row[j]:
                cost_row[j] -= row[j]
        cost_row[-1] -= row[-1]
    status = _bland(tableau, basis, cost_row, ncols1)
    assert status == "optimal"  # phase one is bounded below by zero
    if -cost_row[-1] != 0:
        return LpSolution(status="infeasible")

    # Drive leftover artificials out of the basis; drop redundant rows.
    keep: list[int] = []
    for i in range(m):
        if basis[i] >= n:
            enter = -1
            for j in range(n):
                if tableau[i][j]:
                    enter = j
                    break
            if enter < 0:
                continue  # zero row: redundant constraint
            _pivot(tableau, basis, cost_row, i, enter)
        keep.append(i)

    # Phase two over the original columns.
    tab2 = [tableau[i][:n] + [tableau[i][-1]] for i in keep]
    basis2 = [basis[i] for i in keep]
    cost = [_to_q(c) for c in lp.cost]
    cost_row = cost[:] + [_Q0]
    for i, bi in enumerate(basis2):
        cb = cost[bi]
        if cb:
            row = tab2[i]
            for j in range(n + 1):
                if row[j]:
                    cost_row[j] -= cb * row[j]
    status = _bland(tab2, basis2, cost_row, n)
    if status == "unbounded":
        return LpSolution(status="unbounded")

    primal = [Fraction(0)] * n
    for i, bi in enumerate(basis2):
        primal[bi] = _to_fraction(tab2[i][-1])
    objective = sum(
        (c * x for c, x in zip(lp.cost, primal) if x), Fraction(0)
    )
    dual = _dual_from_basis(lp, orig, sign, keep, basis2, cost)
    return LpSolution(
        status="optimal",
        objective=objective,
        primal=tuple(primal),
        dual=tuple(dual),
        basis=tuple(sorted(basis2)),
    )


def _dual_from_basis(lp, orig, sign, keep, basis2, cost) -> list[Fraction]:
    """Solve y'B = c_B' on the kept rows; dropped redundant rows get dual 0."""
    k = len(keep)
    # Equation r: sum_i orig[keep[i]][basis2[r]] * y_i = cost[basis2[r]]
    mat = [[orig[keep[i]][basis2[r]] for i in range(k)] for r in range(k)]
    vec = [cost[basis2[r]] for r in range(k)]
    for col in range(k):
        piv = next(r for r in range(col, k) if mat[r][col])
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            vec[col], vec[piv] = vec[piv], vec[col]
        d = mat[col][col]
        if d != 1:
            mat[col] = [v / d for v in mat[col]]
            vec[col] = vec[col] / d
        for r in range(k):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
                vec[r] -= f * vec[col]
    dual = [Fraction(0)] * lp.row_count
    for i in range(k):
        dual[keep[i]] = _to_fraction(vec[i]) * sign[keep[i]]
    return dual


def solve_certified(lp: LinearProgram) -> LpSolution:
    """Solve and insist on a verified optimum.

    Raises Infeasible/SolverError on non-optimal statuses and
    CertificationFailure if the exact certificate check fails.
    """
    sol = solve_exact(lp)
    if sol.status == "infeasible":
        raise Infeasible("linear program has no feasible point")
    if sol.status != "optimal":
        raise SolverError(f"unexpected solver status {sol.status!r}")
    if not verify_certificate(lp, sol):
        raise CertificationFailure("optimal solution failed exact certification")
    return sol


def verify_certificate(lp: LinearProgram, sol: LpSolution) -> bool:
    """Exact re-check of an optimal solution against the original program.

    True iff the primal satisfies Ax = b and x >= 0, the dual satisfies
    y'A <= c' componentwise, and y'b = c'x = objective, all in exact
    arithmetic.  Any violation returns False.
    """
    if sol.status != "optimal" or sol.primal is None or sol.dual is None:
        return False
    n, m = lp.column_count, lp.row_count
    x, y = sol.primal, sol.dual
    if len(x) != n or len(y) != m:
        return False
    if any(v < 0 for v in x):
        return False
    for row, b in zip(lp.rows, lp.rhs):
        if sum((coef * x[j] for j, coef in row.items()), Fraction(0)) != b:
            return False
    pulled = [Fraction(0)] * n
    for yi, row in zip(y, lp.rows):
        if yi:
            for j, coef in row.items():
                pulled[j] += yi * coef
    if any(pulled[j] > lp.cost[j] for j in range(n)):
        return False
    primal_obj = sum((c * v for c, v in zip(lp.cost, x)), Fraction(0))
    dual_obj = sum((yi * b for yi, b in zip(y, lp.rhs)), Fraction(0))
    return primal_obj == dual_obj == sol.objective


# ---------------------------------------------------------------------------
# Textual dump format (bit-exact round trip)
# ---------------------------------------------------------------------------

def _fmt(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def dump_lp(lp: LinearProgram) -> str:
    """Serialize: header, variables in column order, nonzero cost entries,
    one line per nonzero matrix entry, nonzero right-hand sides."""
    out = ["lp-dump 1", "minimize", f"vars {lp.column_count}"]
    out.extend(f"var {name}" for name in lp.variables)
    out.append(f"rows {lp.row_count}")
    for j, c in enumerate(lp.cost):
        if c:
            out.append(f"c {lp.variables[j]} {_fmt(c)}")
    for i, row in enumerate(lp.rows):
        for j in sorted(row):
            out.append(f"a {i} {lp.variables[j]} {_fmt(row[j])}")
    for i, b in enumerate(lp.rhs):
        if b:
            out.append(f"rhs {i} {_fmt(b)}")
    out.append("end")
    return "\n".join(out) + "\n"


def parse_lp(text: str) -> LinearProgram:
    """Inverse of dump_lp; raises ParseError with a line number on bad input."""
    lines = text.splitlines()
    idx = 0

    def take() -> tuple[int, list[str]]:
        nonlocal idx
        while idx < len(lines):
            ln = lines[idx].strip()
            idx += 1
            if ln and not ln.startswith("#"):
                return idx, ln.split()
        raise ParseError("unexpected end of input", idx)

    lineno, tok = take()
    if tok != ["lp-dump", "1"]:
        raise ParseError("expected 'lp-dump 1' header", lineno)
    lineno, tok = take()
    if tok != ["minimize"]:
        raise ParseError("expected 'minimize'", lineno)
    def count(s: str, lineno: int) -> int:
        try:
            v = int(s)
        except ValueError as exc:
            raise ParseError(f"bad count {s!r}", lineno) from exc
        if v < 0:
            raise ParseError(f"negative count {v}", lineno)
        return v

    lineno, tok = take()
    if len(tok) != 2 or tok[0] != "vars":
        raise ParseError("expected 'vars <count>'", lineno)
    nvars = count(tok[1], lineno)
    names: list[str] = []
    for _ in range(nvars):
        lineno, tok = take()
        if len(tok) != 2 or tok[0] != "var":
            raise ParseError("expected 'var <name>'", lineno)
        names.append(tok[1])
    col = {name: j for j, name in enumerate(names)}
    if len(col) != nvars:
        raise ParseError("duplicate variable name", lineno)
    lineno, tok = take()
    if len(tok) != 2 or tok[0] != "rows":
        raise ParseError("expected 'rows <count>'", lineno)
    nrows = count(tok[1], lineno)
    cost = [Fraction(0)] * nvars
    rows: list[dict[int, Fraction]] = [dict() for _ in range(nrows)]
    rhs = [Fraction(0)] * nrows

    def rational(s: str, lineno: int) -> Fraction:
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {s!r}", lineno) from exc

    def column(s: str, lineno: int) -> int:
        try:
            return col[s]
        except KeyError:
            raise ParseError(f"unknown variable {s!r}", lineno) from None

    def rowref(s: str, lineno: int) -> int:
        i = count(s, lineno)
        if i >= nrows:
            raise ParseError(f"row {i} out of range", lineno)
        return i

    while True:
        lineno, tok = take()
        if tok == ["end"]:
            break
        if tok[0] == "c" and len(tok) == 3:
            cost[column(tok[1], lineno)] = rational(tok[2], lineno)
        elif tok[0] == "a" and len(tok) == 4:
            rows[rowref(tok[1], lineno)][column(tok[2], lineno)] = rational(tok[3], lineno)
        elif tok[0] == "rhs" and len(tok) == 3:
            rhs[rowref(tok[1], lineno)] = rational(tok[2], lineno)
        else:
            raise ParseError(f"unrecognized line {' '.join(tok)!r}", lineno)
    return LinearProgram(tuple(names), tuple(cost), tuple(rows), tuple(rhs))
