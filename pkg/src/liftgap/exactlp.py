"""Exact rational polyhedra and linear programming.

Everything in this module computes over `fractions.Fraction`; there is no
floating point anywhere, so results are exact and reproducible bit for bit.
The LP solver is a two-phase simplex with Bland's rule (lowest index enters,
ties on the leaving row broken by lowest basic column), which terminates on
every input and makes repeated solves deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Rational = Fraction

LE = "<="
EQ = "=="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class InputError(ValueError):
    """Malformed input: dimension mismatch, unknown variable, bad text."""


class CapacityError(RuntimeError):
    """A desk-scale guard was exceeded."""


def rat(value, den=None) -> Fraction:
    """Coerce ints, strings like '3/4' or '-2', and Fractions to Fraction."""
    if den is not None:
        return Fraction(value, den)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    raise InputError(f"not an exact rational: {value!r}")


def rat_str(q: Fraction) -> str:
    q = rat(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Row:
    """One linear constraint: coeffs . x  <=  rhs  (or == rhs)."""

    coeffs: tuple
    rel: str
    rhs: Fraction

    def __post_init__(self):
        if self.rel not in (LE, EQ):
            raise InputError(f"bad relation {self.rel!r}")

    def value(self, point: Sequence[Fraction]) -> Fraction:
        return sum((c * x for c, x in zip(self.coeffs, point)), Fraction(0))

    def satisfied_by(self, point: Sequence[Fraction]) -> bool:
        v = self.value(point)
        return v == self.rhs if self.rel == EQ else v <= self.rhs

    def is_tautology(self) -> bool:
        if any(self.coeffs):
            return False
        return self.rhs == 0 if self.rel == EQ else self.rhs >= 0

    def normalized(self) -> "Row":
        """Canonical scaling, for duplicate detection.

        LE rows may only be scaled by positive factors; EQ rows are scaled so
        the leading nonzero coefficient is +1.
        """
        lead = next((c for c in self.coeffs if c != 0), None)
        if lead is None:
            return self
        scale = Fraction(1) / abs(lead)
        if self.rel == EQ and lead < 0:
            scale = -scale
        return Row(tuple(c * scale for c in self.coeffs), self.rel, self.rhs * scale)


def make_row(coeffs: Iterable, rel: str, rhs) -> Row:
    return Row(tuple(rat(c) for c in coeffs), rel, rat(rhs))


@dataclass(frozen=True)
class HPolyhedron:
    """A polyhedron in inequality form over named variables."""

    variables: tuple
    rows: tuple

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise InputError("duplicate variable names")
        for r in self.rows:
            if len(r.coeffs) != len(self.variables):
                raise InputError("row length does not match variable count")

    @property
    def dim(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise InputError(f"unknown variable {name!r}") from None

    def satisfies(self, point: Sequence[Fraction]) -> bool:
        if len(point) != self.dim:
            raise InputError("point dimension mismatch")
        pt = [rat(x) for x in point]
        return all(r.satisfied_by(pt) for r in self.rows)

    def with_rows(self, rows: Iterable[Row]) -> "HPolyhedron":
        return HPolyhedron(self.variables, tuple(rows))

    def restrict(self, fixed: dict) -> "HPolyhedron":
        """Substitute exact values for some variables, dropping their columns."""
        idx = {self.index(name): rat(v) for name, v in fixed.items()}
        keep = [i for i in range(self.dim) if i not in idx]
        new_rows = []
        for r in self.rows:
            shift = sum((r.coeffs[i] * idx[i] for i in idx), Fraction(0))
            new_rows.append(Row(tuple(r.coeffs[i] for i in keep), r.rel, r.rhs - shift))
        return HPolyhedron(tuple(self.variables[i] for i in keep), tuple(new_rows))


def poly(variables: Sequence[str], rows: Iterable) -> HPolyhedron:
    """Build an HPolyhedron from (coeffs, rel, rhs) triples."""
    built = tuple(r if isinstance(r, Row) else make_row(*r) for r in rows)
    return HPolyhedron(tuple(variables), built)


def box_rows(variables: Sequence[str], names: Sequence[str], lo=0, hi=1):
    """0/1 box rows (lo <= v <= hi) for the named subset, as Row objects."""
    n = len(variables)
    out = []
    for name in names:
        i = list(variables).index(name)
        e = [Fraction(0)] * n
        e[i] = Fraction(-1)
        out.append(Row(tuple(e), LE, rat(-lo)))
        e2 = [Fraction(0)] * n
        e2[i] = Fraction(1)
        out.append(Row(tuple(e2), LE, rat(hi)))
    return out


# ---------------------------------------------------------------------------
# text format
#
#   vars: x1 x2
#   1 1 <= 3/2
#   1 -1 == 0
#
# Round trips bit-exactly because Fractions are stored in lowest terms.
# ---------------------------------------------------------------------------


def poly_to_text(p: HPolyhedron) -> str:
    lines = ["vars: " + " ".join(p.variables)]
    for r in p.rows:
        lines.append(" ".join(rat_str(c) for c in r.coeffs) + f" {r.rel} " + rat_str(r.rhs))
    return "\n".join(lines) + "\n"


def poly_from_text(text: str) -> HPolyhedron:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("vars:"):
        raise InputError("line 1: expected 'vars: <name> ...'")
    variables = tuple(lines[0][len("vars:"):].split())
    if not variables:
        raise InputError("line 1: no variables listed")
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        toks = ln.split()
        rel = LE if LE in toks else (EQ if EQ in toks else None)
        if rel is None:
            raise InputError(f"line {lineno}: missing relation '<=' or '=='")
        at = toks.index(rel)
        if at != len(variables) or len(toks) != len(variables) + 2:
            raise InputError(f"line {lineno}: expected {len(variables)} coefficients")
        try:
            coeffs = tuple(Fraction(t) for t in toks[:at])
            rhs = Fraction(toks[at + 1])
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"line {lineno}: bad rational ({exc})") from None
        rows.append(Row(coeffs, rel, rhs))
    return HPolyhedron(variables, tuple(rows))


# ---------------------------------------------------------------------------
# simplex
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LpResult:
    """Outcome of an exact LP solve.

    status    'optimal' | 'infeasible' | 'unbounded'
    point     optimal point (or a feasible point for 'unbounded')
    objective optimal value
    certificate
        optimal:    dual multipliers per row (>= 0 on LE rows) with
                    sum(y_r * a_r) == objective vector and y.b == optimum
        infeasible: Farkas multipliers per row (>= 0 on LE rows) with
                    sum(y_r * a_r) == 0 and y.b < 0
        unbounded:  an improving ray d with A_LE d <= 0 and A_EQ d == 0
    """

    status: str
    point: Optional[tuple] = None
    objective: Optional[Fraction] = None
    certificate: Optional[tuple] = None


class _Tableau:
    """Dense simplex tableau with uniform artificial columns.

    Column layout: [u_0..u_{d-1} | v_0..v_{d-1} | slacks | artificials],
    where x = u - v splits the free variables.  Every row receives an
    artificial column, so the initial basis is always the identity and dual
    multipliers can be read off the artificial reduced costs exactly.
    """

    def __init__(self, p: HPolyhedron):
        d = p.dim
        self.d = d
        self.m = len(p.rows)
        self.sign = []          # row scaling applied to reach rhs >= 0
        self.slack_col = {}     # row index -> slack column
        ncols = 2 * d
        for i, r in enumerate(p.rows):
            if r.rel == LE:
                self.slack_col[i] = ncols
                ncols += 1
        self.art0 = ncols
        ncols += self.m
        self.ncols = ncols

        self.rows = []
        self.rhs = []
        for i, r in enumerate(p.rows):
            s = 1 if r.rhs >= 0 else -1
            self.sign.append(s)
            row = [Fraction(0)] * ncols
            for j, c in enumerate(r.coeffs):
                if c:
                    row[j] = s * c
                    row[d + j] = -s * c
            if i in self.slack_col:
                row[self.slack_col[i]] = Fraction(s)
            row[self.art0 + i] = Fraction(1)
            self.rows.append(row)
            self.rhs.append(s * r.rhs)
        self.basis = [self.art0 + i for i in range(self.m)]

    def _pivot(self, i: int, j: int, obj: list) -> None:
        piv = self.rows[i][j]
        inv = Fraction(1) / piv
        row = self.rows[i]
        if inv != 1:
            for t in range(self.ncols):
                if row[t]:
                    row[t] *= inv
            self.rhs[i] *= inv
        for k in range(self.m):
            if k == i:
                continue
            f = self.rows[k][j]
            if f:
                rk = self.rows[k]
                for t in range(self.ncols):
                    if row[t]:
                        rk[t] -= f * row[t]
                self.rhs[k] -= f * self.rhs[i]
        f = obj[j]
        if f:
            for t in range(self.ncols):
                if row[t]:
                    obj[t] -= f * row[t]
            obj[self.ncols] -= f * self.rhs[i]
        self.basis[i] = j

    def minimize(self, cost: list, banned=frozenset()):
        """Run Bland simplex minimizing cost over the current basis.

        Returns ('optimal', obj_row) or ('unbounded', entering_column).
        obj_row holds reduced costs; its last entry is -(objective value).
        """
        obj = list(cost) + [Fraction(0)]
        for i, b in enumerate(self.basis):
            f = obj[b]
            if f:
                row = self.rows[i]
                for t in range(self.ncols):
                    if row[t]:
                        obj[t] -= f * row[t]
                obj[self.ncols] -= f * self.rhs[i]
        basic = set(self.basis)
        while True:
            enter = -1
            for j in range(self.ncols):
                if j in banned or j in basic:
                    continue
                if obj[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL, obj
            leave = -1
            best = None
            for i in range(self.m):
                a = self.rows[i][enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED, enter
            basic.discard(self.basis[leave])
            basic.add(enter)
            self._pivot(leave, enter, obj)

    def drive_out_artificials(self) -> None:
        """Pivot basic artificials (at value 0) onto real columns when possible."""
        for i in range(self.m):
            if self.basis[i] >= self.art0:
                for j in range(self.art0):
                    if self.rows[i][j] != 0:
                        dummy = [Fraction(0)] * (self.ncols + 1)
                        self._pivot(i, j, dummy)
                        break

    def point(self) -> list:
        x = [Fraction(0)] * self.d
        vals = {b: self.rhs[i] for i, b in enumerate(self.basis)}
        for j in range(self.d):
            x[j] = vals.get(j, Fraction(0)) - vals.get(self.d + j, Fraction(0))
        return x

    def duals(self, cost: list) -> list:
        """y = c_B . B^{-1} over the normalized rows.

        The artificial columns started as the identity, so in the current
        tableau they hold B^{-1} exactly.
        """
        out = []
        for i in range(self.m):
            col = self.art0 + i
            y = Fraction(0)
            for k in range(self.m):
                v = self.rows[k][col]
                if v:
                    c = cost[self.basis[k]]
                    if c:
                        y += c * v
            out.append(y)
        return out

    def ray(self, enter: int) -> list:
        d_split = {enter: Fraction(1)}
        for i, b in enumerate(self.basis):
            if self.rows[i][enter]:
                d_split[b] = -self.rows[i][enter]
        ray = [Fraction(0)] * self.d
        for j in range(self.d):
            ray[j] = d_split.get(j, Fraction(0)) - d_split.get(self.d + j, Fraction(0))
        return ray


def _verify_optimal(p, objective, sense, point, value, duals):
    for r in p.rows:
        assert r.satisfied_by(point), "optimal point violates a row"
    assert sum((c * x for c, x in zip(objective, point)), Fraction(0)) == value
    sgn = 1 if sense == "max" else -1
    for r, y in zip(p.rows, duals):
        if r.rel == LE:
            assert sgn * y >= 0, "dual sign violated on LE row"
    for j in range(p.dim):
        lhs = sum((y * r.coeffs[j] for r, y in zip(p.rows, duals)), Fraction(0))
        assert lhs == objective[j], "dual combination does not match objective"
    assert sum((y * r.rhs for r, y in zip(p.rows, duals)), Fraction(0)) == value


def _verify_infeasible(p, farkas):
    total = Fraction(0)
    for j in range(p.dim):
        coef = sum((y * r.coeffs[j] for r, y in zip(p.rows, farkas)), Fraction(0))
        assert coef == 0, "Farkas combination has a nonzero coefficient"
    for r, y in zip(p.rows, farkas):
        if r.rel == LE:
            assert y >= 0, "Farkas multiplier negative on LE row"
        total += y * r.rhs
    assert total < 0, "Farkas combination does not refute feasibility"


def _verify_ray(p, objective, sense, ray):
    gain = sum((c * x for c, x in zip(objective, ray)), Fraction(0))
    assert (gain > 0) if sense == "max" else (gain < 0), "ray does not improve"
    for r in p.rows:
        v = r.value(ray)
        assert v == 0 if r.rel == EQ else v <= 0, "ray leaves the polyhedron"


def solve_lp(p: HPolyhedron, objective: Sequence, sense: str = "max") -> LpResult:
    """Exact LP solve with verified certificates.

    The returned certificate is re-checked by exact re-multiplication before
    returning, so a successful call is self-certifying.
    """
    if sense not in ("max", "min"):
        raise InputError(f"bad sense {sense!r}")
    obj = [rat(c) for c in objective]
    if len(obj) != p.dim:
        raise InputError("objective length does not match variable count")

    t = _Tableau(p)
    phase1 = [Fraction(0)] * t.ncols
    for j in range(t.art0, t.ncols):
        phase1[j] = Fraction(1)
    status, row = t.minimize(phase1)
    assert status == OPTIMAL  # phase 1 is bounded below by 0
    if -row[t.ncols] > 0:
        y = t.duals(phase1)
        farkas = [-yy * s for yy, s in zip(y, t.sign)]
        _verify_infeasible(p, farkas)
        return LpResult(INFEASIBLE, certificate=tuple(farkas))

    t.drive_out_artificials()
    cost = [Fraction(0)] * t.ncols
    for j in range(t.d):
        c = obj[j] if sense == "min" else -obj[j]
        cost[j] = c
        cost[t.d + j] = -c
    banned = frozenset(range(t.art0, t.ncols))
    status, payload = t.minimize(cost, banned=banned)
    if status == UNBOUNDED:
        ray = t.ray(payload)
        _verify_ray(p, obj, sense, ray)
        return LpResult(UNBOUNDED, point=tuple(t.point()), certificate=tuple(ray))

    point = t.point()
    value = sum((c * x for c, x in zip(obj, point)), Fraction(0))
    y = t.duals(cost)
    flip = -1 if sense == "max" else 1
    duals = [flip * yy * s for yy, s in zip(y, t.sign)]
    _verify_optimal(p, obj, sense, point, value, duals)
    return LpResult(OPTIMAL, point=tuple(point), objective=value, certificate=tuple(duals))


def is_feasible(p: HPolyhedron):
    """Feasibility check; returns (bool, witness-or-Farkas)."""
    res = solve_lp(p, [0] * p.dim, "max")
    if res.status == INFEASIBLE:
        return False, res.certificate
    return True, res.point


# ---------------------------------------------------------------------------
# redundancy removal, projection, containment
# ---------------------------------------------------------------------------


def _dedup_rows(rows: Sequence[Row]):
    seen = set()
    out = []
    for r in rows:
        if r.is_tautology():
            continue
        key = r.normalized()
        k = (key.coeffs, key.rel, key.rhs)
        if k in seen:
            continue
        seen.add(k)
        out.append(r)
    return out


def remove_redundant(p: HPolyhedron) -> HPolyhedron:
    """Drop every row implied by the others (exact per-row LP check).

    The solution set is unchanged.  If the system is infeasible the input is
    returned with only duplicates removed; minimality is not meaningful there.
    """
    rows = _dedup_rows(p.rows)
    feasible, _ = is_feasible(p.with_rows(rows) if rows else p)
    if not feasible:
        return p.with_rows(rows)
    i = 0
    while i < len(rows):
        candidate = rows[i]
        others = rows[:i] + rows[i + 1:]
        rest = p.with_rows(others)
        if _row_implied(rest, candidate):
            rows = others
        else:
            i += 1
    return p.with_rows(rows)


def _row_implied(p: HPolyhedron, row: Row) -> bool:
    hi = solve_lp(p, row.coeffs, "max")
    if hi.status == UNBOUNDED:
        return False
    if hi.status == INFEASIBLE:
        return True
    if hi.objective > row.rhs:
        return False
    if row.rel == LE:
        return True
    lo = solve_lp(p, row.coeffs, "min")
    return lo.status == OPTIMAL and lo.objective >= row.rhs


def fm_eliminate(p: HPolyhedron, var: str, prune: bool = True) -> HPolyhedron:
    """Project out one variable (Fourier-Motzkin, exact).

    An equality row with a nonzero coefficient on `var` is used as a
    substitution when available; otherwise positive and negative rows are
    combined pairwise.  Redundant rows are removed afterwards unless
    `prune=False` (used internally to batch the pruning).
    """
    j = p.index(var)
    keep_vars = tuple(v for v in p.variables if v != var)

    def drop(row: Row) -> Row:
        return Row(tuple(c for t, c in enumerate(row.coeffs) if t != j), row.rel, row.rhs)

    subst = next((r for r in p.rows if r.rel == EQ and r.coeffs[j] != 0), None)
    new_rows = []
    if subst is not None:
        a = subst.coeffs[j]
        for r in p.rows:
            if r is subst:
                continue
            f = r.coeffs[j] / a
            if f == 0:
                new_rows.append(drop(r))
            else:
                coeffs = tuple(c - f * sc for t, (c, sc) in enumerate(zip(r.coeffs, subst.coeffs)) if t != j)
                new_rows.append(Row(coeffs, r.rel, r.rhs - f * subst.rhs))
    else:
        zero, pos, neg = [], [], []
        for r in p.rows:
            if r.rel == EQ:
                if r.coeffs[j] != 0:
                    raise AssertionError("unreachable: equality handled above")
                zero.append(r)
            elif r.coeffs[j] > 0:
                pos.append(r)
            elif r.coeffs[j] < 0:
                neg.append(r)
            else:
                zero.append(r)
        new_rows.extend(drop(r) for r in zero)
        for rp in pos:
            ap = rp.coeffs[j]
            for rn in neg:
                an = -rn.coeffs[j]
                coeffs = tuple(an * cp + ap * cn
                               for t, (cp, cn) in enumerate(zip(rp.coeffs, rn.coeffs)) if t != j)
                new_rows.append(Row(coeffs, LE, an * rp.rhs + ap * rn.rhs))

    out = HPolyhedron(keep_vars, tuple(_dedup_rows(new_rows)))
    if prune:
        out = remove_redundant(out)
    return out


def _elimination_order(p: HPolyhedron, drop_vars):
    """Cheapest-first ordering: equality-substitutable vars, then min pos*neg."""
    remaining = list(drop_vars)
    order = []
    work = p
    while remaining:
        best = None
        best_cost = None
        for v in remaining:
            j = work.index(v)
            if any(r.rel == EQ and r.coeffs[j] != 0 for r in work.rows):
                cost = (-1, v)
            else:
                npos = sum(1 for r in work.rows if r.rel == LE and r.coeffs[j] > 0)
                nneg = sum(1 for r in work.rows if r.rel == LE and r.coeffs[j] < 0)
                cost = (npos * nneg, v)
            if best_cost is None or cost < best_cost:
                best, best_cost = v, cost
        order.append(best)
        remaining.remove(best)
        work = fm_eliminate(work, best, prune=False)
    return order


def project_onto(p: HPolyhedron, keep: Sequence[str], prune_threshold: int = 48) -> HPolyhedron:
    """Project onto the named variables by repeated fm_eliminate.

    Between eliminations, full LP pruning only runs when the row count passes
    `prune_threshold`; cheap duplicate removal always runs.  The final system
    is fully minimized, so the result matches eliminating one variable at a
    time with remove_redundant after each step.
    """
    keep_set = set(keep)
    for v in keep_set:
        p.index(v)
    drop_vars = [v for v in p.variables if v not in keep_set]
    order = _elimination_order(p, drop_vars)
    work = p
    for v in order:
        work = fm_eliminate(work, v, prune=False)
        if len(work.rows) > prune_threshold:
            work = remove_redundant(work)
    work = remove_redundant(work)
    if tuple(work.variables) != tuple(keep):
        perm = [work.index(v) for v in keep]
        rows = tuple(Row(tuple(r.coeffs[t] for t in perm), r.rel, r.rhs) for r in work.rows)
        work = HPolyhedron(tuple(keep), rows)
    return work


def contains(outer: HPolyhedron, inner: HPolyhedron) -> bool:
    """True iff every point of `inner` satisfies every row of `outer`."""
    if tuple(outer.variables) != tuple(inner.variables):
        raise InputError("variable lists differ")
    feasible, _ = is_feasible(inner)
    if not feasible:
        return True
    for r in outer.rows:
        hi = solve_lp(inner, r.coeffs, "max")
        if hi.status == UNBOUNDED or hi.objective > r.rhs:
            return False
        if r.rel == EQ:
            lo = solve_lp(inner, r.coeffs, "min")
            if lo.status == UNBOUNDED or lo.objective < r.rhs:
                return False
    return True


def equal_polyhedra(a: HPolyhedron, b: HPolyhedron) -> bool:
    return contains(a, b) and contains(b, a)
