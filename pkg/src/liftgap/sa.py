"""Level-k lift-and-project over exact rationals.

Every row of the input system is multiplied by every product of at most k
0/1 variables and complements, the result is linearized over square-free
monomials (a repeated variable collapses, a product of variables becomes one
lifted variable, and a product carrying one fractional variable becomes a
mixed lifted variable), and projecting the lifted system back onto the
original variables gives the level-k relaxation.  Equality rows stay single
equality rows through the lift.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional, Sequence

from .exactlp import (
    EQ,
    LE,
    CapacityError,
    HPolyhedron,
    InputError,
    Row,
    poly,
    project_onto,
)
from .product import ProductKey, key, key_var_name

_CONST = (frozenset(), None)


@dataclass(frozen=True)
class LiftTag:
    """Provenance of a lifted row: source row index and the (U, W) choice."""

    source: int
    U: tuple
    W: tuple


@dataclass(frozen=True)
class LiftedSystem:
    base: HPolyhedron
    level: int
    integer_vars: tuple
    fractional_vars: tuple
    tags: tuple  # one tuple of LiftTags per kept row (merged duplicates)

    @property
    def lifted_vars(self) -> tuple:
        originals = set(self.integer_vars) | set(self.fractional_vars)
        return tuple(v for v in self.base.variables if v not in originals)


def _check_box(p: HPolyhedron, integer_vars) -> None:
    """Require explicit 0/1 box rows (or a 0/1 pin) on every integer variable."""
    for name in integer_vars:
        j = p.index(name)
        has_upper = has_lower = False
        for r in p.rows:
            if any(c != 0 for t, c in enumerate(r.coeffs) if t != j):
                continue
            c = r.coeffs[j]
            if c == 0:
                continue
            if r.rel == EQ:
                if r.rhs / c in (0, 1):
                    has_upper = has_lower = True
            elif c > 0 and r.rhs / c <= 1:
                has_upper = True
            elif c < 0 and r.rhs / c >= 0:
                has_lower = True
        if not (has_upper and has_lower):
            raise InputError(f"missing 0/1 box rows for integer variable {name!r}")


def _row_to_poly(row: Row, var_mono) -> dict:
    """Row as a polynomial pi with pi <= 0 (or == 0): terms minus rhs."""
    terms = {}
    for c, mono in zip(row.coeffs, var_mono):
        if c:
            terms[mono] = terms.get(mono, Fraction(0)) + c
    if row.rhs:
        terms[_CONST] = terms.get(_CONST, Fraction(0)) - row.rhs
    return terms


def _times_var(terms: dict, i: int) -> dict:
    out = {}
    for (ints, frac), c in terms.items():
        m = (ints | {i}, frac)
        out[m] = out.get(m, Fraction(0)) + c
    return out


def _times_complement(terms: dict, i: int) -> dict:
    shifted = _times_var(terms, i)
    out = dict(terms)
    for m, c in shifted.items():
        out[m] = out.get(m, Fraction(0)) - c
    return out


def _mono_sort_key(mono):
    ints, frac = mono
    return (0 if frac is None else 1, frac if frac is not None else -1,
            len(ints), tuple(sorted(ints)))


def sa_lift(p: HPolyhedron, integer_vars: Sequence[str], k: int) -> LiftedSystem:
    """Build the level-k lifted linear system.

    All multiplier supports U with |U| <= k are used (so every lower level is
    included), W ranges over subsets of U, and only integer variables ever
    appear in a multiplier.  Rows that linearize to tautologies are dropped
    and duplicate rows are merged, with provenance tags kept per row.
    """
    int_list = list(integer_vars)
    for v in int_list:
        p.index(v)
    n = len(int_list)
    if k > n:
        raise InputError(f"level {k} exceeds the number of integer variables {n}")
    if k < 0:
        raise InputError("level must be nonnegative")
    _check_box(p, int_list)

    frac_list = [v for v in p.variables if v not in set(int_list)]
    int_pos = {v: i for i, v in enumerate(int_list)}
    frac_pos = {v: j for j, v in enumerate(frac_list)}
    var_mono = []
    for v in p.variables:
        if v in int_pos:
            var_mono.append((frozenset({int_pos[v]}), None))
        else:
            var_mono.append((frozenset(), frac_pos[v]))

    base_polys = [_row_to_poly(r, var_mono) for r in p.rows]

    produced = {}   # normalized row -> (Row, [tags])
    order = []
    for size in range(0, k + 1):
        for U in itertools.combinations(range(n), size):
            for wbits in itertools.product((0, 1), repeat=size):
                W = tuple(i for i, b in zip(U, wbits) if b)
                for ridx, (row, terms) in enumerate(zip(p.rows, base_polys)):
                    lifted = terms
                    for i in U:
                        lifted = _times_complement(lifted, i) if i in W else _times_var(lifted, i)
                    built = _linearize(lifted, row.rel, int_list, frac_list)
                    if built is None:
                        continue
                    mono_coeffs, rhs = built
                    tag = LiftTag(ridx,
                                  tuple(int_list[i] for i in U),
                                  tuple(int_list[i] for i in W))
                    norm_key = _normalized_key(mono_coeffs, row.rel, rhs)
                    if norm_key in produced:
                        produced[norm_key][1].append(tag)
                    else:
                        produced[norm_key] = ((mono_coeffs, row.rel, rhs), [tag])
                        order.append(norm_key)

    all_monos = set()
    for norm_key in order:
        (mono_coeffs, _, _), _ = produced[norm_key]
        all_monos.update(mono_coeffs)
    lifted_monos = sorted((m for m in all_monos if _is_lifted(m)), key=_mono_sort_key)

    names = list(p.variables) + [
        key_var_name(ProductKey(m[0], m[1]), int_list, frac_list) for m in lifted_monos
    ]
    pos = {}
    for v, m in zip(p.variables, var_mono):
        pos[m] = names.index(v)
    for m in lifted_monos:
        pos[m] = names.index(key_var_name(ProductKey(m[0], m[1]), int_list, frac_list))

    rows = []
    tags = []
    for norm_key in order:
        (mono_coeffs, rel, rhs), tag_list = produced[norm_key]
        coeffs = [Fraction(0)] * len(names)
        for m, c in mono_coeffs.items():
            coeffs[pos[m]] = c
        rows.append(Row(tuple(coeffs), rel, rhs))
        tags.append(tuple(tag_list))

    base = HPolyhedron(tuple(names), tuple(rows))
    return LiftedSystem(base, k, tuple(int_list), tuple(frac_list), tuple(tags))


def _is_lifted(mono) -> bool:
    ints, frac = mono
    if frac is None:
        return len(ints) >= 2
    return len(ints) >= 1


def _linearize(terms: dict, rel: str, int_list, frac_list):
    """Split a square-free polynomial into (monomial coeffs, rhs); None if
    the row is a tautology."""
    coeffs = {m: c for m, c in terms.items() if m != _CONST and c != 0}
    rhs = -terms.get(_CONST, Fraction(0))
    if not coeffs:
        if rel == EQ and rhs == 0:
            return None
        if rel == LE and rhs >= 0:
            return None
    return coeffs, rhs


def _normalized_key(coeffs: dict, rel: str, rhs: Fraction):
    items = sorted(coeffs.items(), key=lambda mc: _mono_sort_key(mc[0]))
    if not items:
        return (rel, rhs >= 0 if rel == LE else rhs == 0, None)
    lead = items[0][1]
    scale = Fraction(1) / abs(lead)
    if rel == EQ and lead < 0:
        scale = -scale
    return (rel, tuple((m, c * scale) for m, c in items), rhs * scale)


def sa_project(system: LiftedSystem, original_vars: Optional[Sequence[str]] = None,
               guard: int = 20) -> HPolyhedron:
    """Project the lifted system back onto the original variables."""
    lifted = system.lifted_vars
    if len(lifted) > guard:
        raise CapacityError(f"{len(lifted)} lifted variables exceeds the projection guard {guard}")
    keep = list(original_vars) if original_vars is not None else \
        list(system.integer_vars) + list(system.fractional_vars)
    return project_onto(system.base, keep)


def lift_extension_point(system: LiftedSystem, pattern: Sequence[int],
                         w: Sequence = ()) -> list:
    """The canonical lift of an integer point: products for pure lifted
    variables, product times the fractional value for mixed ones."""
    int_pos = {v: i for i, v in enumerate(system.integer_vars)}
    frac_pos = {v: j for j, v in enumerate(system.fractional_vars)}
    wv = [Fraction(x) if not isinstance(x, Fraction) else x for x in w]
    point = []
    for name in system.base.variables:
        if name in int_pos:
            point.append(Fraction(pattern[int_pos[name]]))
        elif name in frac_pos:
            point.append(wv[frac_pos[name]])
        else:
            ints, frac = _parse_lifted_name(name, system)
            val = Fraction(1)
            for i in ints:
                val *= pattern[i]
            if frac is not None:
                val *= wv[frac]
            point.append(val)
    return point


def _parse_lifted_name(name: str, system: LiftedSystem):
    if name.startswith("z{"):
        idx = tuple(int(t) - 1 for t in name[2:-1].split(","))
        return idx, None
    if name.startswith("v{"):
        body, _, wtail = name[2:].partition("}w")
        idx = tuple(int(t) - 1 for t in body.split(","))
        return idx, int(wtail) - 1
    raise InputError(f"not a lifted variable name: {name!r}")


def sa_size_bound(r: int, n: int, t: int) -> int:
    """Exact count bound r * C(n, t) * 2^t for the rows added at level t."""
    if t > n:
        raise InputError(f"level {t} exceeds {n} variables")
    if min(r, n, t) < 0:
        raise InputError("arguments must be nonnegative")
    return r * comb(n, t) * (2 ** t)


def max_level_within_budget(r: int, n: int, delta: Fraction):
    """Largest t <= n with r * C(n, t) * 2^t <= 2^(delta n), exactly.

    Returns (max_t or None, per-level bound list).  The comparison is done on
    integers: bound^q <= 2^(p n) for delta = p/q.
    """
    delta = Fraction(delta)
    p_, q_ = delta.numerator, delta.denominator
    if p_ < 0:
        raise InputError("delta must be nonnegative")
    budget_pow = 2 ** (p_ * n)
    best = None
    table = []
    prefix_ok = True
    for t in range(0, n + 1):
        bound = sa_size_bound(r, n, t)
        fits = bound ** q_ <= budget_pow
        table.append((t, bound, fits))
        if prefix_ok and fits:
            best = t
        else:
            prefix_ok = False
    return best, table
