"""Integer hulls, V-polytopes, and convex membership tests.

The canonical product relaxation of a small polytope is represented here in
vertex form only: one vertex per feasible 0/1 (or mixed) point, each mapped
through the product section.  Its dimension grows exponentially, so every
check against it is a membership or intersection LP, never a facet
computation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Optional, Sequence

from .exactlp import (
    EQ,
    LE,
    CapacityError,
    HPolyhedron,
    InputError,
    Row,
    is_feasible,
    poly,
    project_onto,
    rat,
    rat_str,
    solve_lp,
)
from .product import ProductKey, key, key_var_name, mixed_product_section, product_section, pure_keys


class PreconditionError(ValueError):
    """A caller-side contract was violated; the message names the offender."""


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of explicit vertices over labelled coordinates."""

    labels: tuple
    vertices: tuple

    def __post_init__(self):
        for v in self.vertices:
            if len(v) != len(self.labels):
                raise InputError("vertex length does not match labels")
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertices")

    @property
    def dim(self) -> int:
        return len(self.labels)


def vpolytope(labels: Sequence, vertices: Iterable[Sequence]) -> VPolytope:
    seen = []
    for v in vertices:
        vt = tuple(rat(c) for c in v)
        if vt not in seen:
            seen.append(vt)
    return VPolytope(tuple(labels), tuple(seen))


def vpolytope_to_text(vp: VPolytope) -> str:
    lines = ["vars: " + " ".join(str(l) for l in vp.labels)]
    for v in vp.vertices:
        lines.append(" ".join(rat_str(c) for c in v))
    return "\n".join(lines) + "\n"


def vpolytope_from_text(text: str) -> VPolytope:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("vars:"):
        raise InputError("line 1: expected 'vars: <label> ...'")
    labels = tuple(lines[0][len("vars:"):].split())
    vertices = []
    for lineno, ln in enumerate(lines[1:], start=2):
        toks = ln.split()
        if len(toks) != len(labels):
            raise InputError(f"line {lineno}: expected {len(labels)} coordinates")
        vertices.append(tuple(Fraction(t) for t in toks))
    return VPolytope(labels, tuple(vertices))


@dataclass(frozen=True)
class IntegerAssignment:
    """A feasible point: 0/1 values on integer variables, exact rationals on
    the fractional witnesses."""

    values: dict

    def pattern(self, integer_vars: Sequence[str]) -> tuple:
        return tuple(int(self.values[v]) for v in integer_vars)


def enumerate_feasible_points(p: HPolyhedron, integer_vars: Sequence[str],
                              cap: int = 24) -> list:
    """All feasible 0/1 patterns, with a fractional witness in the mixed case.

    A pattern is kept iff the polyhedron restricted to it is feasible, decided
    by an exact LP (or by direct evaluation when there is nothing left).
    """
    names = list(integer_vars)
    for v in names:
        p.index(v)
    if len(names) > cap:
        raise CapacityError(f"{len(names)} integer variables exceeds the cap of {cap}")
    others = [v for v in p.variables if v not in set(names)]
    out = []
    for bits in itertools.product((0, 1), repeat=len(names)):
        fixed = {v: Fraction(b) for v, b in zip(names, bits)}
        rest = p.restrict(fixed)
        if not others:
            if all(r.rhs >= 0 if r.rel == LE else r.rhs == 0 for r in rest.rows):
                out.append(IntegerAssignment(dict(fixed)))
            continue
        ok, witness = is_feasible(rest)
        if ok:
            vals = dict(fixed)
            vals.update({v: w for v, w in zip(rest.variables, witness)})
            out.append(IntegerAssignment(vals))
    return out


def canonical_product_relaxation(p: HPolyhedron, integer_vars: Sequence[str],
                                 frac_vars: Sequence[str] = ()) -> VPolytope:
    """Vertex form of the tightest product relaxation of p's feasible points.

    Pure 0/1 case: one vertex f(x) per feasible point over all nonempty
    subsets.  Mixed case: the enumerated witness supplies the fractional part
    and the mixed section is used instead.
    """
    points = enumerate_feasible_points(p, integer_vars)
    d = len(integer_vars)
    keys = list(pure_keys(d))
    if frac_vars:
        mixed = []
        for j in range(len(frac_vars)):
            mixed.append(key((), j))
        for k in keys:
            for j in range(len(frac_vars)):
                mixed.append(key(k.ints, j))
        keys = keys + mixed
    labels = tuple(key_var_name(k, list(integer_vars), list(frac_vars)) for k in keys)
    vertices = []
    for pt in points:
        bits = pt.pattern(integer_vars)
        if frac_vars:
            w = [pt.values[v] for v in frac_vars]
            section = mixed_product_section(bits, w)
        else:
            section = product_section(bits)
        vertices.append(tuple(section[k] for k in keys))
    return vpolytope(labels, vertices)


def _combination_lp(columns: Sequence[Sequence[Fraction]], target: Sequence[Fraction]):
    """Feasibility of target = sum(mu_j * columns_j), mu >= 0, sum(mu) = 1."""
    ncols = len(columns)
    dim = len(target)
    names = [f"m{j}" for j in range(ncols)]
    rows = []
    for c in range(dim):
        rows.append((tuple(col[c] for col in columns), EQ, target[c]))
    rows.append((tuple(Fraction(1) for _ in columns), EQ, Fraction(1)))
    for j in range(ncols):
        e = [Fraction(0)] * ncols
        e[j] = Fraction(-1)
        rows.append((tuple(e), LE, Fraction(0)))
    res = solve_lp(poly(names, rows), [0] * ncols, "max")
    if res.status == "infeasible":
        return None
    return res.point


def in_hull(point: Sequence, vp: VPolytope) -> bool:
    """Exact convex-combination membership test against the vertex list."""
    target = [rat(c) for c in point]
    if len(target) != vp.dim:
        raise InputError("point dimension does not match the polytope")
    if not vp.vertices:
        return False
    return _combination_lp(vp.vertices, target) is not None


@dataclass(frozen=True)
class ConflictWitness:
    """An exact point of conv(s) ∩ conv(vertices):
    point = sum(lambdas . s) = sum(mus . vertices)."""

    point: tuple
    lambdas: tuple
    mus: tuple

    def verify(self, vectors, vp: VPolytope) -> bool:
        if sum(self.lambdas, Fraction(0)) != 1 or sum(self.mus, Fraction(0)) != 1:
            return False
        if any(l < 0 for l in self.lambdas) or any(m < 0 for m in self.mus):
            return False
        dim = len(self.point)
        for c in range(dim):
            left = sum((l * v[c] for l, v in zip(self.lambdas, vectors)), Fraction(0))
            right = sum((m * v[c] for m, v in zip(self.mus, vp.vertices)), Fraction(0))
            if left != self.point[c] or right != self.point[c]:
                return False
        return True


def is_conflicting(vectors: Sequence[Sequence], vp: VPolytope,
                   check_members: bool = True):
    """Does conv(vectors) meet conv(vp)?  Returns (bool, witness or None).

    With `check_members` each vector is first required to lie outside the
    polytope individually (a conflicting set consists of infeasible points);
    an inside member raises PreconditionError naming it.  Callers holding an
    external infeasibility certificate, e.g. for a window of a much larger
    space, may disable the check.
    """
    vecs = [tuple(rat(c) for c in v) for v in vectors]
    for v in vecs:
        if len(v) != vp.dim:
            raise InputError("vector dimension does not match the polytope")
    if check_members:
        for idx, v in enumerate(vecs):
            if in_hull(v, vp):
                raise PreconditionError(
                    f"vector {idx} lies inside the polytope; not a legal core subset")
    if not vp.vertices or not vecs:
        return False, None

    nl, nm = len(vecs), len(vp.vertices)
    names = [f"l{i}" for i in range(nl)] + [f"m{j}" for j in range(nm)]
    rows = []
    for c in range(vp.dim):
        coeffs = [v[c] for v in vecs] + [-u[c] for u in vp.vertices]
        rows.append((tuple(coeffs), EQ, Fraction(0)))
    rows.append((tuple([Fraction(1)] * nl + [Fraction(0)] * nm), EQ, Fraction(1)))
    rows.append((tuple([Fraction(0)] * nl + [Fraction(1)] * nm), EQ, Fraction(1)))
    for j in range(nl + nm):
        e = [Fraction(0)] * (nl + nm)
        e[j] = Fraction(-1)
        rows.append((tuple(e), LE, Fraction(0)))
    res = solve_lp(poly(names, rows), [0] * (nl + nm), "max")
    if res.status == "infeasible":
        return False, None
    lambdas = tuple(res.point[:nl])
    mus = tuple(res.point[nl:])
    point = tuple(sum((l * v[c] for l, v in zip(lambdas, vecs)), Fraction(0))
                  for c in range(vp.dim))
    witness = ConflictWitness(point, lambdas, mus)
    assert witness.verify(vecs, vp)
    return True, witness


def vpolytope_to_hform(vp: VPolytope, max_vertices: int = 24) -> HPolyhedron:
    """Inequality form of conv(vertices) by eliminating the weights.

    Desk-scale oracle; guarded because Fourier-Motzkin cost grows quickly.
    """
    if len(vp.vertices) > max_vertices:
        raise CapacityError(f"{len(vp.vertices)} vertices exceeds the cap of {max_vertices}")
    labels = [str(l) for l in vp.labels]
    names = labels + [f"_mu{j}" for j in range(len(vp.vertices))]
    n = len(names)
    rows = []
    for c in range(vp.dim):
        coeffs = [Fraction(0)] * n
        coeffs[c] = Fraction(1)
        for j, v in enumerate(vp.vertices):
            coeffs[vp.dim + j] = -v[c]
        rows.append((tuple(coeffs), EQ, Fraction(0)))
    coeffs = [Fraction(0)] * n
    for j in range(len(vp.vertices)):
        coeffs[vp.dim + j] = Fraction(1)
    rows.append((tuple(coeffs), EQ, Fraction(1)))
    for j in range(len(vp.vertices)):
        e = [Fraction(0)] * n
        e[vp.dim + j] = Fraction(-1)
        rows.append((tuple(e), LE, Fraction(0)))
    return project_onto(poly(names, rows), labels)


def _solve_square(rows: Sequence[Row], dim: int):
    a = [list(r.coeffs) for r in rows]
    b = [r.rhs for r in rows]
    for col in range(dim):
        piv = next((r for r in range(col, dim) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [v * inv for v in a[col]]
        b[col] *= inv
        for r in range(dim):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                b[r] -= f * b[col]
    return tuple(b)


def enumerate_vertices(p: HPolyhedron, max_bases: int = 200000) -> list:
    """Vertices of a small polyhedron by enumerating row bases.

    Every equality row is active by definition, so bases are completed from
    the inequality rows.  Intended for acceptance-scale fixtures only.
    """
    dim = p.dim
    if comb(len(p.rows), min(dim, len(p.rows))) > max_bases:
        raise CapacityError("too many candidate bases for vertex enumeration")
    seen = set()
    out = []
    for combo in itertools.combinations(p.rows, dim):
        sol = _solve_square(list(combo), dim)
        if sol is None or sol in seen:
            continue
        if p.satisfies(sol):
            seen.add(sol)
            out.append(sol)
    return out
