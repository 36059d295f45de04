"""Product spaces, sections, and translations of extended formulations.

The product space over 0/1 variables x_1..x_d has one coordinate per nonempty
subset of the variables; singletons coincide with the originals.  In the mixed
case each subset additionally pairs with at most one fractional variable, and
the fractional variables themselves appear as bare keys.  A section maps each
feasible 0/1 point of the base polytope to a feasible point of an extended
formulation lying over it; interpolating the section over the subset lattice
turns any extended formulation into one over the product space with the same
number of rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .exactlp import EQ, LE, HPolyhedron, InputError, Row, rat, rat_str


@dataclass(frozen=True)
class ProductKey:
    """A product coordinate: a set of 0/1 variable indices, optionally
    paired with exactly one fractional variable index.

    `ints` may be empty only when `frac` is set (that key is the fractional
    variable itself).
    """

    ints: frozenset
    frac: Optional[int] = None

    def __post_init__(self):
        if not self.ints and self.frac is None:
            raise InputError("empty product key")

    @property
    def is_singleton(self) -> bool:
        return self.frac is None and len(self.ints) == 1

    def sort_key(self):
        return (0 if self.frac is None else 1,
                self.frac if self.frac is not None else -1,
                len(self.ints), tuple(sorted(self.ints)))

    def __str__(self):
        body = "{" + ",".join(str(i) for i in sorted(self.ints)) + "}"
        if self.frac is None:
            return body
        if not self.ints:
            return f"w[{self.frac}]"
        return f"{body}*w[{self.frac}]"


def key(ints: Iterable[int] = (), frac: Optional[int] = None) -> ProductKey:
    return ProductKey(frozenset(ints), frac)


def parse_key(text: str) -> ProductKey:
    text = text.strip()
    if text.startswith("w[") and text.endswith("]"):
        return key((), int(text[2:-1]))
    frac = None
    if "*w[" in text:
        body, _, tail = text.partition("*w[")
        frac = int(tail.rstrip("]"))
    else:
        body = text
    if not (body.startswith("{") and body.endswith("}")):
        raise InputError(f"bad product key {text!r}")
    inner = body[1:-1].strip()
    ints = frozenset(int(t) for t in inner.split(",")) if inner else frozenset()
    return ProductKey(ints, frac)


def key_var_name(k: ProductKey, int_names: Sequence[str], frac_names: Sequence[str] = ()) -> str:
    """Variable token for a key: originals for singletons, else z{..} / v{..}w<j>.

    Indices inside the braces are 1-based positions in `int_names`, matching
    the serialization used for lifted systems.
    """
    if k.frac is None:
        if len(k.ints) == 1:
            return int_names[next(iter(k.ints))]
        inner = ",".join(str(i + 1) for i in sorted(k.ints))
        return "z{" + inner + "}"
    if not k.ints:
        return frac_names[k.frac]
    inner = ",".join(str(i + 1) for i in sorted(k.ints))
    return "v{" + inner + "}w" + str(k.frac + 1)


def pure_keys(d: int, max_size: Optional[int] = None) -> list:
    """All nonempty pure keys over indices 0..d-1, canonically ordered."""
    cap = d if max_size is None else min(max_size, d)
    out = []
    for size in range(1, cap + 1):
        for combo in itertools.combinations(range(d), size):
            out.append(key(combo))
    return out


class SparseProductVector(dict):
    """Partial map ProductKey -> Fraction; absent keys read as 0."""

    def __missing__(self, k):
        return Fraction(0)

    def restrict(self, keys: Sequence[ProductKey]) -> tuple:
        return tuple(self[k] for k in keys)


def product_section(x: Sequence[int]) -> SparseProductVector:
    """f over pure keys: 1 on subsets of the support of x, 0 elsewhere.

    Only support subsets are materialized.
    """
    support = _support(x)
    out = SparseProductVector()
    for size in range(1, len(support) + 1):
        for combo in itertools.combinations(support, size):
            out[key(combo)] = Fraction(1)
    return out


def mixed_product_section(x: Sequence[int], w: Sequence) -> SparseProductVector:
    """Mixed section: pure keys as product_section, key (E, j) carries
    w_j when E is inside the support, and each bare w_j appears as its own key."""
    support = _support(x)
    out = product_section(x)
    wv = [rat(v) for v in w]
    for j, val in enumerate(wv):
        if val:
            out[key((), j)] = val
    for size in range(1, len(support) + 1):
        for combo in itertools.combinations(support, size):
            for j, val in enumerate(wv):
                if val:
                    out[key(combo, j)] = val
    return out


def _support(x: Sequence[int]):
    support = []
    for i, v in enumerate(x):
        if v == 1:
            support.append(i)
        elif v != 0:
            raise InputError(f"coordinate {i} is not 0/1: {v!r}")
    return tuple(support)


@dataclass(frozen=True)
class IndicatorCoefficients:
    """Coefficients a^s with sum_E a^s_E f_E(x) + constant == [x == s].

    Nonzero entries sit on supersets of the support of s.  For s == 0 the
    empty set appears; it is carried by `constant` so that keys stay nonempty.
    """

    constant: Fraction
    by_set: Dict[frozenset, Fraction]

    def evaluate_at(self, x: Sequence[int]) -> Fraction:
        support = frozenset(_support(x))
        total = self.constant
        for E, a in self.by_set.items():
            if E <= support:
                total += a
        return total


def indicator_coefficients(s: Sequence[int], d: Optional[int] = None) -> IndicatorCoefficients:
    """Coefficients of the point indicator in the product basis.

    Built iteratively over supersets of the support of s: the support itself
    gets 1, and every strictly larger set gets minus the sum of its proper
    subsets' coefficients.
    """
    if d is None:
        d = len(s)
    if d > 24:
        raise InputError("indicator construction capped at 24 variables")
    base = frozenset(_support(s))
    rest = sorted(set(range(d)) - base)
    coeff = {base: Fraction(1)}
    for size in range(len(base) + 1, d + 1):
        for extra in itertools.combinations(rest, size - len(base)):
            E = base | frozenset(extra)
            total = Fraction(0)
            for sub in coeff:
                if sub < E:
                    total += coeff[sub]
            coeff[E] = -total
    constant = coeff.pop(frozenset(), Fraction(0))
    return IndicatorCoefficients(constant, coeff)


# ---------------------------------------------------------------------------
# sections of extended formulations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectionTable:
    """A section of an EF, tabulated on 0/1 points.

    `columns` lists the EF's variables; each entry maps a 0/1 pattern on
    `x_vars` to a full vector over `columns` that is feasible for the EF and
    projects back to the pattern.
    """

    x_vars: tuple
    columns: tuple
    entries: dict  # pattern tuple -> tuple of Fractions over columns

    def patterns(self):
        return sorted(self.entries)

    def vector(self, pattern) -> tuple:
        return self.entries[pattern]


def section_table(x_vars, columns, entries) -> SectionTable:
    fixed = {}
    for pattern, vec in entries.items():
        pat = tuple(int(v) for v in pattern)
        if any(v not in (0, 1) for v in pat):
            raise InputError(f"pattern {pattern!r} is not 0/1")
        if len(vec) != len(columns):
            raise InputError(f"entry for {pattern!r} has wrong length")
        fixed[pat] = tuple(rat(v) for v in vec)
    return SectionTable(tuple(x_vars), tuple(columns), fixed)


def section_to_text(table: SectionTable) -> str:
    lines = ["x: " + " ".join(table.x_vars), "cols: " + " ".join(table.columns)]
    for pattern in table.patterns():
        point = "".join(str(b) for b in pattern)
        vec = " ".join(rat_str(v) for v in table.vector(pattern))
        lines.append(f"{point} -> {vec}")
    return "\n".join(lines) + "\n"


def section_from_text(text: str) -> SectionTable:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if len(lines) < 2 or not lines[0].startswith("x:") or not lines[1].startswith("cols:"):
        raise InputError("expected 'x:' and 'cols:' header lines")
    x_vars = tuple(lines[0][2:].split())
    columns = tuple(lines[1][5:].split())
    entries = {}
    for lineno, ln in enumerate(lines[2:], start=3):
        left, sep, right = ln.partition("->")
        if not sep:
            raise InputError(f"line {lineno}: missing '->'")
        pattern = tuple(int(ch) for ch in left.strip())
        vec = tuple(Fraction(t) for t in right.split())
        entries[pattern] = vec
    return section_table(x_vars, columns, entries)


class SectionError(ValueError):
    """The claimed section is not one; carries the offending point and row."""

    def __init__(self, message, point=None, row=None):
        super().__init__(message)
        self.point = point
        self.row = row


@dataclass(frozen=True)
class AffineKeyForm:
    """constant + sum over keys of coeff * z_key."""

    constant: Fraction = Fraction(0)
    coeffs: dict = field(default_factory=dict)  # ProductKey -> Fraction


@dataclass(frozen=True)
class SubstitutionMatrix:
    """One affine key form per substituted EF variable."""

    forms: dict  # y variable name -> AffineKeyForm

    def evaluate(self, y_name: str, section_point: SparseProductVector) -> Fraction:
        form = self.forms[y_name]
        total = form.constant
        for k, c in form.coeffs.items():
            total += c * section_point[k]
        return total


def boolean_mobius(values: dict, d: int) -> AffineKeyForm:
    """Interpolate h: {0,1}^d -> Q in the subset basis (exact, unique).

    values maps every pattern to h(pattern); the result satisfies
    h(x) = constant + sum over nonempty E subseteq support(x) of coeff[E].
    """
    alphas = {}
    for size in range(0, d + 1):
        for combo in itertools.combinations(range(d), size):
            T = frozenset(combo)
            pattern = tuple(1 if i in T else 0 for i in range(d))
            total = values[pattern]
            for sub in alphas:
                if sub < T:
                    total -= alphas[sub]
            alphas[T] = total
    constant = alphas.pop(frozenset())
    coeffs = {key(E): a for E, a in alphas.items() if a != 0}
    return AffineKeyForm(constant, coeffs)


def fourier_coefficients(table: SectionTable, y_vars: Sequence[str]) -> SubstitutionMatrix:
    """Exact interpolation of every auxiliary coordinate of a total section."""
    d = len(table.x_vars)
    if len(table.entries) != 2 ** d:
        raise InputError("section table must cover all 0/1 points; extend it first")
    col_index = {c: i for i, c in enumerate(table.columns)}
    forms = {}
    for y in y_vars:
        j = col_index[y]
        values = {pat: vec[j] for pat, vec in table.entries.items()}
        forms[y] = boolean_mobius(values, d)
    return SubstitutionMatrix(forms)


def extend_section_with_zeros(table: SectionTable) -> SectionTable:
    """Total-ize a section by assigning the zero vector off its domain.

    Any extension works for the translation since only feasible points are
    ever compared; zero is canonical and deterministic.
    """
    d = len(table.x_vars)
    entries = dict(table.entries)
    zero = tuple(Fraction(0) for _ in table.columns)
    for pattern in itertools.product((0, 1), repeat=d):
        entries.setdefault(pattern, zero)
    return SectionTable(table.x_vars, table.columns, entries)


def check_section(Q: HPolyhedron, table: SectionTable) -> None:
    """Verify each tabulated point is feasible for Q and projects correctly."""
    if tuple(table.columns) != tuple(Q.variables):
        raise InputError("section columns do not match the formulation's variables")
    x_pos = [Q.index(v) for v in table.x_vars]
    for pattern, vec in sorted(table.entries.items()):
        for bit, pos in zip(pattern, x_pos):
            if vec[pos] != bit:
                raise SectionError(
                    f"section image of {pattern} does not project back to it",
                    point=pattern)
        for ridx, row in enumerate(Q.rows):
            if not row.satisfied_by(vec):
                raise SectionError(
                    f"section image of {pattern} violates row {ridx}",
                    point=pattern, row=ridx)


def _substitute_rows(Q, x_vars, y_vars, passthrough, forms, int_names, frac_names):
    """Rewrite Q's rows with each y replaced by its affine key form."""
    used_keys = set()
    for form in forms.values():
        used_keys.update(form.coeffs)
    for i in range(len(int_names)):
        used_keys.add(key((i,)))
    for name in passthrough:
        used_keys.add(key((), frac_names.index(name)))
    ordered = sorted(used_keys, key=ProductKey.sort_key)
    names = [key_var_name(k, int_names, frac_names) for k in ordered]
    pos = {k: t for t, k in enumerate(ordered)}

    x_idx = {v: i for i, v in enumerate(int_names)}
    rows = []
    for row in Q.rows:
        coeffs = [Fraction(0)] * len(ordered)
        rhs = row.rhs
        for var, c in zip(Q.variables, row.coeffs):
            if c == 0:
                continue
            if var in x_idx:
                coeffs[pos[key((x_idx[var],))]] += c
            elif var in passthrough:
                coeffs[pos[key((), frac_names.index(var))]] += c
            else:
                form = forms[var]
                rhs -= c * form.constant
                for k, fc in form.coeffs.items():
                    coeffs[pos[k]] += c * fc
        rows.append(Row(tuple(coeffs), row.rel, rhs))
    return HPolyhedron(tuple(names), tuple(rows))


def translate_ef(Q: HPolyhedron, table: SectionTable):
    """Translate an EF of a 0/1 polytope into the product space.

    Returns (translated system, substitution matrix).  The section is checked
    first; the row count is preserved, and only keys that actually receive a
    nonzero coefficient are materialized (plus all singletons).
    """
    check_section(Q, table)
    total = extend_section_with_zeros(table)
    y_vars = [v for v in Q.variables if v not in table.x_vars]
    matrix = fourier_coefficients(total, y_vars)
    out = _substitute_rows(Q, table.x_vars, y_vars, (), matrix.forms,
                           list(table.x_vars), [])
    assert len(out.rows) == len(Q.rows)
    return out, matrix


@dataclass(frozen=True)
class MixedSectionTable:
    """A mixed-linear section: per feasible pattern, each auxiliary variable
    is an affine function of the fractional variables."""

    x_vars: tuple
    w_vars: tuple
    y_vars: tuple
    # pattern -> {y name -> (constant, {w name -> coeff})}
    tables: dict


def mixed_section_table(x_vars, w_vars, y_vars, tables) -> MixedSectionTable:
    fixed = {}
    for pattern, per_y in tables.items():
        pat = tuple(int(v) for v in pattern)
        entry = {}
        for y in y_vars:
            if y not in per_y:
                raise InputError(f"missing affine form for {y!r} at pattern {pattern!r}")
            c, bs = per_y[y]
            entry[y] = (rat(c), {w: rat(v) for w, v in bs.items() if rat(v) != 0})
        fixed[pat] = entry
    return MixedSectionTable(tuple(x_vars), tuple(w_vars), tuple(y_vars), fixed)


def translate_mixed_ef(Q: HPolyhedron, section: MixedSectionTable):
    """Translate an EF with a mixed-linear section into mixed product space.

    Patterns absent from the section are treated as infeasible and contribute
    the zero affine form.  Returns (translated system, substitution matrix).
    """
    for v in section.x_vars + section.w_vars + section.y_vars:
        Q.index(v)
    d = len(section.x_vars)
    w_index = {w: j for j, w in enumerate(section.w_vars)}

    forms = {}
    for y in section.y_vars:
        constant = Fraction(0)
        coeffs: Dict[ProductKey, Fraction] = {}
        for pattern, per_y in section.tables.items():
            c_xy, b_xy = per_y[y]
            ind = indicator_coefficients(pattern, d)
            pieces = [(frozenset(), ind.constant)] if ind.constant else []
            pieces += list(ind.by_set.items())
            for E, a in pieces:
                if a == 0:
                    continue
                if c_xy != 0:
                    if E:
                        k = key(E)
                        coeffs[k] = coeffs.get(k, Fraction(0)) + a * c_xy
                    else:
                        constant += a * c_xy
                for w, b in b_xy.items():
                    k = key(E, w_index[w])
                    coeffs[k] = coeffs.get(k, Fraction(0)) + a * b
        coeffs = {k: c for k, c in coeffs.items() if c != 0}
        forms[y] = AffineKeyForm(constant, coeffs)

    out = _substitute_rows(Q, section.x_vars, section.y_vars, section.w_vars,
                           forms, list(section.x_vars), list(section.w_vars))
    assert len(out.rows) == len(Q.rows)
    return out, SubstitutionMatrix(forms)
