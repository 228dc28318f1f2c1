"""Exact arithmetic kernel: Gaussian rationals, small dense matrices, and
rational linear algebra (reduced row echelon form, nullspaces, ranks).

Matrices are tuples of row tuples.  Dimensions here are tiny (d <= 4 for
observables, a few hundred columns for constraint systems), so plain Python
beats anything clever.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class ComplexRational:
    """A complex number with arbitrary precision rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, value) -> "ComplexRational":
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(value)

    def __add__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ComplexRational.coerce(other) - self

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __mul__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = ComplexRational.coerce(other)
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by zero complex rational")
        num = self * other.conjugate()
        return ComplexRational(num.re / norm, num.im / norm)

    def __rtruediv__(self, other):
        return ComplexRational.coerce(other) / self

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        try:
            other = ComplexRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"ComplexRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


_RATIONAL = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or a decimal literal exactly."""
    text = str(text).strip()
    if not re.fullmatch(_RATIONAL, text):
        raise ValueError(f"malformed rational {text!r}")
    if "/" in text:
        num, den = text.split("/")
        return Fraction(num) / Fraction(den)
    return Fraction(text)


def parse_complex(text) -> ComplexRational:
    """Parse strings such as ``"1/2"``, ``"-i"``, ``"1-2/3*i"``, ``"0.5+i"``."""
    if isinstance(text, (int, Fraction)):
        return ComplexRational(text)
    s = str(text).replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    if s[-1] not in "ij":
        return ComplexRational(parse_rational(s))
    body = s[:-1]
    if body.endswith("*"):
        body = body[:-1]
    # split at the last sign that is not part of an exponent or leading
    cut = None
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "eE/":
            cut = pos
            break
    re_part, im_part = (body[:cut], body[cut:]) if cut is not None else ("", body)
    if im_part in ("", "+"):
        im = Fraction(1)
    elif im_part == "-":
        im = Fraction(-1)
    else:
        im = parse_rational(im_part)
    re_val = parse_rational(re_part) if re_part else Fraction(0)
    return ComplexRational(re_val, im)


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# --- matrices ----------------------------------------------------------------

Matrix = tuple  # tuple[tuple[ComplexRational, ...], ...]


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(ComplexRational.coerce(x) for x in row) for row in rows)


def identity(d: int) -> Matrix:
    return tuple(tuple(ComplexRational(1 if i == j else 0) for j in range(d)) for i in range(d))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m = len(a), len(b[0])
    inner = len(b)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(inner)), ComplexRational()) for j in range(m))
        for i in range(n)
    )


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: Matrix, s) -> Matrix:
    s = ComplexRational.coerce(s)
    return tuple(tuple(s * x for x in row) for row in a)


def dagger(a: Matrix) -> Matrix:
    return tuple(tuple(a[j][i].conjugate() for j in range(len(a))) for i in range(len(a[0])))


def is_zero(a: Matrix) -> bool:
    return not any(x for row in a for x in row)


def is_hermitian(a: Matrix) -> bool:
    return len(a) == len(a[0]) and a == dagger(a)


def commutes(a: Matrix, b: Matrix) -> bool:
    return mat_mul(a, b) == mat_mul(b, a)


def kron(a: Matrix, b: Matrix) -> Matrix:
    rows = []
    for ra in a:
        for rb in b:
            rows.append(tuple(x * y for x in ra for y in rb))
    return tuple(rows)


def to_numpy(a: Matrix):
    import numpy as np

    return np.array([[complex(x) for x in row] for row in a], dtype=complex)


# --- rational linear algebra --------------------------------------------------

def _integer_row(row) -> list[int]:
    fr = [Fraction(x) for x in row]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    return [int(x * den) for x in fr]


def rref(rows: Sequence[Sequence[Fraction]], ncols: int | None = None):
    """Reduced row echelon form over the rationals.

    Returns ``(reduced_rows, pivot_columns)``; zero rows are dropped.
    Elimination runs on primitive integer rows; Fractions appear only when
    each finished row is divided by its pivot.
    """
    m = [_integer_row(r) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        prow = _primitive(m[r])
        m[r] = prow
        p = prow[c]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                x = m[i][c]
                g = gcd(x, p)
                fp, fx = p // g, x // g
                m[i] = _primitive([fp * a - fx * b for a, b in zip(m[i], prow)])
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    out = []
    for row, c in zip(m[:r], pivots):
        p = row[c]
        out.append([Fraction(x, p) for x in row])
    return out, pivots


def solve_affine(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]):
    """General solution of ``a x = b``.

    Returns ``(particular, nullspace_basis)`` or ``None`` when inconsistent.
    The particular solution sets every free variable to zero.
    """
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(a, b)]
    red, piv = rref(aug, ncols + 1)
    if piv and piv[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, piv):
        x[p] = row[ncols]
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(v)
    return x, basis


def nearest_affine_solution(a, b, approx: Sequence[float], max_denominator: int):
    """Exact solution of ``a x = b`` close to ``approx``.

    Free variables of the reduced echelon form are rounded to nearby
    rationals; pivot variables are then determined exactly.  Returns
    ``None`` when the system is inconsistent.
    """
    ncols = len(approx)
    aug = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(a, b)]
    red, piv = rref(aug, ncols + 1) if aug else ([], [])
    if piv and piv[-1] == ncols:
        return None
    pivset = set(piv)
    x = [Fraction(0)] * ncols
    for c in range(ncols):
        if c not in pivset:
            x[c] = Fraction(float(approx[c])).limit_denominator(max_denominator)
    for row, p in zip(red, piv):
        x[p] = row[ncols] - sum((row[c] * x[c] for c in range(ncols) if c not in pivset and row[c]),
                                Fraction(0))
    return x


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        g = gcd(g, x)
        if g == 1:
            return row
    return [x // g for x in row] if g > 1 else row


class IncrementalRank:
    """Exact rank of a growing set of integer vectors.

    Fraction-free elimination: each basis row is kept primitive and each new
    row is reduced by integer cross-multiplication, which keeps entries small
    for the +-1/+-2 difference vectors this is used on.
    """

    def __init__(self, width: int):
        self.width = width
        self._basis: list[tuple[int, list[int]]] = []  # (pivot column, row)

    @property
    def rank(self) -> int:
        return len(self._basis)

    def add(self, vec: Sequence[int]) -> bool:
        """Insert ``vec``; return True when it increased the rank."""
        row = [int(x) for x in vec]
        for col, brow in self._basis:
            x = row[col]
            if x:
                p = brow[col]
                g = gcd(x, p)
                fx, fp = p // g, x // g
                row = [fx * r - fp * b for r, b in zip(row, brow)]
        lead = next((c for c, x in enumerate(row) if x), None)
        if lead is None:
            return False
        row = _primitive(row)
        # keep the basis fully reduced on this pivot column
        for k, (col, brow) in enumerate(self._basis):
            y = brow[lead]
            if y:
                g = gcd(y, row[lead])
                fb, fr = row[lead] // g, y // g
                self._basis[k] = (col, _primitive([fb * b - fr * r for b, r in zip(brow, row)]))
        self._basis.append((lead, row))
        return True


def integer_rank(rows: Iterable[Sequence[int]], width: int, stop_at: int | None = None) -> int:
    tracker = IncrementalRank(width)
    for row in rows:
        tracker.add(row)
        if stop_at is not None and tracker.rank >= stop_at:
            break
    return tracker.rank


def affine_rank(points: Iterable[Sequence[int]], width: int, stop_at: int | None = None) -> int:
    """Affine dimension of a finite set of integer points (-1 for the empty set)."""
    it = iter(points)
    try:
        base = [int(x) for x in next(it)]
    except StopIteration:
        return -1
    diffs = ([int(x) - y for x, y in zip(p, base)] for p in it)
    return integer_rank(diffs, width, stop_at)
