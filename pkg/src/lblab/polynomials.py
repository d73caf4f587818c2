"""Exact rational polynomial arithmetic.

Univariate polynomials are dense, multivariate ones are sparse exponent maps.
Coefficients are `fractions.Fraction` throughout so that degree bookkeeping is
exact: a floating-point representation would manufacture tiny spurious terms
and break the degree assertions made by the symbolic tracer.

Also provides second-kind Chebyshev polynomials, their zeros, and the signed
moments of sgn(U_k), which are the orthogonality workhorse behind the
uniform-norm lower bounds.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import mpmath

# Degree of the zero polynomial.  A sentinel (not -1) keeps max/+ arithmetic
# on degrees total.
NEG_INF = float("-inf")


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


class UniPoly:
    """Dense univariate polynomial with exact rational coefficients.

    coeffs[i] is the coefficient of eta**i; trailing zeros are normalized
    away at construction.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def constant(cls, c) -> "UniPoly":
        return cls([c])

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        # Horner; exact when x is a Fraction or int.
        acc = x * 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            a[i] += c
        return UniPoly(a)

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def scale(self, r) -> "UniPoly":
        r = _frac(r)
        return UniPoly([c * r for c in self.coeffs])

    def affine_compose(self, alpha, beta) -> "UniPoly":
        """Return p(alpha*eta + beta), same degree when alpha != 0."""
        alpha, beta = _frac(alpha), _frac(beta)
        lin = UniPoly([beta, alpha])
        acc = UniPoly()
        for c in reversed(self.coeffs):
            acc = acc * lin + c
        return acc

    def to_multi(self) -> "MultiPoly":
        return MultiPoly(1, {(i,): c for i, c in enumerate(self.coeffs) if c})

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)})"


class MultiPoly:
    """Sparse multivariate polynomial: exponent tuple -> rational coefficient.

    Zero coefficients are never stored.  Total degree is the maximal sum of
    exponents over stored terms.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = int(nvars)
        clean = {}
        for exp, c in (terms or {}).items():
            c = _frac(c)
            if c == 0:
                continue
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.nvars or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent tuple {exp} for {self.nvars} variables")
            clean[exp] = clean.get(exp, Fraction(0)) + c
        self.terms = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MultiPoly":
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): 1})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self):
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    def degree_in(self, i: int):
        if not self.terms:
            return NEG_INF
        return max(e[i] for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def _check(self, other):
        if self.nvars != other.nvars:
            raise ValueError("indeterminate-count mismatch")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(self.nvars, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MultiPoly(self.nvars, out)

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(self.nvars, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, Fraction)):
            return self.scale(other)
        self._check(other)
        out = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, r) -> "MultiPoly":
        r = _frac(r)
        return MultiPoly(self.nvars, {e: c * r for e, c in self.terms.items()})

    def __call__(self, point):
        if len(point) != self.nvars:
            raise ValueError("point length != indeterminate count")
        acc = None
        for e, c in self.terms.items():
            t = c
            for x, p in zip(point, e):
                for _ in range(p):
                    t = t * x
            acc = t if acc is None else acc + t
        if acc is None:
            return Fraction(0) if all(isinstance(x, (int, Fraction)) for x in point) else 0.0
        return acc

    def to_uni(self) -> UniPoly:
        if self.nvars != 1:
            raise ValueError("not univariate")
        n = max((e[0] for e in self.terms), default=-1)
        cs = [Fraction(0)] * (n + 1)
        for e, c in self.terms.items():
            cs[e[0]] = c
        return UniPoly(cs)

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self.terms})"


def poly_arith(a, b=None, op="add", r=None, alpha=None, beta=None):
    """Single entry point for the arithmetic kernel.

    op in {"add", "mul", "scale", "affine_compose"}.  scale takes r;
    affine_compose takes (alpha, beta) and requires a univariate input.
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(r)
    if op == "affine_compose":
        if isinstance(a, MultiPoly):
            a = a.to_uni()
        return a.affine_compose(alpha, beta)
    raise ValueError(f"unknown op {op!r}")


def poly_eval(p, point):
    if isinstance(p, UniPoly):
        if len(point) != 1:
            raise ValueError("point length != indeterminate count")
        return p(point[0])
    return p(point)


class PolyVector:
    """A vector of MultiPoly entries sharing an indeterminate count.

    `budget` is the degree budget the owning trace is accountable to; the
    checking policy (total degree vs per-variable degree) lives with the
    tracer, this type only carries the number and the measurement helpers.
    """

    __slots__ = ("entries", "budget")

    def __init__(self, entries, budget=0):
        entries = list(entries)
        if entries:
            nv = entries[0].nvars
            if any(e.nvars != nv for e in entries):
                raise ValueError("mixed indeterminate counts")
        self.entries = entries
        self.budget = budget

    @classmethod
    def zeros(cls, d: int, nvars: int, budget=0) -> "PolyVector":
        return cls([MultiPoly(nvars, {}) for _ in range(d)], budget)

    @property
    def nvars(self):
        return self.entries[0].nvars if self.entries else 0

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def max_total_degree(self):
        degs = [e.total_degree for e in self.entries]
        return max(degs) if degs else NEG_INF

    def variable_degree_sum(self):
        """Sum over variables of the largest degree any entry has in it."""
        total = 0
        for v in range(self.nvars):
            dv = max((e.degree_in(v) for e in self.entries), default=NEG_INF)
            if dv != NEG_INF:
                total += dv
        return total

    def __add__(self, other):
        if isinstance(other, PolyVector):
            return PolyVector([a + b for a, b in zip(self.entries, other.entries)], self.budget)
        return NotImplemented

    def __sub__(self, other):
        return PolyVector([a - b for a, b in zip(self.entries, other.entries)], self.budget)

    def __mul__(self, r):
        return PolyVector([e.scale(_frac(r)) for e in self.entries], self.budget)

    __rmul__ = __mul__

    def with_entry(self, i, p) -> "PolyVector":
        es = list(self.entries)
        es[i] = p
        return PolyVector(es, self.budget)

    def eval_float(self, point):
        return [float(e(tuple(Fraction(x) for x in point))) for e in self.entries]


# ---------------------------------------------------------------------------
# Chebyshev polynomials of the second kind


def chebyshev_U(k: int) -> UniPoly:
    """U_k via the recurrence U_0 = 1, U_1 = 2*eta, U_{k+1} = 2*eta*U_k - U_{k-1}."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    u_prev = UniPoly([1])
    if k == 0:
        return u_prev
    u = UniPoly([0, 2])
    two_eta = UniPoly([0, 2])
    for _ in range(k - 1):
        u_prev, u = u, two_eta * u - u_prev
    return u


def chebyshev_U_zeros(k: int) -> list:
    """Zeros of U_k: cos(j*pi/(k+1)), j = 1..k, strictly decreasing in (-1, 1)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return [math.cos(j * math.pi / (k + 1)) for j in range(1, k + 1)]


def sgn_chebyshev_moment(j: int, k: int, dps: int = 50):
    """Integral of eta**j * sgn(U_k(eta)) over [-1, 1].

    Computed from the sign pattern, not by sampling: sgn(U_k) is piecewise
    constant between consecutive zeros cos(m*pi/(k+1)), equal to +1 on the
    rightmost piece and alternating leftward.  The antiderivative
    eta**(j+1)/(j+1) is evaluated at the breakpoints in high precision.
    For j <= k-1 the result vanishes (sign-pattern orthogonality).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    with mpmath.workdps(dps):
        pts = [mpmath.cos(mpmath.pi * m / (k + 1)) for m in range(k + 2)]
        # pts runs from +1 down to -1; piece m lies on (pts[m+1], pts[m])
        total = mpmath.mpf(0)
        sign = 1
        for m in range(k + 1):
            hi, lo = pts[m], pts[m + 1]
            total += sign * (hi ** (j + 1) - lo ** (j + 1)) / (j + 1)
            sign = -sign
        return float(total)


# ---------------------------------------------------------------------------
# Serialization: {"vars": n, "terms": [{"exp": [...], "num": "...", "den": "..."}]}


def poly_to_json(p) -> str:
    if isinstance(p, UniPoly):
        p = p.to_multi()
    terms = [
        {"exp": list(e), "num": str(c.numerator), "den": str(c.denominator)}
        for e, c in sorted(p.terms.items())
    ]
    return json.dumps({"vars": p.nvars, "terms": terms})


def poly_from_json(s: str) -> MultiPoly:
    d = json.loads(s)
    terms = {
        tuple(t["exp"]): Fraction(int(t["num"]), int(t["den"])) for t in d["terms"]
    }
    return MultiPoly(d["vars"], terms)
