"""Sparse multivariate polynomials with exact rational coefficients.

These are the coefficient ring for superforms. Only what the form calculus
needs is provided: ring operations, partial derivatives, evaluation,
substitution of one variable and exact integration over a box.
"""

from fractions import Fraction
from math import prod

__all__ = ["Poly", "as_fraction"]


def as_fraction(value):
    """Convert an int, Fraction or "p/q" string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted in exact arithmetic")
    return Fraction(value)


class Poly:
    """Polynomial in ``n`` variables ``x_0..x_{n-1}``.

    Stored as a mapping from exponent tuples to nonzero Fractions. Instances
    are treated as immutable.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        clean = {}
        for exps, c in (terms or {}).items():
            if len(exps) != n:
                raise ValueError(f"exponent {exps} has wrong length for n={n}")
            c = as_fraction(c)
            if c:
                clean[tuple(exps)] = clean.get(tuple(exps), 0) + c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def constant(cls, n, c):
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n, i):
        exps = [0] * n
        exps[i] = 1
        return cls(n, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exps, c=1):
        return cls(len(exps), {tuple(exps): c})

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.n, Fraction(0))

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.n != self.n:
                raise ValueError("polynomials live in different dimensions")
            return other
        return Poly.constant(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = as_fraction(other)
            return Poly(self.n, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Poly.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n == other.n and self.terms == other.terms
        return self == self._coerce(other)

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)

    def diff(self, i):
        """Partial derivative with respect to ``x_i``."""
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return Poly(self.n, out)

    def __call__(self, point):
        """Evaluate at a point (Fractions stay exact, floats give floats)."""
        return sum(
            (c * prod(x**k for x, k in zip(point, e)) for e, c in self.terms.items()),
            Fraction(0),
        )

    def substitute(self, i, value):
        """Fix ``x_i = value``; the result still has ``n`` variables."""
        value = as_fraction(value)
        out = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[i] = 0
            e2 = tuple(e2)
            out[e2] = out.get(e2, 0) + c * value ** e[i]
        return Poly(self.n, out)

    def drop_variable(self, i):
        """Remove ``x_i`` (which must not occur), returning a poly in n-1 variables."""
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                raise ValueError(f"x{i + 1} still occurs")
            out[e[:i] + e[i + 1:]] = c
        return Poly(self.n - 1, out)

    def integrate_box(self, lower, upper):
        """Exact integral over the box prod [lower_i, upper_i]."""
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for lo, hi, k in zip(lower, upper, e):
                term *= (as_fraction(hi) ** (k + 1) - as_fraction(lo) ** (k + 1)) / (k + 1)
            total += term
        return total

    def euler(self):
        """E(f) = sum x_j df/dx_j, i.e. each monomial times its degree."""
        return Poly(self.n, {e: c * sum(e) for e, c in self.terms.items()})
