"""Translation-invariant valuations built from mixed volumes.

A term ``(c, p, [A_1..A_{n-p}])`` is the valuation

    K -> c * C(n, p) * V(K[p], A_1, ..., A_{n-p}),

which is the transform of the constant current c * omega_{A_1}^..^omega_{A_{n-p}}/(n-p)!
under K -> int omega_K^p/p! ^ Omega. With this normalisation the degree-n term
without companions is the volume, and

    mu_A = sum_k (1, n-k, [A]*k)

satisfies mu_A(K) = vol(K + A).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .bodies import intersect, mixed_volume, union_convexity_check, union_hull, box
from ._linalg import exact_solve
from .poly import as_fraction

__all__ = [
    "Term",
    "Valuation",
    "valuation_eval",
    "valuation_convolve",
    "valuation_translate",
    "mcmullen_decompose",
    "valuation_additivity_check",
    "monotonicity_check",
    "lebesgue",
    "trivial",
    "mu",
    "contained_in",
]


@dataclass(frozen=True)
class Term:
    c: Fraction
    p: int
    companions: tuple


class Valuation:
    """Finite signed combination of mixed-volume terms in R^n."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=()):
        self.n = n
        out = []
        for t in terms:
            if not isinstance(t, Term):
                c, p, comps = t
                t = Term(as_fraction(c), p, tuple(comps))
            if not 0 <= t.p <= n:
                raise ValueError(f"degree {t.p} out of range for n={n}")
            if len(t.companions) != n - t.p:
                raise ValueError(f"degree {t.p} needs {n - t.p} companions, got {len(t.companions)}")
            if any(a.n != n for a in t.companions):
                raise ValueError("companion of the wrong dimension")
            if t.c:
                out.append(t)
        self.terms = tuple(out)

    def __add__(self, other):
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return Valuation(self.n, self.terms + other.terms)

    def __mul__(self, c):
        c = as_fraction(c)
        return Valuation(self.n, [Term(t.c * c, t.p, t.companions) for t in self.terms])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __call__(self, k):
        return valuation_eval(self, k)

    def degrees(self):
        return sorted({t.p for t in self.terms})

    def __repr__(self):
        return f"Valuation(n={self.n}, {len(self.terms)} terms, degrees={self.degrees()})"


def lebesgue(n):
    return Valuation(n, [(1, n, ())])


def trivial(n):
    """The constant valuation 1, as V(unit cube[n]) in degree 0."""
    cube = box([0] * n, [1] * n)
    return Valuation(n, [(1, 0, (cube,) * n)])


def mu(a):
    """mu_A(K) = vol(K + A)."""
    n = a.n
    return Valuation(n, [(1, n - k, (a,) * k) for k in range(n + 1)])


def valuation_eval(v, k):
    """sum over terms of c * C(n, p) * V(K[p], A...)."""
    n = v.n
    if k.n != n:
        raise ValueError("body of the wrong dimension")
    total = Fraction(0)
    for t in v.terms:
        if t.p == 0:
            total += t.c * mixed_volume(list(t.companions))
        else:
            total += t.c * comb(n, t.p) * mixed_volume([k] * t.p + list(t.companions))
    return total


def valuation_convolve(v1, v2):
    """Convolution matching the wedge product of the underlying currents.

    Companions concatenate and the coefficient picks up C(a+b, a) from the
    (n-p)! normalisation; a product with more than n companions is zero.
    The Lebesgue valuation is the unit.
    """
    if v1.n != v2.n:
        raise ValueError("dimension mismatch")
    n = v1.n
    out = []
    for t1 in v1.terms:
        for t2 in v2.terms:
            a, b = n - t1.p, n - t2.p
            if a + b > n:
                continue
            out.append(Term(t1.c * t2.c * comb(a + b, a), n - a - b, t1.companions + t2.companions))
    return Valuation(n, out)


def valuation_translate(v, a):
    """theta_A(K) = theta(K + A), realised as convolution with mu_A."""
    return valuation_convolve(v, mu(a))


def mcmullen_decompose(v, k):
    """Homogeneous parts theta_p(K), p = 0..n, from v(tK) at t = 0..n."""
    n = v.n
    values = [valuation_eval(v, k.scale(t)) for t in range(n + 1)]
    rows = [[Fraction(t) ** p for p in range(n + 1)] for t in range(n + 1)]
    return exact_solve(rows, values)


def valuation_additivity_check(v, p, q):
    """v(P cup Q) + v(P cap Q) = v(P) + v(Q) for a convex union."""
    if not union_convexity_check(p, q):
        raise ValueError("P cup Q is not convex")
    u, i = union_hull(p, q), intersect(p, q)
    return valuation_eval(v, u) + valuation_eval(v, i) == valuation_eval(v, p) + valuation_eval(v, q)


def contained_in(k, l):
    """K subset L, tested on the vertices of K."""
    hs = l.halfspaces()
    return all(all(sum(a * x for a, x in zip(h, vert)) <= b for h, b in hs) for vert in k.vertices)


def monotonicity_check(v, pairs):
    """True when v(K) <= v(L) for every nested pair (K, L)."""
    for k, l in pairs:
        if not contained_in(k, l):
            raise ValueError("pair is not nested")
        if valuation_eval(v, k) > valuation_eval(v, l):
            return False
    return True
