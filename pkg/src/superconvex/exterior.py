"""Exact exterior calculus of superforms.

A superform on R^n_x + R^n_xi is a sum of terms f(x) dx_I ^ dxi_K with
polynomial coefficients. Internally every form is a Grassmann algebra element
on ``2n`` generators: generator ``i`` is ``dx_i`` and generator ``n + i`` is
``dxi_i`` (or ``dy_i`` for an :class:`XYForm`). A sorted generator tuple is the
canonical monomial ``dx_I ^ dxi_K``, so stored coefficients are exactly the raw
coefficients of that monomial with no extra sign.

Indices are 0-based throughout.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial

from .poly import Poly, as_fraction

__all__ = [
    "SuperForm",
    "XYForm",
    "Box",
    "wedge",
    "apply_J",
    "apply_J_inverse",
    "sharp",
    "exterior_d",
    "exterior_dsharp",
    "delta",
    "delta_sharp",
    "lie_T",
    "hodge_star",
    "inner",
    "super_integrate",
    "boundary_integrate",
    "beta",
    "beta_xy",
    "phi_transform",
    "phi_inverse",
    "kahler_L",
    "kahler_Lambda",
    "volume_form",
    "random_poly",
    "random_form",
]


def sort_sign(seq):
    """Sort a generator sequence, returning (sign, sorted tuple).

    The sign is 0 when a generator repeats.
    """
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, None
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign, tuple(sorted(seq))


def _accumulate(out, key, coeff):
    if key in out:
        s = out[key] + coeff
        if s.is_zero():
            del out[key]
        else:
            out[key] = s
    elif not coeff.is_zero():
        out[key] = coeff


class _Form:
    """Grassmann algebra element on 2n generators with Poly coefficients."""

    __slots__ = ("n", "_t")
    _second = "xi"

    def __init__(self, n, terms=None):
        """Build a form from ``{(I, K): coefficient}``.

        ``I`` indexes ``dx`` and ``K`` the second block; both must be strictly
        increasing. Coefficients may be Poly objects or rationals.
        """
        self.n = n
        self._t = {}
        for (I, K), c in (terms or {}).items():
            I, K = tuple(I), tuple(K)
            for idx in (I, K):
                if list(idx) != sorted(set(idx)) or any(not 0 <= i < n for i in idx):
                    raise ValueError(f"bad multi-index {idx} for n={n}")
            c = c if isinstance(c, Poly) else Poly.constant(n, c)
            if c.n != n:
                raise ValueError("coefficient dimension mismatch")
            _accumulate(self._t, I + tuple(n + k for k in K), c)

    @classmethod
    def _raw(cls, n, gens_terms):
        obj = cls.__new__(cls)
        obj.n = n
        obj._t = {g: c for g, c in gens_terms.items() if not c.is_zero()}
        return obj

    @classmethod
    def scalar(cls, n, c):
        return cls(n, {((), ()): c})

    @classmethod
    def function(cls, f):
        return cls(f.n, {((), ()): f})

    @classmethod
    def dx(cls, n, i):
        return cls(n, {((i,), ()): 1})

    @classmethod
    def dsecond(cls, n, i):
        return cls(n, {((), (i,)): 1})

    def _split(self, gens):
        n = self.n
        return tuple(g for g in gens if g < n), tuple(g - n for g in gens if g >= n)

    @property
    def terms(self):
        """Mapping ``(I, K) -> Poly`` of raw canonical coefficients."""
        return {self._split(g): c for g, c in self._t.items()}

    def coefficient(self, I, K):
        g = tuple(I) + tuple(self.n + k for k in K)
        return self._t.get(g, Poly(self.n))

    def bidegrees(self):
        return {tuple(map(len, self._split(g))) for g in self._t}

    def is_pure(self):
        return len(self.bidegrees()) <= 1

    def component(self, p, q):
        return self._raw(
            self.n, {g: c for g, c in self._t.items() if tuple(map(len, self._split(g))) == (p, q)}
        )

    def is_zero(self):
        return not self._t

    def is_constant(self):
        return all(c.is_constant() for c in self._t.values())

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} and {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        out = dict(self._t)
        for g, c in other._t.items():
            _accumulate(out, g, c)
        return self._raw(self.n, out)

    def __neg__(self):
        return self._raw(self.n, {g: -c for g, c in self._t.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        """Multiply by a rational or a Poly (a 0-form)."""
        if isinstance(scalar, _Form):
            raise TypeError("use wedge() or ^ for the exterior product")
        if not isinstance(scalar, Poly):
            scalar = as_fraction(scalar)
        return self._raw(self.n, {g: c * scalar for g, c in self._t.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        return type(other) is type(self) and other.n == self.n and other._t == self._t

    def __hash__(self):
        return hash((self.n, frozenset(self._t.items())))

    def __repr__(self):
        if not self._t:
            return f"{type(self).__name__}(n={self.n}, 0)"
        parts = []
        for g, c in sorted(self._t.items()):
            I, K = self._split(g)
            mono = "^".join([f"dx{i + 1}" for i in I] + [f"d{self._second}{k + 1}" for k in K])
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return f"{type(self).__name__}(n={self.n}, " + " + ".join(parts) + ")"

    def map_coefficients(self, fn):
        return self._raw(self.n, {g: fn(c) for g, c in self._t.items()})

    def constant_values(self):
        """Mapping ``(I, K) -> Fraction`` for a constant form."""
        if not self.is_constant():
            raise ValueError("form has non-constant coefficients")
        return {self._split(g): c.constant_term() for g, c in self._t.items()}


class SuperForm(_Form):
    """Superform on R^n_x + R^n_xi with polynomial coefficients in x."""

    __slots__ = ()
    _second = "xi"

    @classmethod
    def dxi(cls, n, i):
        return cls.dsecond(n, i)


class XYForm(_Form):
    """Form in dx and dy on R^n_x x R^n_y with coefficients depending on x only."""

    __slots__ = ()
    _second = "y"

    @classmethod
    def dy(cls, n, i):
        return cls.dsecond(n, i)


@dataclass(frozen=True)
class Box:
    """Axis-parallel box prod [lower_i, upper_i] with rational corners."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(as_fraction(v) for v in self.lower)
        hi = tuple(as_fraction(v) for v in self.upper)
        if len(lo) != len(hi) or any(a > b for a, b in zip(lo, hi)):
            raise ValueError("box needs lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit(cls, n):
        return cls((0,) * n, (1,) * n)

    @property
    def n(self):
        return len(self.lower)


# ---------------------------------------------------------------------------
# generic generator-level machinery


def wedge(a, b):
    """Exterior product; graded-commutative with total-degree signs."""
    a._check(b)
    out = {}
    for g1, c1 in a._t.items():
        for g2, c2 in b._t.items():
            sign, key = sort_sign(g1 + g2)
            if sign:
                _accumulate(out, key, c1 * c2 * sign)
    return a._raw(a.n, out)


def _substitute_generators(form, images):
    """Multiplicative extension of ``gen -> sum coeff * gen'``."""
    out = {}
    for gens, c in form._t.items():
        partial = {(): Fraction(1)}
        for g in gens:
            nxt = {}
            for seq, s in partial.items():
                for coeff, h in images[g]:
                    nxt[seq + (h,)] = nxt.get(seq + (h,), 0) + s * coeff
            partial = nxt
        for seq, s in partial.items():
            sign, key = sort_sign(seq)
            if sign and s:
                _accumulate(out, key, c * (s * sign))
    return form._raw(form.n, out)


def _contract(form, values):
    """Contraction with the vector field sending generator g to ``values[g]``.

    Odd antiderivation: removing the m-th generator carries (-1)^m.
    """
    out = {}
    for gens, c in form._t.items():
        for m, g in enumerate(gens):
            v = values.get(g)
            if v is None:
                continue
            coeff = c * v if isinstance(v, Poly) else c * as_fraction(v)
            _accumulate(out, gens[:m] + gens[m + 1:], coeff * (-1) ** m)
    return form._raw(form.n, out)


def _derivation(form, images):
    """Even derivation replacing one generator at a time by ``images[g]``."""
    out = {}
    for gens, c in form._t.items():
        for m, g in enumerate(gens):
            for coeff, h in images.get(g, ()):
                sign, key = sort_sign(gens[:m] + (h,) + gens[m + 1:])
                if sign:
                    _accumulate(out, key, c * (coeff * sign))
    return form._raw(form.n, out)


# ---------------------------------------------------------------------------
# operators of the superform calculus


def apply_J(a):
    """J(dxi_j) = dx_j, J(dx_j) = -dxi_j, extended multiplicatively."""
    n = a.n
    images = {j: [(-1, n + j)] for j in range(n)}
    images.update({n + j: [(1, j)] for j in range(n)})
    return _substitute_generators(a, images)


def apply_J_inverse(a):
    n = a.n
    images = {j: [(1, n + j)] for j in range(n)}
    images.update({n + j: [(-1, j)] for j in range(n)})
    return _substitute_generators(a, images)


def sharp(a):
    """Replace every dx_j by dxi_j on a (1,0)-form."""
    if not a.is_zero() and a.bidegrees() != {(1, 0)}:
        raise ValueError("sharp is defined on forms of bidegree (1,0)")
    n = a.n
    return _substitute_generators(a, {j: [(1, n + j)] for j in range(n)})


def exterior_d(a):
    """d(f dx_I ^ dxi_K) = sum_i df/dx_i dx_i ^ dx_I ^ dxi_K."""
    out = {}
    for gens, c in a._t.items():
        for i in range(a.n):
            dc = c.diff(i)
            if dc.is_zero():
                continue
            sign, key = sort_sign((i,) + gens)
            if sign:
                _accumulate(out, key, dc * sign)
    return a._raw(a.n, out)


def exterior_dsharp(a):
    """d# = J^{-1} d J."""
    return apply_J_inverse(exterior_d(apply_J(a)))


def _euler_values(n, offset):
    return {offset + j: Poly.var(n, j) for j in range(n)}


def delta(a):
    """Contraction with E = sum x_j d/dx_j."""
    return _contract(a, _euler_values(a.n, 0))


def delta_sharp(a):
    """Contraction with E# = sum x_j d/dxi_j."""
    return _contract(a, _euler_values(a.n, a.n))


def lie_T(a):
    """T u = sum_i dx_i ^ (contraction of u with d/dxi_i)."""
    n = a.n
    return _derivation(a, {n + j: [(1, j)] for j in range(n)})


def _dv_sign(n):
    # dx1^dxi1^...^dxn^dxin = sign * (dx_1..dx_n ^ dxi_1..dxi_n)
    return sort_sign([g for j in range(n) for g in (j, n + j)])[0]


def volume_form(n):
    """dV = dx1^dxi1^...^dxn^dxin."""
    return SuperForm._raw(n, {tuple(range(2 * n)): Poly.constant(n, _dv_sign(n))})


def hodge_star(a):
    """Euclidean Hodge star with respect to dV, for constant forms."""
    if not a.is_constant():
        raise ValueError("the Hodge star is only provided for constant coefficients")
    n = a.n
    full = set(range(2 * n))
    sv = _dv_sign(n)
    out = {}
    for gens, c in a._t.items():
        comp = tuple(sorted(full - set(gens)))
        sign, _ = sort_sign(gens + comp)
        _accumulate(out, comp, c * (sv * sign))
    return a._raw(n, out)


def inner(a, b):
    """Euclidean inner product of constant forms (monomials orthonormal)."""
    a._check(b)
    return sum(
        (c.constant_term() * b._t[g].constant_term() for g, c in a._t.items() if g in b._t),
        Fraction(0),
    )


def super_integrate(a, box):
    """Integral of the (n,n)-component over ``box``, normalised so dV has mass vol(box)."""
    n = a.n
    c = a._t.get(tuple(range(2 * n)))
    if c is None:
        return Fraction(0)
    return _dv_sign(n) * c.integrate_box(box.lower, box.upper)


def boundary_integrate(a, box):
    """Oriented integral of an (n-1,n)-form over the boundary of ``box``.

    Each facet {x_i = c} carries the orientation with the outward normal
    first; the dxi-block is handled with the same sign rule as
    :func:`super_integrate`, so Stokes holds exactly.
    """
    n = a.n
    if not a.is_zero() and a.bidegrees() != {(n - 1, n)}:
        raise ValueError("boundary_integrate expects a form of bidegree (n-1, n)")
    xi_full = tuple(range(n, 2 * n))
    total = Fraction(0)
    for i in range(n):
        facet_gens = tuple(j for j in range(n) if j != i) + xi_full
        coeff = a._t.get(facet_gens)
        if coeff is None:
            continue
        # orientation of the facet chart relative to dx_i ^ (rest)
        orient, _ = sort_sign((i,) + tuple(j for j in range(n) if j != i))
        lo = list(box.lower)
        hi = list(box.upper)
        for value, outward in ((box.upper[i], 1), (box.lower[i], -1)):
            restricted = coeff.substitute(i, value)
            sub_lo = lo[:i] + [Fraction(0)] + lo[i + 1:]
            sub_hi = hi[:i] + [Fraction(1)] + hi[i + 1:]
            total += outward * orient * restricted.integrate_box(sub_lo, sub_hi)
    return _dv_sign(n) * total


def beta(n):
    """beta = sum dx_i ^ dxi_i = dd#(|x|^2/2)."""
    return SuperForm(n, {((i,), (i,)): 1 for i in range(n)})


def beta_xy(n):
    """beta(x, y) = sum dx_i ^ dy_i."""
    return XYForm(n, {((i,), (i,)): 1 for i in range(n)})


# ---------------------------------------------------------------------------
# Berezin transform


@lru_cache(maxsize=None)
def _exp_beta_3n(n):
    """exp(sum dv_i ^ dw_i) in the algebra with blocks (dx, dv, dw)."""
    result = {(): Fraction(1)}
    power = {(): Fraction(1)}
    for k in range(1, n + 1):
        nxt = {}
        for gens, c in power.items():
            for i in range(n):
                sign, key = sort_sign(gens + (n + i, 2 * n + i))
                if sign:
                    nxt[key] = nxt.get(key, 0) + c * sign
        power = {g: c for g, c in nxt.items() if c}
        for g, c in power.items():
            result[g] = result.get(g, 0) + c / factorial(k)
    return tuple((g, c) for g, c in result.items() if c)


def _berezin_transform(form, target):
    """BI_w(form(x, w) ^ exp(sum dv_i ^ dw_i)) with BI_w(dw_1..dw_n ^ f) = f."""
    n = form.n
    w_full = tuple(range(2 * n, 3 * n))
    out = {}
    for gens, c in form._t.items():
        lifted = tuple(g if g < n else g + n for g in gens)
        for eg, ec in _exp_beta_3n(n):
            sign, key = sort_sign(lifted + eg)
            if not sign or key[len(key) - n:] != w_full:
                continue
            rest = key[: len(key) - n]
            # move dw_full to the front
            sign *= (-1) ** (n * len(rest))
            _accumulate(out, rest, c * (ec * sign))
    return target._raw(n, out)


def phi_transform(w):
    """Berezin transform of an XYForm into a SuperForm.

    Maps bidegree (p, k) to (p, n - k). With the left Berezin convention
    used here Phi(Phi(w)) = (-1)^{n(n+1)/2} w and Phi(dw) = (-1)^n d Phi(w).
    """
    if not isinstance(w, XYForm):
        raise TypeError("phi_transform expects an XYForm")
    return _berezin_transform(w, SuperForm)


def phi_inverse(s):
    """Inverse of :func:`phi_transform`."""
    if not isinstance(s, SuperForm):
        raise TypeError("phi_inverse expects a SuperForm")
    n = s.n
    return _berezin_transform(s, XYForm) * (-1) ** (n * (n + 1) // 2)


def _phi_on_superform(s):
    return _berezin_transform(s, XYForm)


def kahler_L(w):
    """L w = beta(x, y) ^ w."""
    return wedge(beta_xy(w.n), w)


def kahler_Lambda(w):
    """Lambda = sum_i (contract dy_i)(contract dx_i), the adjoint of L."""
    n = w.n
    out = XYForm(n)
    for i in range(n):
        out = out + _contract(_contract(w, {i: 1}), {n + i: 1})
    return out


# ---------------------------------------------------------------------------
# random generators used by tests and the selftest


def random_poly(n, degree, rng, coeff_range=3, density=0.6):
    """Random polynomial with integer coefficients in [-coeff_range, coeff_range]."""
    terms = {}
    for total in range(degree + 1):
        for exps in _exponents(n, total):
            if rng.random() < density:
                terms[exps] = rng.randint(-coeff_range, coeff_range)
    return Poly(n, terms)


def _exponents(n, total):
    if n == 0:
        if total == 0:
            yield ()
        return
    for k in range(total + 1):
        for rest in _exponents(n - 1, total - k):
            yield (k,) + rest


def random_form(n, rng, bidegree=None, degree=2, density=0.4, cls=SuperForm):
    """Random form with polynomial coefficients of degree <= ``degree``."""
    terms = {}
    if bidegree is None:
        pairs = [(p, q) for p in range(n + 1) for q in range(n + 1)]
    else:
        pairs = [bidegree]
    for p, q in pairs:
        for I in combinations(range(n), p):
            for K in combinations(range(n), q):
                if rng.random() < density:
                    terms[(I, K)] = random_poly(n, degree, rng)
    return cls(n, terms)
