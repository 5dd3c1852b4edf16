"""Positivity cones of constant symmetric (p,p)-forms.

A constant (p,p)-form is written ``Omega = sum Omega_IJ dx_I ^ dxi_J`` times
the display sign ``(-1)^{p(p-1)/2}``; with this sign elementary forms have
positive semidefinite coefficient matrices. Storage stays raw (see
:mod:`superconvex.exterior`); the sign is applied when the matrix is built.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial
import random

import numpy as np
from scipy.optimize import minimize

from . import exterior as ex
from ._linalg import exact_nullspace, exact_rank, exact_solve, is_psd_exact
from .poly import as_fraction

__all__ = [
    "ConstForm",
    "ElementaryFactorization",
    "Decomposition",
    "WeakPositivityResult",
    "elementary",
    "trace",
    "trace_by_wedge",
    "is_symmetric",
    "is_positive",
    "is_strong",
    "is_weakly_null",
    "ker_T_basis",
    "weakly_null_basis",
    "weak_positivity_search",
    "decompose_strong",
    "primitive_vs_decomposable",
    "trace_domination_ratio",
]


def display_sign(p):
    return -1 if (p * (p - 1) // 2) % 2 else 1


class ConstForm:
    """Constant-coefficient form of pure bidegree (p,p)."""

    __slots__ = ("form", "p", "index", "_matrix")

    def __init__(self, form, p=None):
        if not form.is_constant():
            raise ValueError("ConstForm needs constant coefficients")
        degs = form.bidegrees()
        if len(degs) > 1 or any(a != b for a, b in degs):
            raise ValueError(f"expected pure bidegree (p,p), got {sorted(degs)}")
        if degs:
            p_found = next(iter(degs))[0]
            if p is not None and p != p_found:
                raise ValueError("declared p does not match the form")
            p = p_found
        elif p is None:
            raise ValueError("p must be given for the zero form")
        self.form = form
        self.p = p
        self.index = list(combinations(range(form.n), p))
        sign = display_sign(p)
        vals = form.constant_values()
        self._matrix = [[sign * vals.get((I, J), Fraction(0)) for J in self.index] for I in self.index]

    @property
    def n(self):
        return self.form.n

    @classmethod
    def from_matrix(cls, n, p, matrix):
        """Build from the displayed coefficient matrix Omega_IJ."""
        index = list(combinations(range(n), p))
        sign = display_sign(p)
        terms = {}
        for a, I in enumerate(index):
            for b, J in enumerate(index):
                v = as_fraction(matrix[a][b])
                if v:
                    terms[(I, J)] = sign * v
        return cls(ex.SuperForm(n, terms), p)

    @classmethod
    def zero(cls, n, p):
        return cls(ex.SuperForm(n), p)

    def matrix(self):
        """Displayed coefficient matrix (list of lists of Fractions)."""
        return [row[:] for row in self._matrix]

    def matrix_float(self):
        return np.array([[float(v) for v in row] for row in self._matrix])

    def vector(self):
        """Raw coefficients in the fixed (I, J) order, for linear algebra."""
        vals = self.form.constant_values()
        return [vals.get((I, J), Fraction(0)) for I in self.index for J in self.index]

    def __add__(self, other):
        return ConstForm(self.form + other.form, self.p)

    def __sub__(self, other):
        return ConstForm(self.form - other.form, self.p)

    def __neg__(self):
        return ConstForm(-self.form, self.p)

    def __mul__(self, c):
        return ConstForm(self.form * c, self.p)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ConstForm) and self.p == other.p and self.form == other.form

    def __hash__(self):
        return hash((self.p, self.form))

    def __repr__(self):
        return f"ConstForm(p={self.p}, {self.form!r})"


@dataclass
class ElementaryFactorization:
    """One term ``weight * elementary(vectors)`` of a decomposition.

    Weights are signed because the strong forms are a linear span.
    """

    vectors: list
    weight: object


@dataclass
class Decomposition:
    factors: list
    residual: float
    exact: bool


@dataclass
class WeakPositivityResult:
    violation: bool
    certified: bool
    value: float
    vectors: list = field(default_factory=list)
    exact_value: object = None
    method: str = "search"


def _one_form(n, v):
    return ex.SuperForm(n, {((i,), ()): as_fraction(c) for i, c in enumerate(v) if c})


def elementary(vectors, n=None):
    """alpha_1 ^ alpha_1# ^ ... ^ alpha_p ^ alpha_p# for rational vectors."""
    vectors = [list(v) for v in vectors]
    if n is None:
        if not vectors:
            raise ValueError("n is required for the empty product")
        n = len(vectors[0])
    out = ex.SuperForm.scalar(n, 1)
    for v in vectors:
        if len(v) != n:
            raise ValueError("vector length does not match n")
        a = _one_form(n, v)
        out = ex.wedge(ex.wedge(out, a), ex.sharp(a) if not a.is_zero() else a)
    return ConstForm(out, len(vectors))


def trace(f):
    """tau = sum_I Omega_II."""
    return sum((f._matrix[i][i] for i in range(len(f.index))), Fraction(0))


def trace_by_wedge(f):
    """Omega ^ beta^{n-p}/(n-p)! as a multiple of dV."""
    q = f.n - f.p
    b = ex.SuperForm.scalar(f.n, 1)
    for _ in range(q):
        b = ex.wedge(b, ex.beta(f.n))
    b = b * Fraction(1, factorial(q))
    return ex.super_integrate(ex.wedge(f.form, b), ex.Box.unit(f.n))


def is_symmetric(f):
    m = f._matrix
    return all(m[i][j] == m[j][i] for i in range(len(m)) for j in range(i))


def is_positive(f, tol=None):
    """Positive semidefiniteness of the displayed matrix.

    With ``tol=None`` the test is exact; otherwise the smallest eigenvalue
    must be at least ``-tol``.
    """
    if not is_symmetric(f):
        raise ValueError("positivity is defined for symmetric forms")
    if tol is None:
        return is_psd_exact(f._matrix)
    if not f.index:
        return True
    return float(np.linalg.eigvalsh(f.matrix_float()).min()) >= -tol


def is_strong(f):
    """Strong forms are the symmetric forms annihilated by T."""
    return is_symmetric(f) and ex.lie_T(f.form).is_zero()


def _pp_monomials(n, p):
    idx = list(combinations(range(n), p))
    return [(I, J) for I in idx for J in idx]


def _form_from_vector(n, p, vec):
    terms = {key: v for key, v in zip(_pp_monomials(n, p), vec) if v}
    return ConstForm(ex.SuperForm(n, terms), p)


def ker_T_basis(n, p):
    """Exact basis of Ker(T) on constant (p,p)-forms."""
    monos = _pp_monomials(n, p)
    images = [ex.lie_T(ex.SuperForm(n, {m: 1})).constant_values() for m in monos]
    targets = sorted({k for img in images for k in img})
    rows = [[img.get(t, Fraction(0)) for img in images] for t in targets]
    return [_form_from_vector(n, p, v) for v in exact_nullspace(rows, len(monos))]


def weakly_null_basis(n, p):
    """Exact basis of W0: symmetric forms orthogonal to Ker(T)."""
    monos = _pp_monomials(n, p)
    pos = {m: i for i, m in enumerate(monos)}
    idx = list(combinations(range(n), p))
    sym = []
    for a, I in enumerate(idx):
        for J in idx[a:]:
            v = [Fraction(0)] * len(monos)
            v[pos[(I, J)]] += 1
            if I != J:
                v[pos[(J, I)]] += 1
            sym.append(v)
    kernel = [k.vector() for k in ker_T_basis(n, p)]
    # coordinates c on the symmetric basis with <sum c_s sym_s, k> = 0
    rows = [[sum(a * b for a, b in zip(s, k)) for s in sym] for k in kernel]
    coords = exact_nullspace(rows, len(sym))
    out = []
    for c in coords:
        vec = [sum(ci * s[j] for ci, s in zip(c, sym)) for j in range(len(monos))]
        out.append(_form_from_vector(n, p, vec))
    return out


def is_weakly_null(f, tol=None):
    """Orthogonality to Ker(T); exact when ``tol`` is None."""
    if not is_symmetric(f):
        raise ValueError("weak nullity is defined for symmetric forms")
    v = f.vector()
    for k in ker_T_basis(f.n, f.p):
        ip = sum(a * b for a, b in zip(v, k.vector()))
        if tol is None:
            if ip:
                return False
        else:
            kn = float(sum(b * b for b in k.vector())) ** 0.5
            if abs(float(ip)) > tol * kn:
                return False
    return True


def _pairing_matrix(f):
    """W with f ^ elementary(U) = sign_q * c^T W c, c the Plucker vector of U."""
    n, p = f.n, f.p
    q = n - p
    cols = list(combinations(range(n), q))
    box = ex.Box.unit(n)
    W = np.zeros((len(cols), len(cols)))
    exact = {}
    for a, K in enumerate(cols):
        for b, L in enumerate(cols):
            val = ex.super_integrate(ex.wedge(f.form, ex.SuperForm(n, {(K, L): 1})), box)
            exact[(a, b)] = val
            W[a, b] = float(val)
    return cols, W * display_sign(q), exact


def _plucker(U, cols):
    return np.array([np.linalg.det(U[:, list(K)]) if K else 1.0 for K in cols])


def weak_positivity_search(f, trials=20, tol=1e-9, seed=0, max_denominator=1000):
    """Search for an elementary E of complementary degree with f ^ E < 0.

    In bidegrees (0,0), (1,1), (n-1,n-1) and (n,n) weak positivity equals
    positive semidefiniteness and the answer is exact; elsewhere a negative
    value is certified by exact re-evaluation at a rationalised frame while a
    non-violation is only heuristic.
    """
    if not is_symmetric(f):
        raise ValueError("weak positivity is defined for symmetric forms")
    n, p = f.n, f.p
    q = n - p
    exact_bidegree = p in (0, 1, n - 1, n)
    if exact_bidegree and is_psd_exact(f._matrix):
        return WeakPositivityResult(False, True, 0.0, method="exact-psd")
    cols, W, _ = _pairing_matrix(f)
    rng = np.random.default_rng(seed)

    def objective(flat):
        U = flat.reshape(q, n)
        c = _plucker(U, cols)
        nrm = float(c @ c)
        if nrm < 1e-14:
            return 0.0
        return float(c @ W @ c) / nrm

    best_val, best_U = np.inf, None
    if q == 0:
        best_val, best_U = float(W[0, 0]), np.zeros((0, n))
    else:
        for _ in range(trials):
            x0 = rng.standard_normal(q * n)
            res = minimize(objective, x0, method="BFGS")
            if res.fun < best_val:
                best_val, best_U = float(res.fun), res.x.reshape(q, n)
    if best_val >= -tol:
        return WeakPositivityResult(False, exact_bidegree, best_val, method="search")
    Q, _ = np.linalg.qr(best_U.T)
    frame = Q.T[:q]
    vectors = [[Fraction(float(v)).limit_denominator(max_denominator) for v in row] for row in frame]
    E = elementary(vectors, n)
    exact_value = ex.super_integrate(ex.wedge(f.form, E.form), ex.Box.unit(n))
    return WeakPositivityResult(
        True, exact_value < 0, best_val, vectors=vectors, exact_value=exact_value, method="search"
    )


def _random_int_vectors(rng, count, n, spread):
    return [[rng.randint(-spread, spread) for _ in range(n)] for _ in range(count)]


def decompose_strong(f, sample_size=None, seed=0, exact=None, spread=2):
    """Write a strong form as a signed combination of sampled elementary forms.

    ``exact`` defaults to True (rational solve); with ``exact=False`` a float
    least-squares fit is returned. A nonzero residual means the sample did not
    span, and a larger ``sample_size`` should be tried.
    """
    if not is_strong(f):
        raise ValueError("decompose_strong expects a strong form")
    n, p = f.n, f.p
    if exact is None:
        exact = True
    if sample_size is None:
        sample_size = 3 * max(1, len(ker_T_basis(n, p))) + 3
    rng = random.Random(seed)
    samples = [_random_int_vectors(rng, p, n, spread) for _ in range(sample_size)]
    columns = [elementary(vs, n).vector() for vs in samples]
    target = f.vector()
    if exact:
        rows = [[col[i] for col in columns] for i in range(len(target))]
        x = exact_solve(rows, target)
        if x is None:
            return Decomposition([], float("inf"), True)
        factors = [ElementaryFactorization(vs, w) for vs, w in zip(samples, x) if w]
        return Decomposition(factors, 0.0, True)
    A = np.array([[float(v) for v in col] for col in columns]).T
    b = np.array([float(v) for v in target])
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.linalg.norm(A @ x - b))
    factors = [ElementaryFactorization(vs, float(w)) for vs, w in zip(samples, x) if abs(w) > 1e-14]
    return Decomposition(factors, residual, False)


def _xy_one_form(n, v, second):
    off = n if second else 0
    return ex.XYForm._raw(
        n, {(off + i,): ex.Poly.constant(n, as_fraction(c)) for i, c in enumerate(v) if c}
    )


def primitive_vs_decomposable(n, N, seed=0, samples=None, spread=2):
    """Dimensions of Ker(Lambda) and of the sampled decomposable span in degree N.

    Decomposable forms are alpha_1^..^alpha_q ^ alpha#_{q+1}^..^alpha#_N
    (alpha# = sum a_j dy_j) with the first group orthogonal to the second.
    """
    if N > 2 * n:
        return 0, 0
    monos = list(combinations(range(2 * n), N))
    images = []
    for m in monos:
        w = ex.XYForm._raw(n, {m: ex.Poly.constant(n, 1)})
        images.append(ex.kahler_Lambda(w).constant_values())
    targets = sorted({k for img in images for k in img})
    rows = [[img.get(t, Fraction(0)) for img in images] for t in targets]
    dim_ker = len(monos) - (exact_rank(rows, len(monos)) if rows else 0)
    if samples is None:
        samples = max(10 * dim_ker, 20)
    rng = random.Random(seed)
    pos = {m: i for i, m in enumerate(monos)}
    vecs = []
    for _ in range(samples):
        q = rng.randint(max(0, N - n), min(N, n))
        first = _random_int_vectors(rng, q, n, spread)
        comp = exact_nullspace(first, n) if first else [
            [Fraction(int(i == j)) for j in range(n)] for i in range(n)
        ]
        second = []
        for _ in range(N - q):
            coeffs = [rng.randint(-spread, spread) for _ in comp]
            second.append([sum((c * b[j] for c, b in zip(coeffs, comp)), Fraction(0)) for j in range(n)])
        w = ex.XYForm.scalar(n, 1)
        for v in first:
            w = ex.wedge(w, _xy_one_form(n, v, False))
        for v in second:
            w = ex.wedge(w, _xy_one_form(n, v, True))
        vec = [Fraction(0)] * len(monos)
        for g, c in w._t.items():
            vec[pos[g]] = c.constant_term()
        vecs.append(vec)
    dim_dec = exact_rank(vecs, len(monos)) if vecs else 0
    return dim_ker, dim_dec


def trace_domination_ratio(f):
    """max |Omega_IJ| / tau, the quantity bounded in the trace domination lemma."""
    tau = trace(f)
    if tau <= 0:
        raise ValueError("trace must be positive")
    return max(abs(v) for row in f._matrix for v in row) / tau


def random_strongly_positive(n, p, rng, terms=3, spread=2):
    """Nonnegative integer combination of random elementary forms."""
    out = ConstForm.zero(n, p)
    for _ in range(terms):
        vs = _random_int_vectors(rng, p, n, spread)
        out = out + elementary(vs, n) * rng.randint(1, 3)
    return out
