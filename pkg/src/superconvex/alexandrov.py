"""Discretised Alexandrov operator on the unit sphere (n = 2, 3).

For 1-homogeneous v and smooth supports phi_3..phi_n,

    A(v)(x) = c_n D(H_v(x), H_3(x), ..., H_n(x)),

where H_f(x) is the ambient Hessian of f restricted to x^perp and D is the
mixed discriminant. The constant c_n = (n-1)! makes Q(u, v) = int u A(v) dS
equal n! V(u, v, phi_3, ...), so Q(|x|, |x|) = n! vol(B).

All computations here are floating point.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from math import factorial, gamma, pi

import numpy as np

from ._linalg import exact_nullspace
from .poly import Poly

__all__ = [
    "SmoothSupport",
    "SphereGrid",
    "HarmonicFunction",
    "FunctionBasis",
    "calibration_constant",
    "tangential_frame",
    "tangential_hessian",
    "alexandrov_apply",
    "operator_values",
    "qform",
    "qform_gram",
    "mass_matrix",
    "orthonormal_gram",
    "classify_spectrum",
    "SpectrumRow",
    "spectrum_report",
    "af_check",
    "poincare_check",
    "wirtinger_check",
    "rayleigh_quotient",
    "random_ellipsoid",
]


def calibration_constant(n):
    """c_n fixed by the round case: c_n |S^{n-1}| D(I..I) = n! vol(B^n)."""
    ball = pi ** (n / 2) / gamma(n / 2 + 1)
    sphere = 2 * pi ** (n / 2) / gamma(n / 2)
    return factorial(n) * ball / sphere


# ---------------------------------------------------------------------------
# frames and mixed discriminants


def tangential_frame(x):
    """Orthonormal frames of x^perp for the rows of x; shape (N, n, n-1)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = x.shape[1]
    if n == 2:
        return np.stack([-x[:, 1], x[:, 0]], axis=1)[:, :, None]
    if n != 3:
        raise ValueError("only n = 2, 3 are supported")
    axis = np.zeros_like(x)
    axis[np.arange(len(x)), np.argmin(np.abs(x), axis=1)] = 1.0
    e1 = np.cross(axis, x)
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    e2 = np.cross(x, e1)
    return np.stack([e1, e2], axis=2)


def _restrict(hess, frames):
    """E^T H E for stacks of ambient Hessians."""
    return np.einsum("nia,nij,njb->nab", frames, hess, frames)


def _mixed_discriminant_stack(mats):
    """Mixed discriminant of k stacks of k x k matrices, node by node."""
    k = len(mats)
    if k == 0:
        raise ValueError("need at least one matrix")
    total = 0.0
    for size in range(1, k + 1):
        sign = (-1) ** (k - size)
        for subset in combinations(range(k), size):
            total = total + sign * np.linalg.det(sum(mats[i] for i in subset))
    return total / factorial(k)


# ---------------------------------------------------------------------------
# 1-homogeneous functions


class SmoothSupport:
    """h(x) = sum_k c_k sqrt(x^T Q_k x) + a . x with Q_k positive definite.

    This is the support function of a positive combination of ellipsoids,
    translated by a.
    """

    def __init__(self, terms, linear=None):
        self.terms = []
        for c, q in terms:
            q = np.asarray(q, dtype=float)
            if c < 0:
                raise ValueError("coefficients must be nonnegative")
            if not np.allclose(q, q.T) or np.linalg.eigvalsh(q).min() <= 0:
                raise ValueError("Q must be symmetric positive definite")
            self.terms.append((float(c), q))
        self.n = self.terms[0][1].shape[0] if self.terms else len(linear)
        self.linear = np.zeros(self.n) if linear is None else np.asarray(linear, dtype=float)

    @classmethod
    def ellipsoid(cls, q):
        return cls([(1.0, q)])

    @classmethod
    def ball(cls, n, r=1.0):
        """r |x|."""
        return cls([(float(r), np.eye(n))])

    @classmethod
    def linear_function(cls, a):
        return cls([], linear=a)

    def __add__(self, other):
        return SmoothSupport(self.terms + other.terms, self.linear + other.linear)

    def scale(self, t):
        return SmoothSupport([(t * c, q) for c, q in self.terms], t * self.linear)

    def values(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = x @ self.linear
        for c, q in self.terms:
            out = out + c * np.sqrt(np.einsum("ni,ij,nj->n", x, q, x))
        return out

    def gradients(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.tile(self.linear, (len(x), 1))
        for c, q in self.terms:
            qx = x @ q
            h = np.sqrt(np.einsum("ni,ni->n", x, qx))
            out = out + c * qx / h[:, None]
        return out

    def hessians(self, x):
        """Ambient Hessians Q/h - Q x x^T Q / h^3, shape (N, n, n)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.zeros((len(x), self.n, self.n))
        for c, q in self.terms:
            qx = x @ q
            h = np.sqrt(np.einsum("ni,ni->n", x, qx))
            out += c * (q[None] / h[:, None, None] - np.einsum("ni,nj->nij", qx, qx) / h[:, None, None] ** 3)
        return out

    def __repr__(self):
        return f"SmoothSupport(n={self.n}, ellipsoids={len(self.terms)})"


def random_ellipsoid(n, rng, spread=0.5):
    """sqrt(x^T Q x) with Q = I + spread * (random symmetric), kept positive definite."""
    a = rng.normal(size=(n, n))
    q = a @ a.T / n
    q = np.eye(n) + spread * q
    return SmoothSupport.ellipsoid(q)


def _monomials(n, degree):
    out = []
    for combo in combinations_with_replacement(range(n), degree):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


@lru_cache(maxsize=None)
def _harmonic_polys(n, degree):
    """Basis of harmonic homogeneous polynomials of the given degree (exact)."""
    mons = _monomials(n, degree)
    if degree < 2:
        return tuple(Poly.monomial(e) for e in mons)
    targets = {e: k for k, e in enumerate(_monomials(n, degree - 2))}
    rows = [[0] * len(mons) for _ in targets]
    for col, e in enumerate(mons):
        lap = sum((Poly.monomial(e).diff(i).diff(i) for i in range(n)), Poly(n))
        for e2, c in lap.terms.items():
            rows[targets[e2]][col] += c
    return tuple(
        sum((Poly.monomial(e, c) for e, c in zip(mons, vec) if c), Poly(n))
        for vec in exact_nullspace(rows, len(mons))
    )


def _float_eval(p, x):
    out = np.zeros(len(x))
    for e, c in p.terms.items():
        term = np.full(len(x), float(c))
        for i, k in enumerate(e):
            if k:
                term = term * x[:, i] ** k
        out += term
    return out


class HarmonicFunction:
    """u(x) = |x|^{1-l} P(x) with P harmonic and homogeneous of degree l.

    On the sphere u is a spherical harmonic of degree l (a Fourier mode when
    n = 2); on x^perp its Hessian at a unit x is E^T D^2 P E + (1 - l) P I.
    """

    def __init__(self, p):
        self.p = p
        self.n = p.n
        self.degree = p.degree()
        self._grad = [p.diff(i) for i in range(self.n)]
        self._hess = [[g.diff(j) for j in range(self.n)] for g in self._grad]

    def values(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.linalg.norm(x, axis=1)
        return r ** (1 - self.degree) * _float_eval(self.p, x)

    def gradients(self, x):
        """Ambient gradient at unit points (the radial part is u itself)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        g = np.stack([_float_eval(d, x) for d in self._grad], axis=1)
        return g + (1 - self.degree) * _float_eval(self.p, x)[:, None] * x

    def hessians(self, x):
        """Ambient Hessian at unit points, accurate on x^perp."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        h = np.stack([np.stack([_float_eval(d, x) for d in row], axis=1) for row in self._hess], axis=1)
        pv = _float_eval(self.p, x)
        return h + (1 - self.degree) * pv[:, None, None] * np.eye(self.n)[None]

    def __repr__(self):
        return f"HarmonicFunction(degree={self.degree}, {self.p})"


@dataclass
class FunctionBasis:
    """1-homogeneous extensions of spherical harmonics (Fourier modes if n = 2) up to a degree."""

    n: int
    max_degree: int
    functions: list = field(default_factory=list)

    def __post_init__(self):
        if not self.functions:
            for d in range(self.max_degree + 1):
                self.functions.extend(HarmonicFunction(p) for p in _harmonic_polys(self.n, d))

    def degrees(self):
        return [f.degree for f in self.functions]

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    @classmethod
    def linear(cls, n):
        return cls(n, 1, [HarmonicFunction(p) for p in _harmonic_polys(n, 1)])


# ---------------------------------------------------------------------------
# grids


@dataclass
class SphereGrid:
    nodes: np.ndarray
    weights: np.ndarray
    level: int
    h: float
    kind: str

    @property
    def n(self):
        return self.nodes.shape[1]

    def frames(self):
        return tangential_frame(self.nodes)

    def integrate(self, values):
        return float(self.weights @ values)

    @classmethod
    def circle(cls, m, level=None):
        t = 2 * pi * np.arange(m) / m
        return cls(np.stack([np.cos(t), np.sin(t)], axis=1), np.full(m, 2 * pi / m), level or 0, 2 * pi / m, "circle")

    @classmethod
    def gauss(cls, level):
        """Gauss-Legendre in z times the trapezoid rule in longitude.

        Level L uses 2^(L+1) latitudes and twice as many longitudes; h is the
        latitude spacing pi / 2^(L+1).
        """
        n_lat = 2 ** (level + 1)
        z, wz = np.polynomial.legendre.leggauss(n_lat)
        n_lon = 2 * n_lat
        phi = 2 * pi * (np.arange(n_lon) + 0.5) / n_lon
        s = np.sqrt(1 - z**2)
        nodes = np.stack(
            [np.outer(s, np.cos(phi)).ravel(), np.outer(s, np.sin(phi)).ravel(), np.repeat(z, n_lon)], axis=1
        )
        weights = np.repeat(wz, n_lon) * (2 * pi / n_lon)
        return cls(nodes, weights, level, pi / n_lat, "gauss")

    @classmethod
    def icosahedral(cls, level):
        """Centroids of a refined icosahedral triangulation with spherical triangle areas as weights."""
        verts, faces = _icosphere(level)
        a, b, c = verts[faces[:, 0]], verts[faces[:, 1]], verts[faces[:, 2]]
        num = np.abs(np.einsum("ni,ni->n", a, np.cross(b, c)))
        den = 1 + np.einsum("ni,ni->n", a, b) + np.einsum("ni,ni->n", b, c) + np.einsum("ni,ni->n", c, a)
        weights = 2 * np.arctan2(num, den)
        cent = a + b + c
        cent /= np.linalg.norm(cent, axis=1)[:, None]
        edges = np.concatenate([np.linalg.norm(a - b, axis=1), np.linalg.norm(b - c, axis=1), np.linalg.norm(c - a, axis=1)])
        return cls(cent, weights, level, float(edges.max()), "icosahedral")

    @classmethod
    def for_level(cls, n, level, kind="gauss"):
        if n == 2:
            return cls.circle(8 * 2**level, level)
        if n != 3:
            raise ValueError("only n = 2, 3 are supported")
        if kind == "gauss":
            return cls.gauss(level)
        if kind == "icosahedral":
            return cls.icosahedral(level)
        raise ValueError(f"unknown grid kind {kind!r}")


def _icosphere(level):
    t = (1 + 5**0.5) / 2
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
             (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
             (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
             (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        cache = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    return np.array(verts), np.array(faces)


# ---------------------------------------------------------------------------
# operator and quadratic form


def tangential_hessian(f, x):
    """Hessian of a 1-homogeneous function restricted to an orthonormal frame of x^perp."""
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) == 0:
        raise ValueError("x must be nonzero")
    single = x.ndim == 1
    x = np.atleast_2d(x)
    out = _restrict(f.hessians(x), tangential_frame(x))
    return out[0] if single else out


def _check_phis(n, phis):
    if len(phis) != n - 2:
        raise ValueError(f"need {n - 2} fixed supports for n = {n}")


def operator_values(v, phis, x, frames=None):
    """A(v) at the rows of x (unit vectors)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = x.shape[1]
    _check_phis(n, phis)
    e = tangential_frame(x) if frames is None else frames
    mats = [_restrict(v.hessians(x), e)] + [_restrict(p.hessians(x), e) for p in phis]
    return calibration_constant(n) * _mixed_discriminant_stack(mats)


def alexandrov_apply(v, phis, x):
    """A(v)(x) = c_n D(H_v, H_phi_3, ..., H_phi_n) at a single unit vector x."""
    return float(operator_values(v, phis, np.asarray(x, dtype=float)[None])[0])


def qform(u, v, phis, grid):
    """Q(u, v) = int u A(v) dS by quadrature."""
    return grid.integrate(u.values(grid.nodes) * operator_values(v, phis, grid.nodes, grid.frames()))


def qform_gram(basis, phis, grid):
    """Gram matrix Q(u_i, u_j) over a basis, assembled without symmetrisation."""
    x, e = grid.nodes, grid.frames()
    vals = np.stack([u.values(x) for u in basis])
    ops = np.stack([operator_values(u, phis, x, e) for u in basis])
    return (vals * grid.weights) @ ops.T


def mass_matrix(basis, grid):
    vals = np.stack([u.values(grid.nodes) for u in basis])
    return (vals * grid.weights) @ vals.T


def orthonormal_gram(gram, mass):
    """L^{-1} G L^{-T} with mass = L L^T, so eigenvalues are those of the operator."""
    l_inv = np.linalg.inv(np.linalg.cholesky(mass))
    return l_inv @ gram @ l_inv.T


def classify_spectrum(gram, tol):
    """(n_positive, n_zero, n_negative, eigenvalues) of the symmetric part."""
    w = np.linalg.eigvalsh((gram + gram.T) / 2)
    return int((w > tol).sum()), int((np.abs(w) <= tol).sum()), int((w < -tol).sum()), w


@dataclass
class SpectrumRow:
    level: int
    n_positive: int
    n_zero: int
    n_negative: int
    min_pos: float
    max_zero_abs: float
    tol: float
    symmetry: float
    eigenvalues: list = field(default_factory=list, repr=False)

    def as_dict(self):
        return {k: v for k, v in self.__dict__.items() if k != "eigenvalues"}


def spectrum_report(levels, phis=None, n=3, max_degree=4, kind="gauss", tol_factor=10.0):
    """Eigenvalue sign counts of the orthonormalised Gram matrix per refinement level.

    ``phis`` defaults to the round case (all fixed supports |x|); the
    zero tolerance is tol_factor * h^2.
    """
    if phis is None:
        phis = [SmoothSupport.ball(n)] * (n - 2)
    basis = FunctionBasis(n, max_degree)
    rows = []
    for level in levels:
        grid = SphereGrid.for_level(n, level, kind)
        g = qform_gram(basis, phis, grid)
        sym = float(np.abs(g - g.T).max() / max(np.abs(g).max(), 1.0))
        og = orthonormal_gram(g, mass_matrix(basis, grid))
        tol = tol_factor * grid.h**2
        pos, zero, neg, w = classify_spectrum(og, tol)
        min_pos = float(w[w > tol].min()) if pos else float("nan")
        max_zero = float(np.abs(w[np.abs(w) <= tol]).max()) if zero else 0.0
        rows.append(SpectrumRow(level, pos, zero, neg, min_pos, max_zero, tol, sym, [float(v) for v in w]))
    return rows


def af_check(phi, psi, phis, grid, tol=1e-6):
    """Q(phi, psi)^2 >= Q(phi, phi) Q(psi, psi) and Q(phi, psi) >= sqrt(Q(phi, phi) Q(psi, psi)).

    Comparisons are relative: lhs >= rhs (1 - tol).
    """
    a = qform(phi, psi, phis, grid)
    b = qform(phi, phi, phis, grid)
    c = qform(psi, psi, phis, grid)
    return a * a >= b * c * (1 - tol) and a >= np.sqrt(max(b * c, 0.0)) * (1 - tol)


def poincare_check(u, phis, grid, mu_kind="round"):
    """(Q(u, u), term1 - term2) for mu = |x|.

    term1 = int u^2 c_n D(I, H_3, ...) and term2 = int c_n D(g g^T, H_3, ...)
    with g the tangential gradient of u. Also returns term1 and term2.
    """
    if mu_kind != "round":
        raise ValueError("only the smooth branch mu = |x| is implemented")
    x, e = grid.nodes, grid.frames()
    n = x.shape[1]
    _check_phis(n, phis)
    c = calibration_constant(n)
    fixed = [_restrict(p.hessians(x), e) for p in phis]
    eye = np.broadcast_to(np.eye(n - 1), (len(x), n - 1, n - 1))
    g = np.einsum("nia,ni->na", e, u.gradients(x))
    ggt = np.einsum("na,nb->nab", g, g)
    uv = u.values(x)
    term1 = grid.integrate(uv**2 * c * _mixed_discriminant_stack([eye] + fixed))
    term2 = grid.integrate(c * _mixed_discriminant_stack([ggt] + fixed))
    return qform(u, u, phis, grid), term1 - term2, term1, term2


# ---------------------------------------------------------------------------
# Wirtinger


def wirtinger_check(m):
    """Smallest nonzero eigenvalue of the periodic finite-difference -u'' on m nodes.

    Its Rayleigh quotient over mean-zero functions converges to 1, the
    optimal constant in int u^2 <= int u'^2.
    """
    h = 2 * pi / m
    lap = (2 * np.eye(m) - np.roll(np.eye(m), 1, axis=1) - np.roll(np.eye(m), -1, axis=1)) / h**2
    w = np.linalg.eigvalsh(lap)
    return float(w[w > 1e-9].min()), 1.0


def rayleigh_quotient(values):
    """int u'^2 / int u^2 for equispaced periodic samples, derivative by FFT."""
    u = np.asarray(values, dtype=float)
    m = len(u)
    k = np.fft.fftfreq(m, d=1.0 / m)
    du = np.real(np.fft.ifft(1j * k * np.fft.fft(u)))
    return float(np.sum(du**2) / np.sum(u**2))
