"""Monge-Ampere measures of piecewise linear convex functions and the two
boundary Monge-Ampere operators on the surface of a polytope.

For psi = max_i (a_i . x + b_i) the measure is atomic: one atom at each vertex
of the induced polyhedral subdivision, with mass the volume of the convex hull
of the gradients active there (the gradient image of the vertex).
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import exterior as ex
from ._linalg import exact_rank
from .bodies import (
    AtomicMeasure,
    Polytope,
    _solve_square,
    gauge_eval,
    polar,
    surface_area_measure,
)
from .poly import Poly, as_fraction

__all__ = [
    "MaxAffine",
    "indicator",
    "recession_body",
    "ma_measure",
    "mixed_ma_mass",
    "OracleEstimate",
    "ma_oracle",
    "boundary_ma",
    "EdgeDensity",
    "BoundaryDecomposition",
    "boundary_ma_explicit",
    "boundary_ma_tropical",
    "compare_boundary_definitions",
    "random_max_affine",
    "support_function",
    "gauge_function",
]


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


class MaxAffine:
    """psi(x) = max_i (a_i . x + b_i) with redundant pieces removed.

    A piece is kept when it is the unique maximum on an open set, i.e. when
    (a_i, -b_i) is a vertex of the lower convex hull of the lifted slopes.
    """

    __slots__ = ("n", "pieces")

    def __init__(self, pieces, n=None):
        raw = []
        for a, b in pieces:
            raw.append((tuple(as_fraction(v) for v in a), as_fraction(b)))
        if not raw:
            raise ValueError("a MaxAffine needs at least one piece")
        if n is None:
            n = len(raw[0][0])
        if any(len(a) != n for a, _ in raw):
            raise ValueError("pieces of mixed dimension")
        self.n = n
        self.pieces = _prune(sorted(set(raw)), n)

    @property
    def slopes(self):
        return [a for a, _ in self.pieces]

    def is_homogeneous(self):
        return all(b == 0 for _, b in self.pieces)

    def __call__(self, x):
        if any(isinstance(v, float) for v in x):
            return max(sum(float(p) * q for p, q in zip(a, x)) + float(b) for a, b in self.pieces)
        x = [as_fraction(v) for v in x]
        return max(_dot(a, x) + b for a, b in self.pieces)

    def __add__(self, other):
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return MaxAffine(
            [(tuple(p + q for p, q in zip(a, c)), b + d) for a, b in self.pieces for c, d in other.pieces],
            self.n,
        )

    def scale(self, t):
        t = as_fraction(t)
        if t < 0:
            raise ValueError("only nonnegative multiples stay convex")
        return MaxAffine([(tuple(t * v for v in a), t * b) for a, b in self.pieces], self.n)

    def translate(self, t):
        """x -> psi(x - t)."""
        t = [as_fraction(v) for v in t]
        return MaxAffine([(a, b - _dot(a, t)) for a, b in self.pieces], self.n)

    def __eq__(self, other):
        return isinstance(other, MaxAffine) and self.n == other.n and self.pieces == other.pieces

    def __hash__(self):
        return hash((self.n, self.pieces))

    def __repr__(self):
        return f"MaxAffine(n={self.n}, pieces={len(self.pieces)})"


def _prune(pieces, n):
    if len(pieces) == 1:
        return tuple(pieces)
    top = max(-b for _, b in pieces) + 1
    lifted = [a + (-b,) for a, b in pieces]
    hull = Polytope(lifted + [a + (top,) for a, _ in pieces], n + 1)
    keep = set(hull.vertices)
    return tuple(p for p, q in zip(pieces, lifted) if q in keep)


def indicator(f):
    """psi°(x) = lim psi(tx)/t: the same slopes with b = 0."""
    return MaxAffine([(a, 0) for a in f.slopes], f.n)


def recession_body(f):
    """conv{a_i}, whose support function is the indicator of f."""
    return Polytope(f.slopes, f.n)


def _is_full(points, n):
    base = points[0]
    return exact_rank([[p - q for p, q in zip(pt, base)] for pt in points[1:]], n) == n if len(points) > n else False


def ma_measure(f):
    """Atomic Monge-Ampere measure of a MaxAffine.

    Vertices come from (n+1)-subsets of pieces whose equality system
    a_i . x + b_i = s has a unique solution at which those pieces attain the
    maximum; the mass at a vertex is vol(conv of all gradients active there).
    """
    n = f.n
    pieces = f.pieces
    if len(pieces) <= n or not _is_full([a for a, _ in pieces], n):
        return AtomicMeasure()
    vertices = set()
    for subset in combinations(range(len(pieces)), n + 1):
        rows = [list(pieces[i][0]) + [Fraction(-1)] for i in subset]
        sol = _solve_square(rows, [-pieces[i][1] for i in subset])
        if sol is None:
            continue
        x, s = tuple(sol[:n]), sol[n]
        if f(x) == s:
            vertices.add(x)
    atoms = []
    for x in sorted(vertices):
        value = f(x)
        active = [a for a, b in pieces if _dot(a, x) + b == value]
        atoms.append((x, Polytope(active, n).volume))
    return AtomicMeasure(atoms)


def mixed_ma_mass(fs):
    """sum over nonempty S of (-1)^{n-|S|} MA(sum_{i in S} f_i)(R^n).

    For support functions h_{K_i} this equals n! V(K_1..K_n).
    """
    n = fs[0].n
    if len(fs) != n:
        raise ValueError(f"need {n} functions")
    total = Fraction(0)
    for k in range(1, n + 1):
        for subset in combinations(fs, k):
            g = subset[0]
            for h in subset[1:]:
                g = g + h
            total += (-1) ** (n - k) * ma_measure(g).total_mass()
    return total


def random_max_affine(n, rng, pieces=6, spread=3, homogeneous=False):
    """Random MaxAffine with integer data and full-dimensional slope hull."""
    while True:
        data = [
            (tuple(rng.randint(-spread, spread) for _ in range(n)), 0 if homogeneous else rng.randint(-spread, spread))
            for _ in range(pieces)
        ]
        f = MaxAffine(data, n)
        if len(f.pieces) > n and _is_full(f.slopes, n):
            return f


# ---------------------------------------------------------------------------
# Monte-Carlo oracle


@dataclass
class OracleEstimate:
    lower: tuple
    upper: tuple
    mass: float
    sigma: float


def _candidates(f):
    """Float solutions of every square equality system (a superset of the vertices)."""
    n = f.n
    a = np.array([[float(v) for v in p] for p, _ in f.pieces])
    b = np.array([float(q) for _, q in f.pieces])
    out = []
    for subset in combinations(range(len(b)), n + 1):
        idx = list(subset)
        m = np.hstack([a[idx], -np.ones((n + 1, 1))])
        if abs(np.linalg.det(m)) < 1e-12:
            continue
        sol = np.linalg.solve(m, -b[idx])
        out.append(sol[:n])
    return np.array(out).reshape(-1, n)


def _in_hull(a, y):
    """Membership of the rows of y in conv(rows of a), via a Delaunay triangulation."""
    if a.shape[1] == 1:
        return (y[:, 0] >= a.min()) & (y[:, 0] <= a.max())
    from scipy.spatial import Delaunay

    return Delaunay(a).find_simplex(y) >= 0


def ma_oracle(f, boxes=None, samples=10**6, seed=0, chunk=100_000):
    """Monte-Carlo estimate of MA(f)(U) = |grad f(U)| for axis-parallel boxes U.

    Gradients y are sampled uniformly on the bounding box of the slopes; each
    y in conv{a_i} is pulled back to the point x maximising y.x - f(x), found
    by brute force over the finite candidate set. The estimate counts the
    y whose pull-back lands in U; sigma is the binomial standard error.
    """
    n = f.n
    a = np.array([[float(v) for v in p] for p in f.slopes])
    cands = _candidates(f)
    if boxes is None:
        lo = cands.min(axis=0) - 1 if len(cands) else np.zeros(n) - 1
        hi = cands.max(axis=0) + 1 if len(cands) else np.zeros(n) + 1
        boxes = [(tuple(lo), tuple(hi))]
    boxes = [(np.array(lo, dtype=float), np.array(hi, dtype=float)) for lo, hi in boxes]
    if len(cands) == 0 or np.linalg.matrix_rank(a - a[0]) < n:
        return [OracleEstimate(tuple(lo), tuple(hi), 0.0, 0.0) for lo, hi in boxes]
    values = np.array([f([float(v) for v in c]) for c in cands])
    ylo, yhi = a.min(axis=0), a.max(axis=0)
    bbox = float(np.prod(yhi - ylo))
    rng = np.random.default_rng(seed)
    hits = np.zeros(len(boxes))
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        y = ylo + (yhi - ylo) * rng.random((m, n))
        inside = _in_hull(a, y)
        x = cands[np.argmax(y[inside] @ cands.T - values, axis=1)]
        for k, (lo, hi) in enumerate(boxes):
            hits[k] += np.count_nonzero(np.all((x >= lo) & (x <= hi), axis=1))
        done += m
    p = hits / samples
    return [
        OracleEstimate(tuple(lo), tuple(hi), bbox * pk, bbox * float(np.sqrt(pk * (1 - pk) / samples)))
        for (lo, hi), pk in zip(boxes, p)
    ]


# ---------------------------------------------------------------------------
# boundary Monge-Ampere


def _require_interior(p):
    if p.dim != p.n or any(fc.offset <= 0 for fc in p.facets):
        raise ValueError("the origin must be an interior point")


def boundary_ma(p, l):
    """MA_mu(h_L) on S_mu = boundary of P, mu the gauge of P.

    Each surface-measure atom of L with area vector w (mass times unit
    normal) becomes an atom at y = w / mu_P(w) with mass mu_P(w) / n. Both
    are exact rationals because w is.
    """
    _require_interior(p)
    if l.dim != l.n:
        raise ValueError("L must be full-dimensional")
    n = p.n
    atoms = []
    for w in surface_area_measure(l).area_vectors:
        m = gauge_eval(p, w)
        atoms.append((tuple(v / m for v in w), m / n))
    return AtomicMeasure(atoms)


@dataclass
class EdgeDensity:
    """Density of a measure on the edge start->end w.r.t. s in [0, 1], x = start + s (end - start)."""

    start: tuple
    end: tuple
    density: Poly  # polynomial in the single variable s

    def mass(self):
        return self.density.integrate_box([0], [1])


@dataclass
class BoundaryDecomposition:
    edges: list
    atoms: AtomicMeasure

    def total_mass(self):
        return sum((e.mass() for e in self.edges), Fraction(0)) + self.atoms.total_mass()

    def edge(self, start, end):
        for e in self.edges:
            if e.start == tuple(start) and e.end == tuple(end):
                return e
        raise KeyError((start, end))


def _as_function(f, n=2):
    if isinstance(f, (Poly, MaxAffine)):
        if f.n != n:
            raise ValueError("function in the wrong number of variables")
        return f
    raise TypeError("f must be a Poly or a MaxAffine")


def support_function(k):
    """h_K as a MaxAffine: the maximum of v . x over the vertices v of K."""
    return MaxAffine([(v, 0) for v in k.vertices], k.n)


def gauge_function(p):
    """mu_P = h of the polar body, as a MaxAffine."""
    return support_function(polar(p))


def _envelope(f, start, tau):
    """Upper envelope of f(start + s tau) on [0, 1].

    Returns [(s0, s1, a)], consecutive intervals with the active slope a.
    """
    lines = [(_dot(a, start) + b, _dot(a, tau), a) for a, b in f.pieces]
    s = Fraction(0)
    cur = max(lines, key=lambda l: (l[0], l[1]))
    out = []
    while True:
        best = None
        for al, be, a in lines:
            if be <= cur[1]:
                continue
            t = (cur[0] - al) / (be - cur[1])
            if t > s and (best is None or (t, -be) < (best[0], -best[1][1])):
                best = (t, (al, be, a))
        if best is None or best[0] >= 1:
            out.append((s, Fraction(1), cur[2]))
            return out
        out.append((s, best[0], cur[2]))
        s, cur = best


def _ccw_edges(p):
    """Edges (start, end, outward facet vector u with u.x = 1) in counterclockwise order."""
    out = []
    for fc in p.facets:
        i, j = fc.vertices
        a, b = p.vertices[i], p.vertices[j]
        u = tuple(Fraction(c) / fc.offset for c in fc.normal)
        tangent = (b[0] - a[0], b[1] - a[1])
        if -u[1] * tangent[0] + u[0] * tangent[1] < 0:
            a, b = b, a
        out.append((a, b, u))
    return out


def _compose_line(f, start, direction):
    """f(start + s * direction) as a polynomial in s."""
    s = Poly.var(1, 0)
    coords = [Poly.constant(1, c) + s * d for c, d in zip(start, direction)]
    out = Poly(1)
    for e, c in f.terms.items():
        term = Poly.constant(1, c)
        for x, k in zip(coords, e):
            if k:
                term = term * x**k
        out = out + term
    return out


def _hessian(f):
    return [[f.diff(i).diff(j) for j in range(f.n)] for i in range(f.n)]


def _check_polygon(p):
    if p.n != 2:
        raise ValueError("boundary comparisons are implemented for n = 2 only")
    _require_interior(p)


def boundary_ma_explicit(p, f, k=1):
    """(dd# f + (f - E f) dd# mu)^k restricted to the boundary of P, n = 2, k = 1.

    Normalised as on each facet {u.x = 1}: det of the Hessian in a coordinate
    t with du ^ dt = dx_1 ^ dx_2. On an edge mu is linear, so only dd# f
    contributes; its density comes from the superform dd# f ^ d# mu. At a
    vertex v, dd# mu carries the atom c_v, equal to mu_P(w) for the area
    vector w of the facet of the polar dual to v, and the vertex atom is
    c_v (f - E f)(v).
    """
    _check_polygon(p)
    if k != 1:
        raise ValueError("only k = 1 is implemented")
    f = _as_function(f)
    if isinstance(f, MaxAffine):
        return _explicit_max_affine(p, f)
    n = 2
    ddsharp_f = ex.exterior_d(ex.exterior_dsharp(ex.SuperForm.function(f)))
    edges = []
    for a, b, u in _ccw_edges(p):
        mu = Poly(n, {(1, 0): u[0], (0, 1): u[1]})
        form = ex.wedge(ddsharp_f, ex.exterior_dsharp(ex.SuperForm.function(mu)))
        coeffs = [form.coefficient((j,), (0, 1)) for j in range(n)]
        sigma = (-u[1], u[0])  # d mu(sigma) = 0 and det(nu, sigma) = 1 when u.nu = 1
        sign = (-1) ** (n * (n - 1) // 2)
        density_t = sum((c * (sign * s) for c, s in zip(coeffs, sigma)), Poly(n))
        tau = (b[0] - a[0], b[1] - a[1])
        kappa = _dot(tau, sigma) / _dot(sigma, sigma)
        edges.append(EdgeDensity(a, b, _compose_line(density_t, a, tau) * kappa))
    g = f - f.euler()
    atoms = [(v, c_v * g(v)) for v, c_v in _vertex_weights(p)]
    return BoundaryDecomposition(edges, AtomicMeasure(atoms))


def _vertex_weights(p):
    """(v, c_v) over the vertices of P: the atoms of dd# mu on the boundary."""
    out = []
    for w in surface_area_measure(polar(p)).area_vectors:
        c_v = gauge_eval(p, w)
        out.append((tuple(x / c_v for x in w), c_v))
    return out


def _explicit_max_affine(p, f):
    """Explicit formula for piecewise linear f.

    dd# f lives on the kinks of f, so an edge carries atoms where a kink
    crosses its interior, of mass the jump of the slope of f in the edge
    coordinate t. The vertex term c_v (f - E f)(v) needs f - E f = b to be
    single valued at v.
    """
    edges, atoms = [], []
    for a, b, u in _ccw_edges(p):
        tau = (b[0] - a[0], b[1] - a[1])
        sigma = (-u[1], u[0])
        kappa = _dot(tau, sigma) / _dot(sigma, sigma)
        segs = _envelope(f, a, tau)
        for (_, s1, g0), (_, _, g1) in zip(segs, segs[1:]):
            x = tuple(c + s1 * d for c, d in zip(a, tau))
            atoms.append((x, (_dot(g1, tau) - _dot(g0, tau)) / kappa))
        edges.append(EdgeDensity(a, b, Poly(1)))
    for v, c_v in _vertex_weights(p):
        value = f(v)
        offsets = {b for a, b in f.pieces if _dot(a, v) + b == value}
        if len(offsets) > 1:
            raise ValueError(f"f - Ef is not single valued at the vertex {v}")
        atoms.append((v, c_v * offsets.pop()))
    return BoundaryDecomposition(edges, AtomicMeasure(atoms))


def boundary_ma_tropical(p, f, vertex):
    """Chart-based Monge-Ampere measure near a vertex v of P, n = 2.

    The star of v is parametrised by t = det(v, x), in which the reference
    form of the chart is dt. With F(t) = f restricted to the boundary the
    measure is F'' dt: a density on the two edges at v plus an atom at v of
    mass equal to the jump of F'. The jump is -[phi'] d_v f(v), with [phi']
    the jump of the slopes of the gauge in the chart.
    """
    _check_polygon(p)
    f = _as_function(f)
    v = tuple(as_fraction(c) for c in vertex)
    if v not in p.vertices:
        raise ValueError("not a vertex of P")
    star = [(a, b, u) for a, b, u in _ccw_edges(p) if v in (a, b)]
    if isinstance(f, MaxAffine):
        return _tropical_max_affine(f, v, star)
    hess = _hessian(f)
    grad = [f.diff(i)(v) for i in range(2)]
    edges, slopes = [], {}
    for a, b, u in star:
        tau = (b[0] - a[0], b[1] - a[1])
        dt = v[0] * tau[1] - v[1] * tau[0]  # dt/ds along the edge
        d = (tau[0] / dt, tau[1] / dt)  # dx/dt on this edge
        f_tt = sum((hess[i][j] * (d[i] * d[j]) for i in range(2) for j in range(2)), Poly(2))
        edges.append(EdgeDensity(a, b, _compose_line(f_tt, a, tau) * abs(dt)))
        side = 1 if (b == v) == (dt < 0) else -1  # sign of t on this edge away from v
        slopes[side] = _dot(grad, d)
    jump = slopes[1] - slopes[-1]
    return BoundaryDecomposition(edges, AtomicMeasure([(v, jump)]))


def _tropical_max_affine(f, v, star):
    """F'' dt for piecewise linear F: atoms at the kinks on the star and at v."""
    atoms, slopes = [], {}
    edges = []
    for a, b, u in star:
        tau = (b[0] - a[0], b[1] - a[1])
        dt = v[0] * tau[1] - v[1] * tau[0]
        segs = _envelope(f, a, tau)
        for (_, s1, g0), (_, _, g1) in zip(segs, segs[1:]):
            x = tuple(c + s1 * d for c, d in zip(a, tau))
            atoms.append((x, (_dot(g1, tau) - _dot(g0, tau)) / abs(dt)))
        edges.append(EdgeDensity(a, b, Poly(1)))
        grad = segs[-1][2] if b == v else segs[0][2]
        side = 1 if (b == v) == (dt < 0) else -1
        slopes[side] = _dot(grad, tau) / dt
    atoms.append((v, slopes[1] - slopes[-1]))
    return BoundaryDecomposition(edges, AtomicMeasure(atoms))


def compare_boundary_definitions(p, f, vertex):
    """(tropical - explicit) on the star of a vertex: edge density differences and the atom difference."""
    tropical = boundary_ma_tropical(p, f, vertex)
    explicit = boundary_ma_explicit(p, f)
    v = tuple(as_fraction(c) for c in vertex)
    edge_diff = [e.density - explicit.edge(e.start, e.end).density for e in tropical.edges]
    atom_e = dict(explicit.atoms.atoms)[v]
    atom_t = dict(tropical.atoms.atoms)[v]
    return edge_diff, atom_t - atom_e
