"""Exact rational polytopes: hulls, volumes, Minkowski algebra, mixed volumes
and surface area measures.

Hulls are computed incrementally with exact integer predicates after scaling
all coordinates by a common denominator. Bodies of lower dimension are handled
inside their affine hull, so volumes, vertex sets and H-representations are
available for every nonempty polytope.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations, product
from math import comb, factorial, gcd, lcm, prod
import random

from ._linalg import exact_nullspace, pivot_columns
from .poly import as_fraction

__all__ = [
    "Polytope",
    "AtomicMeasure",
    "SurfaceAreaMeasure",
    "convex_hull",
    "volume",
    "minkowski_sum",
    "minkowski_combination",
    "support_eval",
    "gauge_eval",
    "polar",
    "mixed_volume",
    "surface_area_measure",
    "minkowski_identity_check",
    "intersect",
    "union_hull",
    "union_convexity_check",
    "salee_check",
    "contains",
    "box",
    "simplex",
    "cross_polytope",
    "random_polytope",
]


# ---------------------------------------------------------------------------
# integer helpers


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _int_det(rows):
    """Bareiss fraction-free determinant of an integer matrix."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _cross(vectors, d):
    """Generalised cross product of d-1 vectors in Z^d."""
    return tuple(
        (-1) ** k * _int_det([v[:k] + v[k + 1:] for v in vectors]) for k in range(d)
    )


def _rank(rows):
    rows = [[Fraction(v) for v in r] for r in rows]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _primitive(normal, offset):
    g = reduce(gcd, (abs(v) for v in normal), abs(offset))
    if g > 1:
        return tuple(v // g for v in normal), offset // g
    return tuple(normal), offset


# ---------------------------------------------------------------------------
# hull in full-dimensional integer coordinates


@dataclass
class _Hull:
    vertices: list  # indices of extreme points
    facets: list  # (normal, offset, vertex indices), normal . x <= offset
    area: list  # integer area vectors times (d-1)!, aligned with facets
    volume: Fraction


def _hull_1d(pts):
    lo = min(range(len(pts)), key=lambda i: pts[i][0])
    hi = max(range(len(pts)), key=lambda i: pts[i][0])
    facets = [((-1,), -pts[lo][0], (lo,)), ((1,), pts[hi][0], (hi,))]
    return _Hull(sorted({lo, hi}), facets, [(-1,), (1,)], Fraction(pts[hi][0] - pts[lo][0]))


def _initial_simplex(pts, d):
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    chosen = [order[0]]
    basis = []
    for i in order[1:] + order[:1]:
        v = [a - b for a, b in zip(pts[i], pts[chosen[0]])]
        if _rank(basis + [v]) > len(basis):
            basis.append(v)
            chosen.append(i)
            if len(chosen) == d + 1:
                return chosen
    raise ValueError("points are not full-dimensional")


def _hull_nd(pts, d):
    simplex = _initial_simplex(pts, d)
    centre = [sum(pts[i][k] for i in simplex) for k in range(d)]
    m = d + 1

    def make_facet(idx):
        base = pts[idx[0]]
        normal = _cross([[a - b for a, b in zip(pts[j], base)] for j in idx[1:]], d)
        offset = _dot(normal, base)
        if _dot(normal, centre) - m * offset > 0:
            normal = tuple(-v for v in normal)
            offset = -offset
        return (tuple(idx), normal, offset)

    facets = {}
    next_id = 0
    for drop in range(m):
        facets[next_id] = make_facet([simplex[j] for j in range(m) if j != drop])
        next_id += 1
    in_simplex = set(simplex)
    for p in range(len(pts)):
        if p in in_simplex:
            continue
        x = pts[p]
        visible = [fid for fid, (_, nrm, off) in facets.items() if _dot(nrm, x) > off]
        if not visible:
            continue
        ridges = {}
        for fid in visible:
            idx = facets[fid][0]
            for k in range(d):
                ridge = tuple(sorted(idx[:k] + idx[k + 1:]))
                ridges[ridge] = ridges.get(ridge, 0) + 1
        for fid in visible:
            del facets[fid]
        for ridge, count in ridges.items():
            if count == 1:
                facets[next_id] = make_facet(list(ridge) + [p])
                next_id += 1

    simplices = list(facets.values())
    groups = {}
    for idx, nrm, off in simplices:
        key = _primitive(nrm, off)
        groups.setdefault(key, []).append((idx, nrm))
    normals = list(groups)
    candidates = sorted({i for idx, _, _ in simplices for i in idx})
    extreme = []
    for v in candidates:
        active = [nrm for nrm, off in normals if _dot(nrm, pts[v]) == off]
        if _rank(active) == d:
            extreme.append(v)
    facets_out, area_out = [], []
    for (nrm, off), members in groups.items():
        verts = tuple(v for v in extreme if _dot(nrm, pts[v]) == off)
        area = [0] * d
        for idx, _ in members:
            base = pts[idx[0]]
            c = _cross([[a - b for a, b in zip(pts[j], base)] for j in idx[1:]], d)
            if _dot(c, nrm) < 0:
                c = tuple(-v for v in c)
            area = [a + b for a, b in zip(area, c)]
        facets_out.append((nrm, off, verts))
        area_out.append(tuple(area))
    origin = pts[simplex[0]]
    total = 0
    for idx, _, _ in simplices:
        total += abs(_int_det([[a - b for a, b in zip(pts[j], origin)] for j in idx]))
    return _Hull(extreme, facets_out, area_out, Fraction(total, factorial(d)))


def _hull(pts, d):
    if d == 0:
        return _Hull([0], [], [], Fraction(1))
    if d == 1:
        return _hull_1d(pts)
    return _hull_nd(pts, d)


def _affine_frame(points):
    """Pivot coordinates of the affine hull and its dimension."""
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    diffs = [d for d in diffs if any(d)]
    if not diffs:
        return ()
    return pivot_columns(diffs, len(base))


def _scale_to_int(points):
    den = lcm(*(v.denominator for p in points for v in p)) if points else 1
    return den, [tuple(int(v * den) for v in p) for p in points]


# ---------------------------------------------------------------------------
# polytope


@dataclass(frozen=True)
class Facet:
    normal: tuple  # outward, primitive integer vector
    offset: Fraction  # normal . x <= offset on the body
    vertices: tuple  # indices into Polytope.vertices


class Polytope:
    """Convex hull of finitely many rational points in R^n.

    Vertices are stored irredundantly in sorted order, so two polytopes are
    equal exactly when their vertex tuples agree.
    """

    __slots__ = ("n", "vertices", "dim", "facets", "_volume", "_area", "_pivots", "_rel_volume")

    def __init__(self, points, n=None):
        pts = sorted({tuple(as_fraction(v) for v in p) for p in points})
        if n is None:
            if not pts:
                raise ValueError("empty point set; use Polytope.empty(n)")
            n = len(pts[0])
        if any(len(p) != n for p in pts):
            raise ValueError("points of mixed dimension")
        self.n = n
        if not pts:
            self.vertices, self.dim, self.facets = (), -1, ()
            self._volume, self._area, self._pivots, self._rel_volume = Fraction(0), (), (), Fraction(0)
            return
        pivots = _affine_frame(pts)
        d = len(pivots)
        den, ints = _scale_to_int(pts)
        proj = [tuple(p[k] for k in pivots) for p in ints]
        hull = _hull(proj, d)
        verts = tuple(pts[i] for i in sorted(hull.vertices))
        self.vertices = verts
        self.dim = d
        self._pivots = pivots
        self._rel_volume = hull.volume / Fraction(den) ** d
        if d == n:
            pos = {pts[i]: k for k, i in enumerate(sorted(hull.vertices))}
            self.facets = tuple(
                Facet(nrm, Fraction(off, den), tuple(sorted(pos[pts[i]] for i in vs)))
                for nrm, off, vs in hull.facets
            )
            scale = Fraction(den) ** (n - 1) * factorial(n - 1)
            self._area = tuple(tuple(Fraction(a) / scale for a in area) for area in hull.area)
            self._volume = self._rel_volume
        else:
            self.facets = ()
            self._area = ()
            self._volume = Fraction(0)

    @classmethod
    def empty(cls, n):
        return cls([], n)

    @property
    def is_empty(self):
        return not self.vertices

    @property
    def volume(self):
        return self._volume

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.n == other.n and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.n, self.vertices))

    def __repr__(self):
        verts = ", ".join("(" + ", ".join(str(v) for v in p) + ")" for p in self.vertices)
        return f"Polytope(n={self.n}, dim={self.dim}, vertices=[{verts}])"

    def halfspaces(self):
        """Inequalities a . x <= b describing the body (equalities appear twice)."""
        if self.is_empty:
            raise ValueError("empty polytope has no H-representation")
        if self.dim == self.n:
            return [(tuple(Fraction(v) for v in f.normal), f.offset) for f in self.facets]
        out = []
        base = self.vertices[0]
        diffs = [[a - b for a, b in zip(p, base)] for p in self.vertices[1:]]
        for eta in exact_nullspace(diffs, self.n) if diffs else [
            [Fraction(int(i == j)) for j in range(self.n)] for i in range(self.n)
        ]:
            c = _dot(eta, base)
            out.append((tuple(eta), c))
            out.append((tuple(-v for v in eta), -c))
        if self.dim >= 1:
            den, ints = _scale_to_int(list(self.vertices))
            proj = [tuple(p[k] for k in self._pivots) for p in ints]
            hull = _hull(proj, self.dim)
            for nrm, off, _ in hull.facets:
                a = [Fraction(0)] * self.n
                for k, v in zip(self._pivots, nrm):
                    a[k] = Fraction(v)
                out.append((tuple(a), Fraction(off, den)))
        return out

    def translate(self, t):
        t = [as_fraction(v) for v in t]
        return Polytope([[a + b for a, b in zip(p, t)] for p in self.vertices], self.n)

    def scale(self, s):
        s = as_fraction(s)
        if s == 0:
            return Polytope([[Fraction(0)] * self.n], self.n)
        return Polytope([[s * a for a in p] for p in self.vertices], self.n)

    def area_vectors(self):
        """Exact facet area vectors: (n-1)-volume times unit outward normal."""
        return self._area


def convex_hull(points, n=None):
    """Irredundant V-representation with facet data."""
    if not points and n is None:
        raise ValueError("convex_hull needs at least one point")
    return Polytope(points, n)


def volume(p):
    return p.volume


def _check_same(p, q):
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} vs {q.n}")


def minkowski_sum(p, q):
    _check_same(p, q)
    if p.is_empty or q.is_empty:
        return Polytope.empty(p.n)
    return Polytope([[a + b for a, b in zip(u, v)] for u in p.vertices for v in q.vertices], p.n)


def minkowski_combination(bodies, coeffs):
    """sum_i coeffs_i * bodies_i for nonnegative integer or rational coefficients."""
    n = bodies[0].n
    out = Polytope([[Fraction(0)] * n], n)
    for body, c in zip(bodies, coeffs):
        if c:
            out = minkowski_sum(out, body.scale(c))
    return out


def support_eval(p, x):
    """h_P(x) = max over vertices of v . x (exact for rational x)."""
    if p.is_empty:
        raise ValueError("support function of the empty set")
    if any(isinstance(v, float) for v in x):
        return max(sum(float(a) * b for a, b in zip(v, x)) for v in p.vertices)
    x = [as_fraction(v) for v in x]
    return max(_dot(v, x) for v in p.vertices)


def _require_interior_origin(p):
    if p.dim != p.n or any(f.offset <= 0 for f in p.facets):
        raise ValueError("the origin must be an interior point")


def gauge_eval(p, x):
    """mu_P(x) = h_{P polar}(x) = max over facets of (a . x)/b."""
    _require_interior_origin(p)
    if any(isinstance(v, float) for v in x):
        return max(sum(a * b for a, b in zip(f.normal, x)) / float(f.offset) for f in p.facets)
    x = [as_fraction(v) for v in x]
    return max(_dot(f.normal, x) / f.offset for f in p.facets)


def polar(p):
    """P polar = {y : h_P(y) <= 1}; its vertices are a/b over the facets of P."""
    _require_interior_origin(p)
    return Polytope([[Fraction(a) / f.offset for a in f.normal] for f in p.facets], p.n)


def contains(p, x):
    x = [as_fraction(v) for v in x]
    if p.is_empty:
        return False
    return all(_dot(a, x) <= b for a, b in p.halfspaces())


def _vol_of_combo(bodies, coeffs, cache):
    key = tuple(coeffs)
    if key not in cache:
        cache[key] = minkowski_combination(bodies, coeffs).volume
    return cache[key]


def mixed_volume(ks):
    """V(K_1..K_n) by polarisation, grouping repeated bodies.

    With distinct bodies B_i of multiplicity k_i the inclusion-exclusion sum
    over subsets collapses to sum_j (-1)^{n-|j|} prod C(k_i, j_i) vol(sum j_i B_i).
    """
    if not ks:
        raise ValueError("need n bodies")
    n = ks[0].n
    if len(ks) != n:
        raise ValueError(f"need exactly {n} bodies in R^{n}, got {len(ks)}")
    for k in ks:
        _check_same(ks[0], k)
        if k.is_empty:
            raise ValueError("mixed volume of an empty body")
    distinct, mult = [], []
    for k in ks:
        for i, b in enumerate(distinct):
            if b == k:
                mult[i] += 1
                break
        else:
            distinct.append(k)
            mult.append(1)
    cache = {}
    total = Fraction(0)
    for js in product(*(range(m + 1) for m in mult)):
        s = sum(js)
        if s == 0:
            continue
        weight = (-1) ** (n - s) * prod(comb(m, j) for m, j in zip(mult, js))
        total += weight * _vol_of_combo(distinct, js, cache)
    return total / factorial(n)


# ---------------------------------------------------------------------------
# measures


class AtomicMeasure:
    """Finite list of atoms (point, mass); exact when the data are rational."""

    __slots__ = ("points", "masses")

    def __init__(self, atoms=()):
        merged = {}
        order = []
        for point, mass in atoms:
            point = tuple(point)
            if point not in merged:
                merged[point] = mass
                order.append(point)
            else:
                merged[point] = merged[point] + mass
        self.points = tuple(order)
        self.masses = tuple(merged[p] for p in order)

    @property
    def atoms(self):
        return list(zip(self.points, self.masses))

    def __len__(self):
        return len(self.points)

    def total_mass(self):
        return sum(self.masses, Fraction(0) if all(isinstance(m, (int, Fraction)) for m in self.masses) else 0.0)

    def pair(self, f):
        """sum_atoms f(point) * mass."""
        return sum((f(p) * m for p, m in self.atoms), Fraction(0))

    def barycenter(self):
        """sum mass * point (unnormalised first moment)."""
        if not self.points:
            return ()
        n = len(self.points[0])
        return tuple(sum((m * p[k] for p, m in self.atoms), Fraction(0)) for k in range(n))

    def translate(self, t):
        return AtomicMeasure([(tuple(a + b for a, b in zip(p, t)), m) for p, m in self.atoms])

    def sorted(self):
        return AtomicMeasure(sorted(self.atoms))

    def __eq__(self, other):
        return isinstance(other, AtomicMeasure) and sorted(self.atoms) == sorted(other.atoms)

    def __repr__(self):
        body = ", ".join(f"({', '.join(str(v) for v in p)}): {m}" for p, m in self.atoms)
        return f"AtomicMeasure({body})"


class SurfaceAreaMeasure(AtomicMeasure):
    """Surface area measure of a polytope.

    ``area_vectors`` holds the exact products mass * unit normal; points and
    masses are their floating normalisations. Pairings with 1-homogeneous
    functions are exact through the area vectors.
    """

    __slots__ = ("area_vectors",)

    def __init__(self, area_vectors):
        self.area_vectors = tuple(tuple(v) for v in area_vectors)
        atoms = []
        for w in self.area_vectors:
            m = sum(float(v) ** 2 for v in w) ** 0.5
            atoms.append((tuple(float(v) / m for v in w), m))
        super().__init__(atoms)

    def barycenter(self):
        n = len(self.area_vectors[0])
        return tuple(sum((w[k] for w in self.area_vectors), Fraction(0)) for k in range(n))

    def pair_homogeneous(self, f):
        """sum f(u) * mass for 1-homogeneous f, evaluated as sum f(area vector)."""
        return sum((f(w) for w in self.area_vectors), Fraction(0))


def surface_area_measure(p):
    """One atom per facet at the outward unit normal with mass the facet volume."""
    if p.dim != p.n:
        raise ValueError("surface area measure needs a full-dimensional body")
    return SurfaceAreaMeasure(p.area_vectors())


def minkowski_identity_check(l, k):
    """(V(L, K[n-1]), (1/n) sum h_L(u) mass), both exact."""
    if k.dim != k.n:
        raise ValueError("K must be full-dimensional")
    n = k.n
    lhs = mixed_volume([l] + [k] * (n - 1))
    rhs = surface_area_measure(k).pair_homogeneous(lambda w: support_eval(l, w)) / n
    return lhs, rhs


# ---------------------------------------------------------------------------
# intersections and unions


def _solve_square(rows, rhs):
    n = len(rows)
    a = [[Fraction(v) for v in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def intersect(p, q):
    """P cap Q by merging H-representations and enumerating vertices."""
    _check_same(p, q)
    n = p.n
    if p.is_empty or q.is_empty:
        return Polytope.empty(n)
    hs = list(dict.fromkeys(p.halfspaces() + q.halfspaces()))
    found = set()
    for subset in combinations(range(len(hs)), n):
        x = _solve_square([hs[i][0] for i in subset], [hs[i][1] for i in subset])
        if x is None:
            continue
        if all(_dot(a, x) <= b for a, b in hs):
            found.add(tuple(x))
    return Polytope(list(found), n)


def union_hull(p, q):
    _check_same(p, q)
    return Polytope(list(p.vertices) + list(q.vertices), p.n)


def _relative_volume(body, pivots):
    if body.is_empty:
        return Fraction(0)
    den, ints = _scale_to_int(list(body.vertices))
    proj = sorted({tuple(v[k] for k in pivots) for v in ints})
    d = len(pivots)
    if len(_affine_frame([tuple(Fraction(c) for c in v) for v in proj])) < d:
        return Fraction(0)
    return _hull(proj, d).volume / Fraction(den) ** d


def union_convexity_check(p, q):
    """P cup Q is convex iff vol(conv(P cup Q)) = vol P + vol Q - vol(P cap Q).

    Volumes are taken inside the affine hull of P cup Q, so lower-dimensional
    pairs are decided as well.
    """
    c = union_hull(p, q)
    pivots = c._pivots
    inter = intersect(p, q)
    if inter.is_empty:
        return False
    return _relative_volume(c, pivots) == (
        _relative_volume(p, pivots) + _relative_volume(q, pivots) - _relative_volume(inter, pivots)
    )


def salee_check(p, q, directions=100, seed=0):
    """conv(P cup Q) + P cap Q = P + Q, and the support-function identity."""
    if not union_convexity_check(p, q):
        raise ValueError("P cup Q is not convex")
    u, i = union_hull(p, q), intersect(p, q)
    if minkowski_sum(u, i) != minkowski_sum(p, q):
        return False
    rng = random.Random(seed)
    for _ in range(directions):
        x = [Fraction(rng.randint(-100, 100), rng.randint(1, 50)) for _ in range(p.n)]
        if support_eval(u, x) + support_eval(i, x) != support_eval(p, x) + support_eval(q, x):
            return False
    return True


# ---------------------------------------------------------------------------
# constructors


def box(lower, upper):
    return Polytope(list(product(*[(as_fraction(a), as_fraction(b)) for a, b in zip(lower, upper)])))


def simplex(n, scale=1):
    pts = [[Fraction(0)] * n]
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = as_fraction(scale)
        pts.append(e)
    return Polytope(pts)


def cross_polytope(n, scale=1):
    pts = []
    for i in range(n):
        for s in (1, -1):
            e = [Fraction(0)] * n
            e[i] = s * as_fraction(scale)
            pts.append(e)
    return Polytope(pts)


def random_polytope(n, rng, points=6, spread=4, full=True, denominator=1):
    """Hull of random rational points; retried until full-dimensional if asked."""
    while True:
        pts = [
            [Fraction(rng.randint(-spread, spread), rng.randint(1, denominator)) for _ in range(n)]
            for _ in range(points)
        ]
        p = Polytope(pts)
        if not full or p.dim == n:
            return p
