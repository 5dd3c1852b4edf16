"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line with its runtime."""

import random
from fractions import Fraction
from itertools import combinations
from time import perf_counter

import numpy as np

from superconvex import alexandrov as al
from superconvex import bodies as bd
from superconvex import cones
from superconvex import exterior as ex
from superconvex import mixdisc as md
from superconvex import monge_ampere as ma
from superconvex import valuations as va
from superconvex._linalg import exact_rank

F = Fraction


def run_criterion(capsys, number, title, limit, body):
    """Run body() under a time limit and print one result line."""
    start = perf_counter()
    error = None
    try:
        body()
    except Exception as exc:
        error = exc
    elapsed = perf_counter() - start
    ok = error is None and elapsed < limit
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} ({elapsed:.1f} s, limit {limit} s)")
    if error is not None:
        raise error
    assert elapsed < limit, f"took {elapsed:.1f} s"


def random_box(rng, n):
    lo = [F(rng.randint(-3, 1), rng.randint(1, 3)) for _ in range(n)]
    return ex.Box(lo, [c + F(rng.randint(1, 4), rng.randint(1, 2)) for c in lo])


def test_criterion_01_exact_algebra(capsys):
    def body():
        rng = random.Random(1)
        for _ in range(30):
            n = rng.randint(1, 3)
            a = ex.random_form(n, rng, degree=3)
            assert ex.exterior_d(ex.exterior_d(a)).is_zero()
            assert ex.exterior_dsharp(ex.exterior_dsharp(a)).is_zero()
            h = ex.exterior_d(ex.exterior_dsharp(ex.SuperForm.function(ex.random_poly(n, 4, rng))))
            assert ex.apply_J(h) == h
        for _ in range(50):
            n = rng.randint(1, 3)
            a = ex.random_form(n, rng, bidegree=(n - 1, n), degree=3, density=0.8)
            box = random_box(rng, n)
            assert ex.boundary_integrate(a, box) == ex.super_integrate(ex.exterior_d(a), box)
        for _ in range(100):
            n = rng.randint(1, 3)
            a = ex.random_form(n, rng)
            assert ex.delta(ex.lie_T(a)) - ex.lie_T(ex.delta(a)) == ex.delta_sharp(a)

    run_criterion(capsys, 1, "d^2 = d#^2 = 0, J-symmetry, Stokes, [delta, T] = delta#", 30, body)


def test_criterion_02_phi_involution(capsys):
    def body():
        for n in range(1, 5):
            sign = (-1) ** (n * (n + 1) // 2)
            for p in range(n + 1):
                for k in range(n + 1):
                    for I in combinations(range(n), p):
                        for K in combinations(range(n), k):
                            w = ex.XYForm(n, {(I, K): 1})
                            assert ex._phi_on_superform(ex.phi_transform(w)) == w * sign
        n = 2
        alpha = ex.XYForm(n, {((), (i,)): ex.Poly.monomial(tuple(int(j == i) for j in range(n))) for i in range(n)})
        rng = random.Random(2)
        vertical_seen = 0
        for t in range(50):
            w = ex.random_form(n, rng, degree=1, cls=ex.XYForm)
            if t % 2:
                w = ex.wedge(alpha, w)
            vertical = ex.wedge(alpha, w).is_zero()
            vertical_seen += vertical
            assert vertical == ex.delta_sharp(ex.phi_transform(w)).is_zero()
        assert 0 < vertical_seen < 50

    run_criterion(capsys, 2, "Phi^2 = (-1)^{n(n+1)/2}, vertical iff delta# Phi = 0", 60, body)


def test_criterion_03_structure_ranks(capsys):
    def body():
        rng = random.Random(3)
        for n in range(1, 5):
            for p in range(n + 1):
                kernel = cones.ker_T_basis(n, p)
                assert all(cones.is_symmetric(k) for k in kernel)
                dim = len(kernel)
                forms = [
                    cones.elementary([[rng.randint(-2, 2) for _ in range(n)] for _ in range(p)], n)
                    for _ in range(10 * max(dim, 1))
                ]
                assert all(ex.lie_T(e.form).is_zero() for e in forms[:5])
                samples = [e.vector() for e in forms]
                assert exact_rank(samples) == dim
                assert exact_rank(samples + [k.vector() for k in kernel]) == dim
        for n in range(1, 4):
            for N in range(2 * n + 1):
                dim_ker, dim_dec = cones.primitive_vs_decomposable(n, N, seed=N)
                assert dim_ker == dim_dec
                if N > n:
                    assert dim_ker == 0

    run_criterion(capsys, 3, "Ker T = strong span, Ker Lambda = decomposable span", 120, body)


def test_criterion_04_mixed_volumes(capsys):
    def body():
        rng = random.Random(4)
        for n in (2, 3):
            for _ in range(5):
                ks = [bd.random_polytope(n, rng, points=n + 3) for _ in range(n)]
                assert bd.mixed_volume([ks[0]] * n) == ks[0].volume
                v = bd.mixed_volume(ks)
                for perm in ([ks[-1]] + ks[:-1], ks[::-1]):
                    assert bd.mixed_volume(perm) == v
                extra = bd.random_polytope(n, rng)
                a, b = F(rng.randint(1, 3)), F(rng.randint(1, 3), 2)
                combo = bd.minkowski_combination([ks[0], extra], [a, b])
                assert bd.mixed_volume([combo] + ks[1:]) == a * v + b * bd.mixed_volume([extra] + ks[1:])
        for n, trials in ((2, 200), (3, 100)):
            for _ in range(trials):
                ks = [bd.random_polytope(n, rng, points=n + 3) for _ in range(n)]
                k, l, rest = ks[0], ks[1], ks[2:]
                lhs = bd.mixed_volume([k, l] + rest) ** 2
                assert lhs >= bd.mixed_volume([k, k] + rest) * bd.mixed_volume([l, l] + rest)

    run_criterion(capsys, 4, "mixed volumes: diagonal, symmetry, multilinearity, AF", 300, body)


def test_criterion_05_mixed_discriminants(capsys):
    def body():
        rng = random.Random(5)
        for n in range(1, 5):
            for _ in range(5):
                ms = []
                for _ in range(n):
                    m = [[F(0)] * n for _ in range(n)]
                    for i in range(n):
                        for j in range(i, n):
                            m[i][j] = m[j][i] = F(rng.randint(-3, 3))
                    ms.append(m)
                assert md.wedge_of_matrices(ms) == np.prod(range(1, n + 1)) * md.mixed_discriminant(ms)
        nrng = np.random.default_rng(5)
        for t in range(100):
            n = 2 + t % 4
            ms = []
            for _ in range(n - 2):
                a = nrng.normal(size=(n, n))
                ms.append(a @ a.T + 0.1 * np.eye(n))
            g = md.md_quadratic_form(ms, n=n)
            pos, zero, neg = md.lorentz_signature_check(g, tol=1e-9)
            assert pos == 1 and zero == 0
        for _ in range(500):
            ms = []
            for _ in range(3):
                a = nrng.normal(size=(4, 4))
                ms.append(a @ a.T + 0.1 * np.eye(4))
            b = nrng.normal(size=(4, 4))
            r = md.alexandrov_lemma_check(b + b.T, ms)
            assert r.passed
            if r.norm >= 1e-6:
                assert r.value < 0

    run_criterion(capsys, 5, "mixed discriminants: wedge, Lorentz signature, Alexandrov lemma", 120, body)


def test_criterion_06_monge_ampere(capsys):
    def body():
        rng = random.Random(6)
        for _ in range(100):
            f = ma.random_max_affine(2, rng, pieces=rng.randint(3, 12))
            assert ma.ma_measure(f).total_mass() == ma.recession_body(f).volume
        for n in (2, 3):
            for _ in range(5):
                k = bd.random_polytope(n, rng)
                assert ma.ma_measure(ma.support_function(k)).atoms == [((0,) * n, k.volume)]
        for seed in range(3):
            f = ma.random_max_affine(2, rng, pieces=rng.randint(3, 8))
            m = ma.ma_measure(f)
            boxes = [(tuple(float(c) - 0.05 for c in p), tuple(float(c) + 0.05 for c in p)) for p in m.points[:2]]
            ests = ma.ma_oracle(f, boxes, samples=10**6, seed=seed)
            total = ma.ma_oracle(f, samples=10**6, seed=seed)[0]
            assert abs(total.mass - float(m.total_mass())) <= 3 * total.sigma
            for est, mass in zip(ests, m.masses[:2]):
                assert abs(est.mass - float(mass)) <= 3 * est.sigma + 1e-12

    run_criterion(capsys, 6, "Monge-Ampere: total mass, MA(h_K), Monte-Carlo oracle", 300, body)


def test_criterion_07_surface_measures(capsys):
    def body():
        rng = random.Random(7)
        fixed = [bd.box([0, 0], [1, 1]), bd.simplex(2), bd.simplex(3), bd.cross_polytope(3), bd.box([0] * 3, [1, 2, 3])]
        for p in fixed + [bd.random_polytope(rng.randint(2, 3), rng, points=7) for _ in range(20)]:
            assert all(c == 0 for c in bd.surface_area_measure(p).barycenter())
        for t in range(50):
            n = 2 + t % 2
            lhs, rhs = bd.minkowski_identity_check(bd.random_polytope(n, rng), bd.random_polytope(n, rng))
            assert lhs == rhs

    run_criterion(capsys, 7, "surface measures: barycenter, Minkowski identity", 60, body)


def union_convex_pair(rng, n):
    """Two boxes overlapping in a slab, so their union is a box."""
    lo = [F(rng.randint(-3, 0)) for _ in range(n)]
    hi = [c + rng.randint(2, 4) for c in lo]
    k = rng.randrange(n)
    a = lo[k] + F(rng.randint(1, 3), 6) * (hi[k] - lo[k])
    b = a + F(rng.randint(0, 2), 6) * (hi[k] - lo[k])
    hi1, lo2 = list(hi), list(lo)
    hi1[k], lo2[k] = b, a
    p, q = bd.box(lo, hi1), bd.box(lo2, hi)
    if rng.random() < 0.5:
        shift = [F(rng.randint(-2, 2), 3) for _ in range(n)]
        p, q = p.translate(shift), q.translate(shift)
    return p, q


def test_criterion_08_valuations(capsys):
    def body():
        rng = random.Random(8)
        for t in range(20):
            n = 2 + t % 2
            p, q = union_convex_pair(rng, n)
            assert bd.union_convexity_check(p, q)
            assert bd.salee_check(p, q, seed=t)
            a = bd.random_polytope(n, rng, points=n + 2)
            assert va.valuation_additivity_check(va.mu(a), p, q)
        for t in range(10):
            n = 2 + t % 2
            p, q = union_convex_pair(rng, n)
            comps = [bd.random_polytope(n, rng, points=n + 2) for _ in range(n)]
            for deg in range(1, n):
                v = va.Valuation(n, [(1, deg, tuple(comps[: n - deg]))])
                assert va.valuation_additivity_check(v, p, q)
        a, b = bd.random_polytope(2, rng), bd.random_polytope(2, rng)
        conv = va.valuation_convolve(va.mu(a), va.mu(b))
        target = va.mu(bd.minkowski_sum(a, b))
        for _ in range(10):
            k = bd.random_polytope(2, rng)
            assert va.valuation_eval(conv, k) == va.valuation_eval(target, k)
        for _ in range(10):
            n = rng.randint(2, 3)
            v = va.mu(bd.random_polytope(n, rng, points=n + 2))
            k = bd.random_polytope(n, rng, points=n + 2)
            parts, doubled = va.mcmullen_decompose(v, k), va.mcmullen_decompose(v, k.scale(2))
            assert all(d == 2**p * t for p, (d, t) in enumerate(zip(doubled, parts)))

    run_criterion(capsys, 8, "valuations: Salee, additivity, convolution, McMullen", 120, body)


def test_criterion_09_alexandrov_spectrum(capsys):
    def body():
        rows = al.spectrum_report([4, 5])
        for r in rows:
            assert (r.n_positive, r.n_zero) == (1, 3)
            assert r.n_negative == 21
            assert r.symmetry <= 1e-8
        assert rows[0].tol >= 3 * rows[1].tol
        rng = np.random.default_rng(9)
        basis = al.FunctionBasis(3, 4)
        grid = al.SphereGrid.gauss(4)
        mass = al.mass_matrix(basis, grid)
        tol = 10 * grid.h**2
        for _ in range(20):
            g = al.qform_gram(basis, [al.random_ellipsoid(3, rng)], grid)
            assert np.abs(g - g.T).max() / max(np.abs(g).max(), 1.0) <= 1e-8
            pos, zero, neg, _ = al.classify_spectrum(al.orthonormal_gram(g, mass), tol)
            assert pos == 1 and zero >= 3 and pos + zero + neg == len(basis)

    run_criterion(capsys, 9, "Alexandrov spectrum: round and ellipsoid cases", 600, body)


def test_criterion_10_wirtinger(capsys):
    def body():
        value, target = al.wirtinger_check(512)
        assert abs(value - target) <= 1e-3

    run_criterion(capsys, 10, "Wirtinger constant at m = 512", 10, body)


def test_criterion_11_boundary_ma(capsys):
    def body():
        rng = random.Random(11)
        p1 = bd.Polytope([[2, 0], [-1, 1], [-1, -2]])
        p2 = bd.box([-1, -2], [3, 1])
        l = bd.random_polytope(2, rng)
        m1, m2 = ma.boundary_ma(p1, l), ma.boundary_ma(p2, l)
        for _ in range(10):
            h = bd.random_polytope(2, rng)

            def f(y, h=h):
                return bd.support_eval(h, y)

            a, b = m1.pair(f), m2.pair(f)
            assert a == b
        assert m1.pair(lambda y: bd.support_eval(l, y)) == l.volume
        linear = ma.MaxAffine([((1, 2), 0)])
        for p in (p1, p2):
            v = p.vertices[0]
            assert v[0] + 2 * v[1] != 0
            assert ma.compare_boundary_definitions(p, linear, v)[1] != 0
            mu = ma.gauge_function(p)
            for w in p.vertices:
                edge_diff, atom_diff = ma.compare_boundary_definitions(p, mu, w)
                assert atom_diff == 0 and all(d.is_zero() for d in edge_diff)

    run_criterion(capsys, 11, "boundary MA: gauge independence, definition comparison", 60, body)
