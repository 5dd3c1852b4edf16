import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from superconvex import exterior as ex
from superconvex.poly import Poly

F = Fraction


def x(n, i):
    return Poly.var(n, i)


def sf(n, terms):
    return ex.SuperForm(n, terms)


seeds = st.integers(min_value=0, max_value=10**6)
dims = st.integers(min_value=1, max_value=3)


# wedge, J, sharp


def test_wedge_basis_product():
    assert ex.wedge(ex.SuperForm.dx(2, 0), ex.SuperForm.dxi(2, 0)) == sf(2, {((0,), (0,)): 1})


def test_wedge_repeated_factor_vanishes():
    a = sf(2, {((0,), (0,)): 1})
    b = sf(2, {((0,), (1,)): 1})
    assert ex.wedge(a, b).is_zero()


def test_beta_power_over_factorial_is_trace_sum():
    # beta^q/q! = sum_{|I|=q} dx_I ^ dxi_I up to the display sign (-1)^{q(q-1)/2}
    n = 3
    b = ex.beta(n)
    power = ex.SuperForm.scalar(n, 1)
    for q in range(1, n + 1):
        power = ex.wedge(power, b)
        expected = {(I, I): F((-1) ** (q * (q - 1) // 2), 1) for I in combinations(range(n), q)}
        got = (power * F(1, {1: 1, 2: 2, 3: 6}[q])).constant_values()
        assert got == expected


def test_beta_squared_n2():
    b = ex.beta(2)
    got = ex.wedge(b, b).constant_values()
    assert got == {((0, 1), (0, 1)): -2}


def test_J_generators():
    n = 2
    assert ex.apply_J(ex.SuperForm.dx(n, 0)) == -ex.SuperForm.dxi(n, 0)
    assert ex.apply_J(ex.SuperForm.dxi(n, 0)) == ex.SuperForm.dx(n, 0)
    e = sf(n, {((0,), (0,)): 1})
    assert ex.apply_J(e) == e
    f = ex.SuperForm.function(x(n, 0) * x(n, 1) + 3)
    assert ex.apply_J(f) == f


@given(seeds, dims)
def test_J_squared_is_degree_sign(seed, n):
    a = ex.random_form(n, random.Random(seed))
    expected = ex.SuperForm(n)
    for (I, K), c in a.terms.items():
        expected = expected + sf(n, {(I, K): c}) * (-1) ** (len(I) + len(K))
    assert ex.apply_J(ex.apply_J(a)) == expected
    assert ex.apply_J_inverse(ex.apply_J(a)) == a


def test_sharp_examples():
    n = 2
    assert ex.sharp(ex.SuperForm.dx(n, 0)) == ex.SuperForm.dxi(n, 0)
    a = sf(n, {((0,), ()): x(n, 1), ((1,), ()): 1})
    assert ex.sharp(a) == sf(n, {((), (0,)): x(n, 1), ((), (1,)): 1})
    assert ex.wedge(ex.sharp(a), a) == -ex.wedge(a, ex.sharp(a))
    assert ex.sharp(a) == -ex.apply_J(a)


def test_sharp_rejects_wrong_bidegree():
    with pytest.raises(ValueError):
        ex.sharp(ex.beta(2))


# d and d#


def test_d_examples():
    n = 2
    f = ex.SuperForm.function(x(n, 0) * x(n, 1))
    assert ex.exterior_d(f) == sf(n, {((0,), ()): x(n, 1), ((1,), ()): x(n, 0)})
    assert ex.exterior_d(sf(n, {((), (0,)): x(n, 0)})) == sf(n, {((0,), (0,)): 1})


def test_dsharp_examples():
    n = 2
    assert ex.exterior_dsharp(ex.SuperForm.function(x(n, 0))) == ex.SuperForm.dxi(n, 0)
    half_sq = ex.SuperForm.function((x(n, 0) ** 2 + x(n, 1) ** 2) * F(1, 2))
    assert ex.exterior_d(ex.exterior_dsharp(half_sq)) == ex.beta(n)
    mixed = ex.SuperForm.function(x(n, 0) * x(n, 1))
    assert ex.exterior_d(ex.exterior_dsharp(mixed)) == sf(n, {((0,), (1,)): 1, ((1,), (0,)): 1})


@given(seeds, dims)
def test_d_and_dsharp_square_to_zero(seed, n):
    a = ex.random_form(n, random.Random(seed), degree=3)
    assert ex.exterior_d(ex.exterior_d(a)).is_zero()
    assert ex.exterior_dsharp(ex.exterior_dsharp(a)).is_zero()


@given(seeds, dims)
def test_ddsharp_of_function_is_symmetric(seed, n):
    psi = ex.SuperForm.function(ex.random_poly(n, 4, random.Random(seed)))
    h = ex.exterior_d(ex.exterior_dsharp(psi))
    assert ex.apply_J(h) == h
    for (I, K), c in h.terms.items():
        assert c == h.coefficient(K, I)


# contractions and T


def test_contraction_examples():
    n = 2
    assert ex.delta(sf(n, {((0,), (0,)): 1})) == sf(n, {((), (0,)): x(n, 0)})
    assert ex.delta_sharp(ex.SuperForm.dxi(n, 0)) == ex.SuperForm.function(x(n, 0))
    cube = ex.SuperForm.function(x(n, 0) ** 3)
    assert ex.delta(ex.exterior_d(cube)) == cube * 3


def test_T_examples():
    n = 2
    assert ex.lie_T(ex.SuperForm.dxi(n, 0)) == ex.SuperForm.dx(n, 0)
    got = ex.lie_T(sf(n, {((), (0, 1)): 1}))
    assert got == sf(n, {((0,), (1,)): 1, ((1,), (0,)): -1})
    assert ex.lie_T(sf(n, {((0,), (0,)): 1})).is_zero()


@given(seeds, dims)
def test_delta_T_commutator(seed, n):
    a = ex.random_form(n, random.Random(seed))
    assert ex.delta(ex.lie_T(a)) - ex.lie_T(ex.delta(a)) == ex.delta_sharp(a)


@given(seeds, dims)
def test_T_is_cartan_formula_for_E_sharp(seed, n):
    a = ex.random_form(n, random.Random(seed))
    d, ds = ex.exterior_d, ex.delta_sharp
    assert ex.lie_T(a) == d(ds(a)) + ds(d(a))


# Hodge star and integration


def test_hodge_examples():
    n = 2
    assert ex.hodge_star(ex.SuperForm.scalar(n, 1)) == ex.volume_form(n)
    a = sf(n, {((0,), (0,)): 1})
    assert ex.wedge(a, ex.hodge_star(a)) == ex.volume_form(n)


@given(seeds, st.integers(min_value=1, max_value=2))
def test_hodge_norm_identity(seed, n):
    rng = random.Random(seed)
    a = ex.random_form(n, rng, degree=0)
    for p in range(n + 1):
        for q in range(n + 1):
            c = a.component(p, q)
            assert ex.wedge(c, ex.hodge_star(c)) == ex.volume_form(n) * ex.inner(c, c)


def test_super_integrate_examples():
    assert ex.super_integrate(ex.volume_form(3), ex.Box.unit(3)) == 1
    assert ex.super_integrate(ex.volume_form(2) * x(2, 0), ex.Box.unit(2)) == F(1, 2)
    psi = ex.SuperForm.function((x(2, 0) ** 2 + x(2, 1) ** 2) * F(1, 2))
    h = ex.exterior_d(ex.exterior_dsharp(psi))
    assert ex.super_integrate(ex.wedge(h, h) * F(1, 2), ex.Box((-1, -1), (1, 1))) == 4


def test_boundary_integrate_divergence_example():
    for n in (1, 2, 3):
        a = sf(n, {(tuple(range(1, n)), tuple(range(n))): x(n, 0)})
        # raw dx_1..dx_n ^ dxi_1..dxi_n is (-1)^{n(n-1)/2} dV
        sign = (-1) ** (n * (n - 1) // 2)
        assert ex.boundary_integrate(a, ex.Box.unit(n)) == ex.super_integrate(ex.exterior_d(a), ex.Box.unit(n)) == sign


def test_boundary_integrate_closed_form_gives_zero():
    n = 2
    a = sf(n, {((1,), (0, 1)): 5})
    assert ex.boundary_integrate(a, ex.Box((-1, 0), (2, 3))) == 0


def test_boundary_integrate_rejects_wrong_bidegree():
    with pytest.raises(ValueError):
        ex.boundary_integrate(ex.beta(2), ex.Box.unit(2))


@given(seeds, dims)
def test_stokes(seed, n):
    rng = random.Random(seed)
    a = ex.random_form(n, rng, bidegree=(n - 1, n), degree=3, density=0.8)
    lo = [F(rng.randint(-3, 1), rng.randint(1, 3)) for _ in range(n)]
    box = ex.Box(lo, [c + F(rng.randint(1, 4), rng.randint(1, 2)) for c in lo])
    assert ex.boundary_integrate(a, box) == ex.super_integrate(ex.exterior_d(a), box)


@given(seeds)
def test_integration_by_parts_ddsharp(seed):
    # v vanishes on the boundary of [0,1]^2 through the bump factor
    n = 2
    rng = random.Random(seed)
    bump = x(n, 0) * (1 - x(n, 0)) * x(n, 1) * (1 - x(n, 1))
    bump = bump * bump
    u = ex.SuperForm.function(ex.random_poly(n, 3, rng))
    v = ex.SuperForm.function(ex.random_poly(n, 2, rng) * bump)
    box = ex.Box.unit(n)
    ddu = ex.exterior_d(ex.exterior_dsharp(u))
    ddv = ex.exterior_d(ex.exterior_dsharp(v))
    w = ex.exterior_d(ex.exterior_dsharp(ex.SuperForm.function(ex.random_poly(n, 2, rng))))
    lhs = ex.super_integrate(ex.wedge(ex.wedge(ddu, v), w), box)
    rhs = ex.super_integrate(ex.wedge(ex.wedge(u, ddv), w), box)
    assert lhs == rhs


# Berezin transform


def test_phi_n1_examples():
    w = ex.XYForm.dy(1, 0)
    s = ex.phi_transform(w)
    assert s.bidegrees() == {(0, 0)}
    assert ex._phi_on_superform(s) == -w


@given(seeds, st.integers(min_value=1, max_value=3))
def test_phi_bidegree_map_and_involution(seed, n):
    w = ex.random_form(n, random.Random(seed), degree=1, cls=ex.XYForm)
    s = ex.phi_transform(w)
    for p, q in s.bidegrees():
        assert not w.component(p, n - q).is_zero()
    assert ex.phi_inverse(s) == w
    assert ex._phi_on_superform(s) == w * (-1) ** (n * (n + 1) // 2)


@given(seeds)
def test_phi_total_degree_n_gives_pp(seed):
    n = 2
    rng = random.Random(seed)
    for p in range(n + 1):
        w = ex.random_form(n, rng, bidegree=(p, n - p), degree=0, density=0.8, cls=ex.XYForm)
        assert ex.phi_transform(w).bidegrees() <= {(p, p)}


@given(seeds)
def test_phi_commutes_with_d(seed):
    n = 2
    w = ex.random_form(n, random.Random(seed), degree=2, cls=ex.XYForm)
    assert ex.phi_transform(ex.exterior_d(w)) == ex.exterior_d(ex.phi_transform(w)) * (-1) ** n


@given(seeds)
def test_T_phi_equals_phi_L(seed):
    n = 2
    w = ex.random_form(n, random.Random(seed), degree=0, cls=ex.XYForm)
    assert ex.lie_T(ex.phi_transform(w)) == ex.phi_transform(ex.kahler_L(w))


def test_lambda_examples():
    n = 2
    assert ex.kahler_Lambda(ex.beta_xy(n)) == ex.XYForm.scalar(n, 2)
    assert ex.kahler_Lambda(ex.XYForm(n, {((0, 1), ()): 1})).is_zero()


def test_lambda_is_adjoint_of_L():
    n = 3
    rng = random.Random(7)
    gens = [(I, K) for p in range(4) for q in range(4) for I in combinations(range(n), p) for K in combinations(range(n), q)]
    for _ in range(20):
        a = ex.XYForm(n, {rng.choice(gens): rng.randint(-3, 3) or 1})
        b = ex.XYForm(n, {rng.choice(gens): rng.randint(-3, 3) or 1})
        assert ex.inner(ex.kahler_Lambda(a), b) == ex.inner(a, ex.kahler_L(b))


def test_vertical_iff_delta_sharp_phi_zero():
    n = 2
    alpha = ex.XYForm(n, {((), (i,)): x(n, i) for i in range(n)})
    rng = random.Random(3)
    for _ in range(10):
        w = ex.random_form(n, rng, degree=1, cls=ex.XYForm)
        vertical = ex.wedge(alpha, w).is_zero()
        assert vertical == ex.delta_sharp(ex.phi_transform(w)).is_zero()
        aw = ex.wedge(alpha, w)
        assert ex.wedge(alpha, aw).is_zero()
        assert ex.delta_sharp(ex.phi_transform(aw)).is_zero()
