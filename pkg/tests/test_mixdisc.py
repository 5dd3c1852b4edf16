import random
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from hypothesis import given, strategies as st

from superconvex import mixdisc as md

F = Fraction
seeds = st.integers(min_value=0, max_value=10**6)


def rational_sym(rng, n, spread=3):
    m = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = F(rng.randint(-spread, spread))
    return m


def random_pd(rng, n, jitter=0.1):
    a = rng.normal(size=(n, n))
    return a @ a.T + jitter * np.eye(n)


def test_identity():
    for n in range(1, 5):
        eye = [[F(int(i == j)) for j in range(n)] for i in range(n)]
        assert md.mixed_discriminant([eye] * n) == 1


def test_diagonal_n2_example():
    a = [[F(1), F(0)], [F(0), F(2)]]
    b = [[F(3), F(0)], [F(0), F(4)]]
    assert md.mixed_discriminant([a, b]) == 5


@given(seeds)
def test_diagonal_is_determinant(seed):
    rng = random.Random(seed)
    a = rational_sym(rng, 3)
    from superconvex._linalg import fraction_det

    assert md.mixed_discriminant([a] * 3) == fraction_det(a)


@given(seeds)
def test_symmetric_in_arguments(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    ms = [rational_sym(rng, n) for _ in range(n)]
    perm = ms[:]
    rng.shuffle(perm)
    assert md.mixed_discriminant(ms) == md.mixed_discriminant(perm)


@given(seeds)
def test_wedge_consistency(seed):
    # wedge of the (1,1)-forms = n! D dV
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    ms = [rational_sym(rng, n) for _ in range(n)]
    assert md.wedge_of_matrices(ms) == factorial(n) * md.mixed_discriminant(ms)


def test_quadratic_form_n2_identity_case():
    g = md.md_quadratic_form([], n=2)
    basis = md.sym_basis(2)
    lam = 1.7
    b = np.diag([lam, -lam])
    coords = np.array([np.sum(b * e) for e in basis])
    assert coords @ g @ coords == pytest.approx(-(lam**2))
    # empty list: Q(B, B') = D(B, B')
    c = np.array([[0.3, 0.2], [0.2, -1.0]])
    cc = np.array([np.sum(c * e) for e in basis])
    assert coords @ g @ cc == pytest.approx(md.mixed_discriminant([b, c]))


def test_quadratic_form_symmetric_exactly():
    rng = np.random.default_rng(0)
    g = md.md_quadratic_form([random_pd(rng, 3)])
    assert np.array_equal(g, g.T)


def test_identity_signature_n3():
    g = md.md_quadratic_form([np.eye(3)])
    assert md.lorentz_signature_check(g) == (1, 0, 5)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_random_pd_signature(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        g = md.md_quadratic_form([random_pd(rng, n) for _ in range(n - 2)], n=n)
        dim = n * (n + 1) // 2
        assert md.lorentz_signature_check(g) == (1, 0, dim - 1)


def test_degenerate_common_kernel_reports_zero_modes():
    rng = np.random.default_rng(1)
    ms = []
    for _ in range(2):
        a = random_pd(rng, 4)
        a[0, :] = 0
        a[:, 0] = 0
        ms.append(a)
    pos, zero, neg = md.lorentz_signature_check(md.md_quadratic_form(ms))
    assert zero > 0 and pos + zero + neg == 10


def test_non_psd_rejected():
    with pytest.raises(ValueError):
        md.md_quadratic_form([np.diag([1.0, -1.0, 1.0])])


def test_alexandrov_lemma_examples():
    r = md.alexandrov_lemma_check(np.diag([1.0, -1.0]), [np.eye(2)])
    assert r.value == pytest.approx(-1.0) and r.passed
    r0 = md.alexandrov_lemma_check(np.zeros((3, 3)), [np.eye(3)] * 2)
    assert r0.value == 0 and r0.passed


def test_alexandrov_lemma_random_n4():
    rng = np.random.default_rng(2)
    for _ in range(100):
        ms = [random_pd(rng, 4) for _ in range(3)]
        b = rng.normal(size=(4, 4))
        r = md.alexandrov_lemma_check(b + b.T, ms)
        assert r.passed and r.value < 0
