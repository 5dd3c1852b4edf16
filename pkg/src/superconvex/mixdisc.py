"""Mixed discriminants, their Lorentzian quadratic form and Alexandrov's lemma."""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial

import numpy as np

from . import exterior as ex
from ._linalg import fraction_det, is_psd_exact

__all__ = [
    "mixed_discriminant",
    "sym_basis",
    "md_quadratic_form",
    "lorentz_signature_check",
    "alexandrov_lemma_check",
    "LemmaResult",
    "is_psd",
    "wedge_of_matrices",
]


def _is_exact(ms):
    return all(isinstance(v, (int, Fraction)) for m in ms for row in m for v in row)


def _as_array(m):
    return np.asarray(m, dtype=float)


def mixed_discriminant(ms):
    """D(M_1..M_n) = (1/n!) sum_S (-1)^{n-|S|} det(sum_{i in S} M_i).

    Rational input gives an exact Fraction, anything else a float.
    """
    n = len(ms)
    if n == 0:
        return Fraction(1)
    for m in ms:
        if len(m) != n or any(len(row) != n for row in m):
            raise ValueError(f"need {n} matrices of size {n}x{n}")
    exact = _is_exact(ms)
    total = Fraction(0) if exact else 0.0
    for k in range(1, n + 1):
        sign = (-1) ** (n - k)
        for subset in combinations(range(n), k):
            if exact:
                s = [[sum(ms[i][r][c] for i in subset) for c in range(n)] for r in range(n)]
                total += sign * fraction_det(s)
            else:
                s = sum(_as_array(ms[i]) for i in subset)
                total += sign * float(np.linalg.det(s))
    return total / factorial(n)


def wedge_of_matrices(ms):
    """Wedge of the (1,1)-forms sum a_jk dx_j ^ dxi_k, as a multiple of dV."""
    n = len(ms)
    out = ex.SuperForm.scalar(n, 1)
    for m in ms:
        out = ex.wedge(out, ex.SuperForm(n, {((j,), (k,)): m[j][k] for j in range(n) for k in range(n) if m[j][k]}))
    return ex.super_integrate(out, ex.Box.unit(n))


def is_psd(m, tol=1e-10):
    """Exact test for rational matrices, eigenvalues otherwise."""
    if _is_exact([m]):
        return is_psd_exact(m)
    a = _as_array(m)
    if not np.allclose(a, a.T, atol=tol):
        return False
    return float(np.linalg.eigvalsh(a).min()) >= -tol


def sym_basis(n):
    """Orthonormal basis of Sym(n) for the Frobenius inner product."""
    out = []
    for i in range(n):
        e = np.zeros((n, n))
        e[i, i] = 1.0
        out.append(e)
    r = 1.0 / np.sqrt(2.0)
    for i, j in combinations(range(n), 2):
        e = np.zeros((n, n))
        e[i, j] = e[j, i] = r
        out.append(e)
    return out


def md_quadratic_form(ms, n=None):
    """Gram matrix of Q(B, B') = D(B, B', M_3..M_n) on Sym(n).

    ``ms`` holds the n-2 fixed matrices; ``n`` is needed when it is empty.
    """
    if n is None:
        if not ms:
            raise ValueError("n is required when no fixed matrices are given")
        n = len(ms[0])
    if len(ms) != n - 2:
        raise ValueError(f"expected {n - 2} fixed matrices, got {len(ms)}")
    for m in ms:
        if not is_psd(m):
            raise ValueError("fixed matrices must be positive semidefinite")
    fixed = [_as_array(m) for m in ms]
    basis = sym_basis(n)
    dim = len(basis)
    g = np.zeros((dim, dim))
    for a in range(dim):
        for b in range(a, dim):
            g[a, b] = g[b, a] = mixed_discriminant([basis[a], basis[b]] + fixed)
    return g


def lorentz_signature_check(g, tol=1e-9):
    """Counts (positive, zero, negative) of eigenvalues, |lambda| <= tol being zero."""
    g = np.asarray(g, dtype=float)
    if not np.allclose(g, g.T, atol=1e-12):
        raise ValueError("Gram matrix must be symmetric")
    w = np.linalg.eigvalsh(g)
    return int((w > tol).sum()), int((np.abs(w) <= tol).sum()), int((w < -tol).sum())


@dataclass
class LemmaResult:
    value: float
    norm: float
    passed: bool


def alexandrov_lemma_check(b, ms, tol=1e-12):
    """Alexandrov's lemma for B orthogonal to D(., M_2..M_n).

    ``b`` is projected onto {B : D(B, M_2..M_n) = 0}; the lemma says
    D(B, B, M_3..M_n) <= 0 with equality only for B = 0.
    """
    b = _as_array(b)
    n = b.shape[0]
    if len(ms) != n - 1:
        raise ValueError(f"expected {n - 1} PSD matrices")
    for m in ms:
        if not is_psd(m):
            raise ValueError("matrices must be positive semidefinite")
    fixed = [_as_array(m) for m in ms]
    basis = sym_basis(n)
    grad = np.array([mixed_discriminant([e] + fixed) for e in basis])
    coords = np.array([float(np.sum(b * e)) for e in basis])
    gg = float(grad @ grad)
    if gg > 0:
        coords = coords - (coords @ grad) / gg * grad
    bp = sum(c * e for c, e in zip(coords, basis))
    value = float(mixed_discriminant([bp, bp] + fixed[1:]))
    norm = float(np.linalg.norm(coords))
    passed = value <= tol and (norm <= tol or value < -tol)
    return LemmaResult(value, norm, passed)
