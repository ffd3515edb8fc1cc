"""Independent oracles used by the test suite.

These deliberately avoid the library's own code paths: companion-matrix
eigenvalues for root solving, exhaustive permutations for bottleneck
matching, grid search for the best constant approximation, and the
three-term Chebyshev recurrence for extremal-function growth.
"""

from __future__ import annotations

import itertools

import numpy as np


def companion_roots(monic_tail) -> np.ndarray:
    """Eigenvalues of the companion matrix of t^n + a_1 t^(n-1) + ... + a_n."""
    a = np.asarray(monic_tail, dtype=complex).ravel()
    n = a.size
    if n == 1:
        return np.array([-a[0]])
    C = np.zeros((n, n), dtype=complex)
    C[1:, :-1] = np.eye(n - 1)
    # full coefficient vector is (1, a_1, ..., a_n); last column holds -a_n..-a_1
    C[:, -1] = -a[::-1]
    return np.linalg.eigvals(C)


def brute_bottleneck(a, b) -> float:
    """Minimal over all bijections of the max pairwise distance (n <= 8)."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    assert a.size == b.size <= 8
    best = np.inf
    for perm in itertools.permutations(range(b.size)):
        worst = max(abs(a[i] - b[j]) for i, j in enumerate(perm))
        best = min(best, worst)
    return float(best)


def grid_minimax_constant(values: np.ndarray, resolution: int = 200001) -> float:
    """Best max-error achievable by a real constant, by brute grid search."""
    values = np.asarray(values, dtype=float)
    cs = np.linspace(values.min(), values.max(), resolution)
    errs = np.abs(values[None, :] - cs[:, None]).max(axis=1)
    return float(errs.min())


def cheb_t(d: int, z: complex) -> complex:
    """T_d(z) by the three-term recurrence."""
    if d == 0:
        return 1.0
    prev, cur = 1.0 + 0j, complex(z)
    for _ in range(d - 1):
        prev, cur = cur, 2 * z * cur - prev
    return cur


def cheb_growth_oracle(z: complex, d: int = 30) -> float:
    """d-th root growth of the norm-calibrated Chebyshev value 2 T_d(z).

    The factor 2 removes the 2^(d-1) leading-coefficient offset so the d-th
    root converges at a geometric (not 1/d) rate.
    """
    return float(abs(2.0 * cheb_t(d, z)) ** (1.0 / d))


def exp_cheb_tail(d: int, terms: int = 60) -> float:
    """Upper bound on the minimax error of e^x on [-1, 1] at degree d via the
    Chebyshev series tail: sum of |2 I_k(1)| for k > d."""
    from scipy.special import iv

    ks = np.arange(d + 1, d + 1 + terms)
    return float(np.sum(2.0 * iv(ks, 1.0)))


def subset_products_ok(t, s, R: float, r: float, C: np.ndarray) -> bool:
    """Check every subset-product difference against its C_k bound."""
    t = np.asarray(t, dtype=complex)
    s = np.asarray(s, dtype=complex)
    n = t.size
    for k in range(1, n + 1):
        for idx in itertools.combinations(range(n), k):
            pt = np.prod(t[list(idx)])
            ps = np.prod(s[list(idx)])
            if abs(pt - ps) > C[k - 1] * r * (1.0 + 1e-12) + 1e-15:
                return False
    return True
