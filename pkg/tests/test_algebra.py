import numpy as np
import pytest

from hyperapprox.algebra import (
    Add,
    Const,
    Coord,
    Exp,
    Inv,
    Mul,
    Neg,
    PolyExpr,
    Polynomial,
    Pseudopolynomial,
    assembled_degree_bound,
    eval_fiber_poly,
    eval_poly,
    expr_from_json,
    expr_to_json,
    vieta_from_roots,
)
from hyperapprox.roots import match_roots, solve_monic


def test_eval_constant_one():
    p = Polynomial.constant(3, 1.0)
    assert eval_poly(p, [0.3, -1j, 2.0]) == 1.0


def test_eval_square():
    p = Polynomial.from_terms(1, [((2,), 1.0)])
    assert eval_poly(p, 2.0) == 4.0


def test_eval_root_by_construction():
    p = Polynomial.from_coeffs_1d([2.0, -3.0, 1.0])  # t^2 - 3t + 2
    assert abs(eval_poly(p, 1.0)) == 0.0


def test_eval_dimension_mismatch():
    p = Polynomial.coordinate(2, 0)
    with pytest.raises(ValueError):
        eval_poly(p, [1.0, 2.0, 3.0])


def test_zero_polynomial_degree_sentinel():
    assert Polynomial.zero(2).degree == -1
    assert Polynomial.constant(2, 5.0).degree == 0


def test_no_zero_terms_stored():
    p = Polynomial.from_terms(1, [((1,), 1.0), ((1,), -1.0), ((0,), 2.0)])
    assert p.terms == (((0,), 2.0 + 0j),)


def test_vieta_simple():
    np.testing.assert_allclose(vieta_from_roots([1, 2]), [-3, 2])


def test_vieta_empty():
    assert vieta_from_roots([]).size == 0


def test_vieta_permutation_invariant_exact():
    rng = np.random.default_rng(7)
    roots = rng.normal(size=5) + 1j * rng.normal(size=5)
    base = vieta_from_roots(roots)
    for perm in ([4, 2, 0, 1, 3], [1, 0, 3, 4, 2]):
        again = vieta_from_roots(roots[perm])
        assert np.array_equal(base, again)


def test_vieta_solver_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = rng.integers(1, 9)
        roots = (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)) * 5.0
        coeffs = vieta_from_roots(roots)
        solved = solve_monic(coeffs, tol=1e-12)
        assert match_roots(roots, solved.roots).bottleneck <= 1e-8


def test_product_of_linear_factors_eval():
    rng = np.random.default_rng(3)
    for _ in range(10):
        cs = rng.uniform(-10, 10, 4) + 1j * rng.uniform(-10, 10, 4)
        factors = [Polynomial.from_coeffs_1d([c, 1.0]) for c in cs]
        prod = factors[0]
        for f in factors[1:]:
            prod = prod * f
        x = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        direct = np.prod([f.evaluate(x) for f in factors])
        assert abs(prod.evaluate(x) - direct) <= 1e-12 * max(1.0, abs(direct))


def test_degree_bound_examples():
    assert assembled_degree_bound(5, 3) == 7
    assert 7 <= 2 * 5 - 1
    assert assembled_degree_bound(0, 1) == 1
    assert assembled_degree_bound(4, 4) == 7 == 2 * 4 - 1


def test_degree_bound_2d_minus_1_property():
    for n in range(1, 6):
        for d in range(n, 20):
            assert assembled_degree_bound(d, n) <= 2 * d - 1


def test_fiber_poly_exp_example():
    F = Pseudopolynomial(2, (Const(0.0), Neg(Exp(Coord(0)))))  # t^2 - e^x
    np.testing.assert_allclose(eval_fiber_poly(F, 0.0), [0.0, -1.0])


def test_fiber_poly_linear():
    F = Pseudopolynomial(1, (Const(0.0),))  # F = t
    np.testing.assert_allclose(eval_fiber_poly(F, 1.7), [0.0])


def test_fiber_poly_constant_coeffs():
    F = Pseudopolynomial(2, (Const(2.0), Const(1.0)))  # t^2 + 2t + 1
    np.testing.assert_allclose(eval_fiber_poly(F, 0.3), [2.0, 1.0])


def test_fiber_poly_reports_offending_index():
    # second coefficient has a pole at x = 0
    F = Pseudopolynomial(2, (Const(0.0), Inv(Coord(0))))
    with pytest.raises(ValueError, match="a_2"):
        eval_fiber_poly(F, 0.0)


def test_monic_invariant_enforced():
    with pytest.raises(ValueError):
        Pseudopolynomial(2, (Const(0.0),))
    with pytest.raises(ValueError):
        Pseudopolynomial(0, ())


def test_polynomial_json_round_trip():
    p = Polynomial.from_terms(2, [((1, 0), 2.0 + 1.0j), ((0, 3), -0.5)])
    again = Polynomial.from_json(p.to_json())
    assert again == p


def test_expression_json_round_trip():
    expr = Add((Mul((Const(3.0 - 1j), Coord(0))), Exp(Neg(Coord(1)))))
    again = expr_from_json(expr.to_json())
    pts = np.array([[0.3 + 0.1j, -0.2j]])
    np.testing.assert_allclose(again.eval_many(pts), expr.eval_many(pts))


def test_expression_json_rejects_unknown_op():
    with pytest.raises(ValueError, match="unknown expression op"):
        expr_from_json({"op": "tanh", "args": []})


def test_poly_expr_round_trip():
    p = Polynomial.from_coeffs_1d([1.0, 0.0, -2.0])
    node = expr_to_json(p)
    again = expr_from_json(node)
    assert isinstance(again, PolyExpr)
    assert again.poly == p
