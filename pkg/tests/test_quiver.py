import pytest

from curvedalg.hochschild import EvalContext
from curvedalg.quiver import (FreeObject, HomElement, MatrixHom,
                              MonomialQuiver, TableQuiver, WindowOverflow,
                              direct_sum)
from curvedalg.scalars import QQ, TruncScalar

from _generators import GENERATOR_MENU  # noqa: F401  (path side effect)
from curvedalg.fixtures import graded_field_quiver, uv_quiver


def scalar(v=1, p=1):
    return TruncScalar.constant(QQ, v, p)


# -- free object algebra -----------------------------------------------------

def test_shift_identity():
    A = FreeObject.single("A")
    assert A.shift(0) == A


def test_shift_moves_every_summand():
    M = FreeObject([("A", 0), ("A", -1)])
    assert M.shift(1) == FreeObject([("A", 1), ("A", 0)])


def test_shift_composition_and_empty_sum():
    M = FreeObject([("A", 2), ("B", -3)])
    assert M.shift(2).shift(-5) == M.shift(-3)
    assert direct_sum([M]) == M
    assert direct_sum([]) == FreeObject([])
    assert direct_sum([M, FreeObject([])]) == M


def test_direct_sum_is_the_formal_object_of_the_construction():
    A = FreeObject.single("A")
    At = direct_sum([A, A.shift(-1)])
    assert At == FreeObject([("A", 0), ("A", -1)])


# -- matrix validation -------------------------------------------------------

def _gf_ctx():
    return EvalContext(graded_field_quiver(), QQ, 2)


def test_identity_matrix_validates():
    ctx = _gf_ctx()
    q = ctx.quiver
    M = FreeObject([("A", 0), ("A", -1)])
    unit = lambda: HomElement(q, "A", "A", 0, {(0,): ctx.scalar(1)})
    m = MatrixHom(M, M, 0, {(0, 0): unit(), (1, 1): unit()})
    ok, diags = m.validate()
    assert ok, diags


def test_formal_connection_matrix_validates():
    # [[0, x t], [-t, 0]] on A (+) S^{-1}A has entry degrees 2 and 0
    ctx = _gf_ctx()
    q = ctx.quiver
    M = FreeObject([("A", 0), ("A", -1)])
    x_t = HomElement(q, "A", "A", 2, {(1,): ctx.t_power(1)})
    minus_t = HomElement(q, "A", "A", 0, {(0,): ctx.t_power(1, -1)})
    m = MatrixHom(M, M, 1, {(0, 1): x_t, (1, 0): minus_t})
    ok, diags = m.validate()
    assert ok, diags


def test_misplaced_degree_is_diagnosed():
    ctx = _gf_ctx()
    q = ctx.quiver
    M = FreeObject([("A", 0), ("A", -1)])
    x = HomElement(q, "A", "A", 2, {(1,): ctx.scalar(1)})
    m = MatrixHom(M, M, 1, {(0, 0): x})  # needs degree 1 + 0 - 0 = 1, not 2
    ok, diags = m.validate()
    assert not ok
    assert "degree 2" in diags[0] and "expected" in diags[0]


def test_matrix_addition_respects_degree_formula():
    ctx = _gf_ctx()
    q = ctx.quiver
    M = FreeObject([("A", 0), ("A", -1)])
    x_t = HomElement(q, "A", "A", 2, {(1,): ctx.t_power(1)})
    m = MatrixHom(M, M, 1, {(0, 1): x_t})
    s = m + m
    ok, _ = s.validate()
    assert ok
    assert s.entries[(0, 1)] == x_t + x_t


# -- monomial backend --------------------------------------------------------

def test_graded_field_basis_in_window():
    q = graded_field_quiver()
    keys = sorted(b.key for b in q.basis_in_window((-10, 10)))
    assert keys == [(k,) for k in range(-5, 6)]


def test_monomial_products():
    q = graded_field_quiver()
    assert q.mul_basis((2,), (-3,)) == [(1, (-1,))]
    uv = uv_quiver()
    assert uv.mul_basis((1, 0), (0, 1)) == [(1, (1, 1))]
    assert uv.mul_basis((0, 1), (0, 1)) == []  # odd square-zero generator
    assert uv.mul_basis((0, 1), (1, 1)) == []  # cap enforced


def test_supercommutation_sign():
    # two odd generators anticommute
    q = MonomialQuiver([("p", 1, 2, False), ("q", 3, 2, False)])
    assert q.mul_basis((0, 1), (1, 0)) == [(-1, (1, 1))]
    assert q.mul_basis((1, 0), (0, 1)) == [(1, (1, 1))]


def test_key_rendering():
    uv = uv_quiver()
    assert uv.key_str((2, 1)) == "u^2*v"
    assert uv.key_str((0, 0)) == "1"


# -- table backend -----------------------------------------------------------

def test_window_overflow():
    q = TableQuiver(["O"], [("O", "O", "hi", 9), ("O", "O", "lo", 8)],
                    window=(-10, 10))
    with pytest.raises(WindowOverflow):
        q.mul_basis("hi", "lo")


def test_absent_product_inside_window_is_zero():
    q = TableQuiver(["O"], [("O", "O", "a", 1)], window=(-10, 10))
    assert q.mul_basis("a", "a") == []


def test_composable_tuples_respect_endpoints():
    q = TableQuiver(["P", "Q"],
                    [("P", "Q", "f", 0), ("Q", "P", "g", 0),
                     ("P", "P", "e", 0)],
                    window=(-2, 2))
    tuples = set(tuple(b.key for b in t) for t in q.composable_tuples(2, (-2, 2)))
    assert ("f", "e") in tuples      # e: P -> P then f: P -> Q
    assert ("f", "g") in tuples      # g: Q -> P then f: P -> Q
    assert ("f", "f") not in tuples  # not composable
