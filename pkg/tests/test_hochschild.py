import random
from fractions import Fraction

import pytest

from curvedalg.fixtures import (graded_field_base, graded_field_deformation,
                                uv_base, uv_deformation)
from curvedalg.hochschild import (ArityBound, Cochain, EvalContext,
                                  Unverified, arity0_component, assemble,
                                  basis_component, brace, bracket, dot,
                                  extension_search, gauge_transform,
                                  mc_check, mc_residual_half_bracket,
                                  structure_from_quiver, table_component,
                                  verify_structure, GaugeNotNilpotent)
from curvedalg.quiver import HomElement, TableQuiver
from curvedalg.scalars import QQ


def gf(precision=2, **kw):
    return graded_field_base(precision=precision, **kw)


def x_power(ctx, k, coeff=1):
    q = ctx.quiver
    return HomElement(q, "A", "A", 2 * k, {(k,): ctx.scalar(coeff)})


# -- braces -------------------------------------------------------------------

def test_brace_with_identity_cochain_counts_slots():
    base = gf()
    ctx = base.ctx
    # the 1-ary identity cochain has total degree 1 (shifted degree 0)
    ident = Cochain(ctx, 1, {1: lambda args: args[0]})
    mu = base.cochain
    braced = brace(mu, [ident])
    a, b = x_power(ctx, 1), x_power(ctx, 2)
    assert braced.evaluate((a, b)) == mu.evaluate((a, b)).scale(2)


def test_dot_of_structure_with_itself_vanishes():
    base = gf()
    assert dot(base.cochain, base.cochain).is_zero_on((-8, 8), 3)


def test_arity_bound_raised_eagerly():
    from curvedalg.fixtures import graded_field_quiver
    ctx = EvalContext(graded_field_quiver(), QQ, 2, arity_bound=2)
    mu = structure_from_quiver(ctx)
    with pytest.raises(ArityBound):
        dot(mu, mu)


def _random_cochain(rng, ctx, degree, max_arity=2):
    """Small random cochain supported on powers of x."""
    comps = {}
    if rng.random() < 0.6:
        comps[0] = arity0_component(
            ctx, degree,
            {"A": x_power(ctx, degree // 2, rng.choice([1, -1, 2]))}) \
            if degree % 2 == 0 else None
        if comps[0] is None:
            del comps[0]
    for arity in range(1, max_arity + 1):
        if rng.random() < 0.7:
            table = {}
            for k in range(-1, 2):
                out_degree = degree - arity + sum(2 * k for _ in range(arity))
                if out_degree % 2:
                    continue
                key = tuple((k,) for _ in range(arity))
                table[key] = x_power(ctx, out_degree // 2,
                                     rng.choice([1, -1]))
            if table:
                comps[arity] = table_component(ctx, degree, arity, table)
    return Cochain(ctx, degree, comps)


def test_pre_jacobi_symmetry_of_the_associator():
    # (phi.psi).chi - phi.(psi.chi) is symmetric in psi, chi up to the
    # Koszul sign of their shifted degrees
    rng = random.Random(7)
    base = gf(arity_bound=8, window=(-14, 14))
    ctx = base.ctx
    samples = [x_power(ctx, k) for k in (-1, 0, 1, 2)]
    for trial in range(6):
        dphi, dpsi, dchi = (rng.choice([1, 2, 3]) for _ in range(3))
        phi = _random_cochain(rng, ctx, dphi)
        psi = _random_cochain(rng, ctx, dpsi)
        chi = _random_cochain(rng, ctx, dchi)
        left = dot(dot(phi, psi), chi) - dot(phi, dot(psi, chi))
        right = dot(dot(phi, chi), psi) - dot(phi, dot(chi, psi))
        sign = -1 if ((dpsi - 1) * (dchi - 1)) % 2 else 1
        diff = left - right.scale(sign)
        for p in range(0, 4):
            if p == 0:
                assert diff.at_object("A").is_zero()
                continue
            for args in [tuple(samples[:p]), tuple(samples[1:p + 1])]:
                if len(args) == p:
                    assert diff.evaluate(args).is_zero()


def test_bracket_squares():
    rng = random.Random(11)
    base = gf(arity_bound=8, window=(-14, 14))
    ctx = base.ctx
    samples = [x_power(ctx, k) for k in (0, 1)]
    # odd shifted degree: [phi, phi] = 2 phi.phi; even: [phi, phi] = 0
    for degree, factor in ((2, 2), (3, 0)):
        phi = _random_cochain(rng, ctx, degree)
        br = bracket(phi, phi)
        dd = dot(phi, phi)
        diff = br - dd.scale(factor)
        assert diff.at_object("A").is_zero()
        assert diff.evaluate((samples[0],)).is_zero()
        assert diff.evaluate((samples[0], samples[1])).is_zero()


# -- verification -------------------------------------------------------------

def test_verify_reports_broken_associativity():
    # w * ww vs ww * w disagree after a perturbation: witness at (w, w, w)
    quiver = TableQuiver(
        ["O"],
        [("O", "O", "one", 0), ("O", "O", "w", 2), ("O", "O", "ww", 4),
         ("O", "O", "www", 6)],
        window=(-2, 14),
        product={("one", "one"): [(1, "one")], ("one", "w"): [(1, "w")],
                 ("w", "one"): [(1, "w")], ("one", "ww"): [(1, "ww")],
                 ("ww", "one"): [(1, "ww")], ("one", "www"): [(1, "www")],
                 ("www", "one"): [(1, "www")],
                 ("w", "w"): [(1, "ww")],
                 ("w", "ww"): [(2, "www")],   # perturbed
                 ("ww", "w"): [(1, "www")]})
    ctx = EvalContext(quiver, QQ, 1, 4, (-2, 14))
    mu = structure_from_quiver(ctx)
    with pytest.raises(Unverified) as err:
        verify_structure(mu)
    arity, mors, value = err.value.witness
    assert arity == 3
    assert [m.key for m in mors] == ["w", "w", "w"]


def test_verify_unit_axioms():
    base = gf()
    assert base.strictly_unital
    # a wrong unit is rejected
    ctx = base.ctx
    with pytest.raises(Unverified):
        verify_structure(base.cochain, units={"A": x_power(ctx, 1)})


def test_uv_structure_and_units():
    base = uv_base(precision=1)
    assert base.verified and base.strictly_unital


# -- Maurer-Cartan ------------------------------------------------------------

def test_mc_zero_deformation():
    base = gf()
    ok, residual = mc_check(base, {}, 2)
    assert ok


def test_mc_graded_field_all_orders():
    base = gf(precision=6)
    for n in range(0, 6):
        comps = graded_field_deformation(base.ctx, n)
        ok, _ = mc_check(base, comps, 6)
        assert ok, n


def test_mc_uv_first_order_and_failure_at_second():
    base = uv_base(precision=2)
    comps = uv_deformation(base.ctx)
    ok, _ = mc_check(base, comps, 1)
    assert ok
    ok2, residual = mc_check(base, comps, 2)
    assert not ok2
    assert str(residual.t_coefficient(2).at_object("A")) == "v"


def test_dot_form_agrees_with_half_bracket_form():
    base = uv_base(precision=2)
    comps = uv_deformation(base.ctx)
    _, residual = mc_check(base, comps, 2)
    half = mc_residual_half_bracket(base, comps, 2)
    diff_sites = []
    ctx = base.ctx
    one = ctx.scalar(1)
    for p in (0, 1, 2):
        if p == 0:
            assert (residual.at_object("A")
                    == half.at_object("A"))
            continue
        for mors in ctx.quiver.composable_tuples(p, (-4, 6)):
            args = tuple(ctx.quiver.basis_element(m, one) for m in mors)
            assert residual.evaluate(args) == half.evaluate(args)


def test_curvature_of_dg_structure_is_zero():
    base = gf()
    from curvedalg.hochschild import curvature_of
    assert curvature_of(base, "A").is_zero()


def test_curvature_of_uv_deformation():
    base = uv_base(precision=1)
    comps = uv_deformation(base.ctx)
    mu = assemble(base, comps, 1)
    c = mu.at_object("A")
    assert str(c) == "t*u"


# -- gauge --------------------------------------------------------------------

def test_gauge_identity():
    base = gf(precision=3)
    comps = graded_field_deformation(base.ctx, 1)
    out = gauge_transform(base, comps, {}, 3)
    assert out.keys() == comps.keys()


def test_gauge_requires_nilpotence():
    base = gf(precision=3)
    comps = graded_field_deformation(base.ctx, 1)
    with pytest.raises(GaugeNotNilpotent):
        gauge_transform(base, comps, {0: comps[2]}, 3)


def test_gauge_zero_gauge_returns_components():
    base = gf(precision=3)
    comps = graded_field_deformation(base.ctx, 2)
    out = gauge_transform(base, comps, {}, 3)
    assert out is not comps and out == dict(comps)


def test_gauge_preserves_mc_on_graded_field():
    base = gf(precision=3, arity_bound=6, window=(-6, 6))
    ctx = base.ctx
    comps = graded_field_deformation(ctx, 1)
    # gauge by the arity-0 element x^? of degree 1: none exist (all degrees
    # even), so use an arity-1 scaling part instead
    table = {((1,),): x_power(ctx, 1, Fraction(1, 2))}
    g = {1: Cochain(ctx, 1, {1: table_component(ctx, 1, 1, table)})}
    out = gauge_transform(base, comps, g, 3)
    ok, _ = mc_check(base, out, 3)
    assert ok


def test_gauge_arity0_central_is_fixed():
    # with mu0 abelian at arity 0 and phi arity-0 central, ad_g acts
    # trivially: phi' = phi
    base = gf(precision=3, arity_bound=6, window=(-6, 6))
    ctx = base.ctx
    comps = graded_field_deformation(ctx, 1)
    table = {((1,),): x_power(ctx, 1, 1)}
    g = {1: Cochain(ctx, 1, {1: table_component(ctx, 1, 1, table)})}
    out = gauge_transform(base, comps, g, 3)
    ok, _ = mc_check(base, out, 3)
    assert ok


# -- extension search ---------------------------------------------------------

def test_extension_exists_for_graded_field():
    base = gf(precision=4, window=(-10, 10))
    comps = graded_field_deformation(base.ctx, 1)
    result = extension_search(base, comps, order=2, window=(-4, 6),
                              arity_bound=2)
    assert "extension" in result
    assert result["extension"].is_zero_on((-4, 6), 2)


def test_extension_trivial_deformation():
    base = gf(precision=3)
    result = extension_search(base, {}, order=1, window=(-4, 6),
                              arity_bound=2)
    assert "extension" in result


def test_obstruction_for_uv():
    base = uv_base(precision=2)
    comps = uv_deformation(base.ctx)
    result = extension_search(base, comps, order=1, window=(-2, 8),
                              arity_bound=2)
    ob = result["obstruction"]
    assert ob.order == 2
    assert str(ob.residual.at_object("A")) == "v"
    # the bracket-normalized witness is 2v
    psi = None
    for k, comp in comps.items():
        piece = comp.truncate(2).t_multiple(k)
        psi = piece if psi is None else psi + piece
    assert str(bracket(psi, psi).t_coefficient(2).at_object("A")) == "2*v"
