import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tools"))

import fit_sign_rule as toys
from curvedalg import twisted as tw
from curvedalg.fixtures import uv_base, uv_deformation
from curvedalg.hochschild import CurvedStructure, assemble, dot
from curvedalg.quiver import FreeObject, MatrixHom
from curvedalg.scalars import NotDivisible


@pytest.fixture(scope="module")
def dg():
    return toys.build_toy_dg()


@pytest.fixture(scope="module")
def dg_def(dg):
    return toys.deform_toy(dg)


def el(ctx, key, degree, coeff=1):
    from curvedalg.quiver import HomElement
    return HomElement(ctx.quiver, "O", "O", degree, {key: ctx.scalar(coeff)})


# -- certificates -------------------------------------------------------------

def test_upper_triangular_certificate(dg):
    ctx = dg.ctx
    M = tw.TwistedObject(FreeObject([("O", 0), ("O", -1)]),
                         {(0, 1): el(ctx, "b", 2)})
    assert M.certificate.kind == "upper_triangular"
    assert M.certificate.order == 2


def test_zero_connection_certificate(dg):
    M = tw.TwistedObject(FreeObject([("O", 0)]), {})
    assert M.certificate.kind == "upper_triangular"
    assert M.certificate.order == 1


def test_t_nilpotent_certificate(dg_def):
    # lower-left entry in t, upper-right constant: the entry graph has a
    # cycle but the constant part is acyclic
    ctx = dg_def.ctx
    M = tw.TwistedObject(
        FreeObject([("O", 0), ("O", -1)]),
        {(0, 1): el(ctx, "b", 2),
         (1, 0): el(ctx, "one", 0).scale(ctx.t_power(1, -1))})
    assert M.certificate.kind == "t_nilpotent"


def test_certificate_recheckable(dg):
    ctx = dg.ctx
    M = tw.TwistedObject(FreeObject([("O", 0), ("O", -1)]),
                         {(0, 1): el(ctx, "b", 2)})
    again = tw.certify(M.connection)
    assert again == M.certificate


# -- the induced structure ----------------------------------------------------

def test_embr_with_zero_connection_restricts_to_base(dg):
    ctx = dg.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {})
    eta = tw.embr(dg)
    a = MatrixHom(M, M, 1, {(0, 0): el(ctx, "a", 1)})
    # on zero-connection one-summand objects the induced operation is the
    # base one, matrix-packaged
    value = eta.evaluate((a,))
    assert value.entries[(0, 0)] == dg.cochain.evaluate((el(ctx, "a", 1),))


def test_embr_series_terminates_at_base_arity(dg):
    # the dg toy has arity <= 2: the embrace sum for one argument needs at
    # most one connection insertion on each side
    ctx = dg.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    eta = tw.embr(dg)
    assert eta.max_arity() == 2


def test_embr_composition_via_flatten(dg_def):
    # installing a connection in two stages agrees with the sum: the
    # one-summand nested object with outer entry psi flattens to delta+psi
    ctx = dg_def.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    psi_inner = MatrixHom(M, M, 1, {(0, 0): el(ctx, "a", 1, -2)})
    outer = tw.flatten(dg_def, [(M, 0)], {(0, 0): psi_inner})
    direct = tw.TwistedObject(FreeObject([("O", 0)]),
                              {(0, 0): el(ctx, "a", 1, -1)})
    assert outer.connection.entries == direct.connection.entries
    assert tw.curvature(dg_def, outer) == \
        tw.curvature(dg_def, direct).with_endpoints(outer, outer)


def test_induced_structure_squares_to_zero_on_samples(dg_def):
    ctx = dg_def.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    P = tw.direct_sum_twisted([M, tw.shift_twisted(M, -1)])
    eta = tw.embr(dg_def)
    square = dot(eta, eta)
    x = MatrixHom(P, P, 1, {(0, 0): el(ctx, "a", 1), (0, 1): el(ctx, "b", 2),
                            (1, 0): el(ctx, "one", 0),
                            (1, 1): el(ctx, "a", 1)})
    assert square.at_object(P).is_zero()
    assert square.evaluate((x,)).is_zero()
    assert square.evaluate((x, x)).is_zero()


def test_bianchi_identity(dg_def):
    # eta_1(c_M) = 0 for every twisted object
    ctx = dg_def.ctx
    for entries in ({}, {(0, 0): el(ctx, "a", 1)},
                    {(0, 1): el(ctx, "b", 2)}):
        free = FreeObject([("O", 0), ("O", -1)]) if (0, 1) in entries \
            else FreeObject([("O", 0)])
        M = tw.TwistedObject(free, entries)
        c = tw.curvature(dg_def, M)
        assert tw.eta_one(dg_def, c).is_zero()


# -- cones ---------------------------------------------------------------------

def test_cone_curvature_blocks(dg_def):
    ctx = dg_def.ctx
    N = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    M = tw.shift_twisted(N, -1)
    f = MatrixHom(M, N, 1, {(0, 0): el(ctx, "b", 2)})
    cone = tw.cone(dg_def, f)
    c = tw.curvature(dg_def, cone)
    cN = tw.curvature(dg_def, N)
    cM = tw.curvature(dg_def, M)
    eta1_f = tw.eta_one(dg_def, f)
    assert c.entries.get((0, 0)) == cN.entries.get((0, 0))
    assert c.entries.get((1, 1)) == cM.entries.get((0, 0))
    assert (1, 0) not in c.entries
    if (0, 0) in eta1_f.entries:
        assert c.entries.get((0, 1)) == eta1_f.entries[(0, 0)]


def test_two_sided_cone_with_zero_g_is_cone(dg_def):
    ctx = dg_def.ctx
    N = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    M = tw.shift_twisted(N, -1)
    f = MatrixHom(M, N, 1, {(0, 0): el(ctx, "b", 2)})
    g = MatrixHom(N, M, 1, {})
    cone2 = tw.two_sided_cone(dg_def, N, M, f, g)
    cone1 = tw.cone(dg_def, f)
    assert cone2.connection.entries == cone1.connection.entries
    assert tw.curvature(dg_def, cone2).entries == \
        tw.curvature(dg_def, cone1).entries


def test_two_sided_cone_zero_maps_is_direct_sum(dg_def):
    ctx = dg_def.ctx
    N = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    M = tw.shift_twisted(N, -1)
    zero_f = MatrixHom(M, N, 1, {})
    zero_g = MatrixHom(N, M, 1, {})
    both = tw.two_sided_cone(dg_def, N, M, zero_f, zero_g)
    c = tw.curvature(dg_def, both)
    cN = tw.curvature(dg_def, N)
    cM = tw.curvature(dg_def, M)
    assert c.entries.get((0, 0)) == cN.entries.get((0, 0))
    assert c.entries.get((1, 1)) == cM.entries.get((0, 0))
    assert (0, 1) not in c.entries and (1, 0) not in c.entries


# -- curvature removal ----------------------------------------------------------

def test_remove_curvature_checks_divisibility(dg_def):
    ctx = dg_def.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    wrong = MatrixHom(M, M, 2, {(0, 0): el(ctx, "b", 2)})
    with pytest.raises(NotDivisible):
        tw.remove_curvature(dg_def, M, ctx.t_power(1), wrong)


def test_remove_curvature_requires_units(dg_def):
    bare = CurvedStructure(dg_def.cochain, units={},
                           verified=True, window=dg_def.window,
                           arity_bound=dg_def.arity_bound)
    ctx = dg_def.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    c = tw.curvature(dg_def, M)
    with pytest.raises(tw.NotStrictlyUnital):
        tw.remove_curvature(bare, M, ctx.t_power(1),
                            tw.matrix_divide_by_t_exact(c))


def test_remove_curvature_with_r_one_always_uncurved(dg_def):
    ctx = dg_def.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    c = tw.curvature(dg_def, M)
    out = tw.remove_curvature(dg_def, M, ctx.scalar(1), c)
    assert tw.curvature(dg_def, out).is_zero()


def test_remove_curvature_sign_flip_option(dg_def):
    ctx = dg_def.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    c = tw.curvature(dg_def, M)
    c_over = tw.matrix_divide_by_t_exact(c)
    plain = tw.remove_curvature(dg_def, M, ctx.t_power(1), c_over)
    flipped = tw.remove_curvature(dg_def, M, ctx.t_power(1), c_over,
                                  sign_flip=True)
    assert flipped.connection.entries[(1, 0)] == \
        plain.connection.entries[(1, 0)].scale(-1)


def test_uv_removal_blocks_exactly():
    uv = uv_base(precision=1)
    struct = CurvedStructure(assemble(uv, uv_deformation(uv.ctx), 1),
                             uv.units, verified=True, window=uv.window,
                             arity_bound=uv.arity_bound)
    A = tw.zero_connection_object("A", name="A")
    c = tw.curvature(struct, A)
    removed = tw.remove_curvature(struct, A, struct.ctx.t_power(1),
                                  tw.matrix_divide_by_t_exact(c))
    residual = tw.curvature(struct, removed)
    assert set(residual.entries) == {(0, 1)}
    assert str(residual.entries[(0, 1)]) == "t*v"
    # and it agrees with the arity-1 operation of the divided curvature
    eta1 = tw.eta_one(struct, tw.matrix_divide_by_t_exact(c))
    assert residual.entries[(0, 1)] == eta1.entries[(0, 0)]


# -- closed-morphism lifts -------------------------------------------------------

def test_lift_zero_morphism(dg_def):
    ctx = dg_def.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    N = tw.shift_twisted(M, -1)
    f = MatrixHom(M, N, 1, {})
    c_M = tw.curvature(dg_def, M)
    c_N = tw.curvature(dg_def, N)
    lifted = tw.lift_morphism(
        dg_def, f, ctx.t_power(1),
        tw.matrix_divide_by_t_exact(c_M),
        tw.matrix_divide_by_t_exact(c_N),
        MatrixHom(M, N, 2, {}))
    assert lifted["f_r"].is_zero()
    assert lifted["gamma"].is_zero()


def test_sigma_is_an_involution_up_to_sign(dg_def):
    ctx = dg_def.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    N = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    f = MatrixHom(M, N, 1, {(0, 0): el(ctx, "a", 1)})
    eta1_f = tw.eta_one(dg_def, f)
    one = ctx.scalar(1)
    c_M = tw.curvature(dg_def, M)
    lifted = tw.lift_morphism(dg_def, f, one, c_M, c_M, eta1_f)
    sigma = lifted["sigma"]
    # sigma is a permutation matrix with unit entries; the permutation
    # swaps the two middle blocks, so it is its own inverse
    positions = set(sigma.entries)
    assert len(positions) == len(sigma.target.free.summands)
    perm = {i: j for (j, i) in positions}
    assert sorted(perm) == sorted(perm.values())
    assert all(perm[perm[i]] == i for i in perm)
    # and the summand data match across the permutation
    src = sigma.source.free.summands
    tgt = sigma.target.free.summands
    assert all(src[i] == tgt[perm[i]] for i in perm)


def test_eta2_square_with_sigma(dg_def):
    # the inclusion of N_r into both cones commutes with sigma under the
    # induced composition
    ctx = dg_def.ctx
    M = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    N = tw.TwistedObject(FreeObject([("O", 0)]), {(0, 0): el(ctx, "a", 1)})
    f = MatrixHom(M, N, 1, {(0, 0): el(ctx, "a", 1)})
    eta1_f = tw.eta_one(dg_def, f)
    one = ctx.scalar(1)
    c_M = tw.curvature(dg_def, M)
    lifted = tw.lift_morphism(dg_def, f, one, c_M, c_M, eta1_f)
    sigma, cone_f_r, cone_of_f_r = (lifted["sigma"], lifted["cone_f_r"],
                                    lifted["cone_of_f_r"])
    N_r = lifted["N_r"]
    unit = dg_def.unit_element("O")
    incl = MatrixHom(N_r, cone_f_r, 0, {(0, 0): unit, (1, 1): unit})
    incl2 = MatrixHom(N_r, cone_of_f_r, 0, {(0, 0): unit, (2, 1): unit})
    eta = tw.embr(dg_def)
    composed = eta.evaluate((sigma, incl))
    assert composed.entries == incl2.entries


def test_r_gamma_vanishes_even_when_gamma_does_not():
    # found by exhaustive search over small connection/morphism menus on
    # the first-order example: a two-summand object whose connection
    # carries the order-one curvature entry, and a unit-block morphism
    uv = uv_base(precision=1)
    struct = CurvedStructure(assemble(uv, uv_deformation(uv.ctx), 1),
                             uv.units, verified=True, window=uv.window,
                             arity_bound=uv.arity_bound)
    ctx = struct.ctx
    quiver = ctx.quiver
    from curvedalg.quiver import HomElement
    eps_u = HomElement(quiver, "A", "A", 2, {(1, 0): ctx.t_power(1)})
    unit = struct.unit_element("A")
    M = tw.TwistedObject(FreeObject([("A", 0), ("A", -1)]),
                         {(0, 1): eps_u})
    f = MatrixHom(M, M, 1, {(1, 0): unit})
    eta1_f = tw.eta_one(struct, f)
    assert all(e.t_coefficient(0).is_zero() for e in eta1_f.entries.values())
    c_M = tw.curvature(struct, M)
    eps = ctx.t_power(1)
    lifted = tw.lift_morphism(struct, f, eps,
                              tw.matrix_divide_by_t_exact(c_M),
                              tw.matrix_divide_by_t_exact(c_M),
                              tw.matrix_divide_by_t_exact(eta1_f))
    gamma = lifted["gamma"]
    assert not gamma.is_zero()
    assert str(gamma.entries[(0, 0)]) == "t*v"
    r_gamma = gamma.map_entries(lambda e: e.scale(eps))
    assert r_gamma.is_zero()
