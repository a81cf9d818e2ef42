"""Built-in example algebras and their deformations.

Both are code-defined on the monomial backend (the file-based versions under
``fixtures/`` are parsed equivalents, kept separate so golden tests do not
depend on the parser):

* ``graded_field``: k[x, 1/x] with deg x = 2, zero differential.  The
  one-parameter family of deformations ``phi = x t^n`` is Maurer-Cartan at
  every order because the algebra is commutative.
* ``uv_algebra``: the free graded-commutative algebra on an even generator
  u (deg 2) and an odd square-zero generator v (deg 3), with the first
  order deformation given by curvature u and the derivation u -> v.  Its
  curvature cannot be removed over the dual numbers, and the deformation
  does not extend to second order.
"""

from __future__ import annotations

from . import hochschild
from .hochschild import (Cochain, EvalContext, arity0_component,
                         derivation_component, structure_from_quiver,
                         verify_structure)
from .quiver import HomElement, MonomialQuiver
from .scalars import QQ


def graded_field_quiver():
    return MonomialQuiver([("x", 2, None, True)])


def _monomial_element(ctx, exponents, coefficient=1):
    quiver = ctx.quiver
    key = tuple(exponents)
    return HomElement(quiver, quiver.OBJECT, quiver.OBJECT,
                      quiver._degree(key), {key: ctx.scalar(coefficient)})


def graded_field_base(precision, arity_bound=4, window=(-10, 10), field=QQ):
    """Verified strictly unital structure of k[x, 1/x]."""
    quiver = graded_field_quiver()
    ctx = EvalContext(quiver, field, precision, arity_bound, window)
    mu = structure_from_quiver(ctx)
    unit = _monomial_element(ctx, (0,))
    return verify_structure(mu, units={quiver.OBJECT: unit})


def graded_field_deformation(ctx, n):
    """The components dict of the deformation phi = x t^n (so mu gains
    the arity-0 term x t^(n+1))."""
    x = _monomial_element(ctx, (1,))
    comp = Cochain(ctx, 2, {0: arity0_component(ctx, 2, {ctx.quiver.OBJECT: x})})
    return {n + 1: comp}


def uv_quiver():
    return MonomialQuiver([("u", 2, None, False), ("v", 3, 2, False)])


def uv_base(precision, arity_bound=4, window=(-10, 10), field=QQ):
    """Verified strictly unital structure of the (u, v) algebra."""
    quiver = uv_quiver()
    ctx = EvalContext(quiver, field, precision, arity_bound, window)
    mu = structure_from_quiver(ctx)
    unit = _monomial_element(ctx, (0, 0))
    return verify_structure(mu, units={quiver.OBJECT: unit})


def uv_deformation(ctx):
    """First-order deformation: curvature u plus the derivation u -> v."""
    u = _monomial_element(ctx, (1, 0))
    v = _monomial_element(ctx, (0, 1))
    comps = {
        0: arity0_component(ctx, 2, {ctx.quiver.OBJECT: u}),
        1: derivation_component(ctx, [v, None], degree=1),
    }
    return {1: Cochain(ctx, 2, comps)}
