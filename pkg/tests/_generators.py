"""Randomized instance generators for the property suites.

Everything is seeded and exact: random strictly-unital dg algebras are
finite graded-commutative monomial algebras (all generators nilpotent, so
the basis is finite) materialized into structure-constant tables, with a
rejection-sampled differential; twisted objects get upper-triangular
connections; deformations are built from central closed elements and
derivations, rejection-sampled against the Maurer-Cartan equation.
"""

import itertools
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from curvedalg.hochschild import (Cochain, EvalContext, arity0_component,
                                  basis_component, structure_from_quiver,
                                  table_component, verify_structure,
                                  Unverified)
from curvedalg.quiver import FreeObject, HomElement, MonomialQuiver, TableQuiver
from curvedalg.scalars import QQ
from curvedalg import twisted as tw


GENERATOR_MENU = [
    [("a", 1, 2)],
    [("a", 1, 2), ("b", 2, 3)],
    [("a", 2, 3)],
    [("a", 2, 2), ("c", 3, 2)],
    [("a", 1, 2), ("c", 3, 2)],
    [("a", 2, 4)],
]


def _monomial_basis(gens):
    ranges = [range(cap) for (_, _, cap) in gens]
    return [key for key in itertools.product(*ranges)]


def random_dg_table_algebra(rng, precision, arity_bound=4):
    """A random strictly unital dg algebra as an explicit TableQuiver.

    Returns a verified CurvedStructure.  The underlying graded-commutative
    monomial product guarantees associativity; the differential is a
    random degree-1 derivation with d(generators) hitting basis elements,
    rejection-sampled until d^2 = 0 (checked by the full verifier).
    """
    while True:
        gens = rng.choice(GENERATOR_MENU)
        mon = MonomialQuiver([(n, d, cap, False) for (n, d, cap) in gens])
        keys = _monomial_basis(gens)
        degrees = {key: mon._degree(key) for key in keys}
        window = (min(degrees.values()) - 1,
                  2 * max(max(degrees.values()), 1) + 2)

        # random derivation on generators: d(g) = coeff * basis key
        gen_values = []
        for idx, (name, degree, cap) in enumerate(gens):
            targets = [key for key in keys
                       if degrees[key] == degree + 1 and sum(key)]
            if targets and rng.random() < 0.7:
                coeff = rng.choice([1, -1, 2])
                gen_values.append((rng.choice(targets), coeff))
            else:
                gen_values.append(None)

        def derive_key(key):
            """Leibniz extension of the generator values, as [(coeff, key)]."""
            out = {}
            for i, e in enumerate(key):
                if not e or gen_values[i] is None:
                    continue
                val_key, val_coeff = gen_values[i]
                for hit in range(e):
                    left = [key[j] if j < i else 0 for j in range(len(key))]
                    left[i] = hit
                    right = [key[j] if j > i else 0 for j in range(len(key))]
                    right[i] = e - hit - 1
                    sign = -1 if mon._degree(tuple(left)) % 2 else 1
                    acc = [(sign * val_coeff, val_key)]
                    nxt = []
                    for s, k in acc:
                        for s2, k2 in mon.mul_basis(tuple(left), k):
                            nxt.append((s * s2, k2))
                    acc, nxt = nxt, []
                    for s, k in acc:
                        for s2, k2 in mon.mul_basis(k, tuple(right)):
                            nxt.append((s * s2, k2))
                    for s, k in nxt:
                        out[k] = out.get(k, 0) + s
            return [(c, k) for k, c in out.items() if c]

        morphisms = [("O", "O", key, degrees[key]) for key in keys]
        product = {}
        for k1 in keys:
            for k2 in keys:
                terms = [(s, k) for (s, k) in mon.mul_basis(k1, k2)]
                product[(k1, k2)] = terms
        differential = {key: derive_key(key) for key in keys}
        differential = {k: v for k, v in differential.items() if v}
        quiver = TableQuiver(["O"], morphisms, window, product, differential)
        ctx = EvalContext(quiver, QQ, precision, arity_bound, window)
        mu = structure_from_quiver(ctx)
        unit = quiver.basis_element(quiver.mor(mon.unit_key), ctx.scalar(1))
        try:
            return verify_structure(mu, units={"O": unit})
        except Unverified:
            continue


def element(ctx, key, coeff=1):
    quiver = ctx.quiver
    mor = quiver.mor(key)
    return quiver.basis_element(mor, ctx.scalar(coeff))


def closed_central_degree2(structure):
    """Basis keys of degree 2 that are closed (graded-commutative algebras
    make even elements central)."""
    quiver = structure.quiver
    ctx = structure.ctx
    out = []
    for b in quiver.basis_in_window(ctx.window):
        if b.degree != 2:
            continue
        x = quiver.basis_element(b, ctx.scalar(1))
        if structure.cochain.evaluate((x,)).is_zero():
            out.append(b.key)
    return out


def random_deformation(rng, structure, max_order=3, want_arity1=None):
    """Random MC components: central closed curvature terms at random
    orders, optionally a degree-1 arity-1 table part, rejection-sampled
    against the Maurer-Cartan equation at working precision."""
    from curvedalg.hochschild import mc_check
    ctx = structure.ctx
    quiver = structure.quiver
    candidates = closed_central_degree2(structure)
    basis = list(quiver.basis_in_window(ctx.window))

    def merge(components, order, cochain):
        components[order] = components[order] + cochain \
            if order in components else cochain

    for _ in range(40):
        components = {}
        n_orders = rng.randint(1, min(2, max_order))
        for order in rng.sample(range(1, max_order + 1), n_orders):
            if candidates and rng.random() < 0.85:
                key = rng.choice(candidates)
                coeff = rng.choice([1, -1, 2, "1/2"])
                merge(components, order, Cochain(ctx, 2, {
                    0: arity0_component(ctx, 2,
                                        {"O": element(ctx, key, coeff)})}))
        use_arity1 = rng.random() < 0.5 if want_arity1 is None else want_arity1
        if use_arity1:
            table = {}
            for b in basis:
                outs = quiver.basis("O", "O", b.degree + 1)
                if outs and rng.random() < 0.5:
                    table[(b.key,)] = element(ctx, rng.choice(outs).key,
                                              rng.choice([1, -1]))
            if table:
                merge(components, rng.randint(1, max_order),
                      Cochain(ctx, 2, {1: table_component(ctx, 2, 1, table)}))
        if not components:
            continue
        ok, _ = mc_check(structure, components, ctx.precision)
        if ok:
            return components
    return {}


def random_uncurved_object(rng, structure, max_summands=2):
    """A twisted object with an upper-triangular connection, uncurved over
    the undeformed base."""
    quiver = structure.quiver
    ctx = structure.ctx
    for _ in range(30):
        n = rng.randint(1, max_summands)
        shifts = [rng.choice([-1, 0, 1]) for _ in range(n)]
        free = FreeObject([("O", s) for s in shifts])
        entries = {}
        for j in range(n):
            for i in range(j + 1, n):
                degree = 1 + shifts[j] - shifts[i]
                options = [b for b in quiver.basis("O", "O", degree)]
                if options and rng.random() < 0.7:
                    entries[(j, i)] = quiver.basis_element(
                        rng.choice(options), ctx.scalar(rng.choice([1, -1])))
        M = tw.TwistedObject(free, entries)
        if tw.curvature(structure, M).t_coefficient(0).is_zero():
            return M
    return tw.TwistedObject(FreeObject([("O", 0)]), {})


def random_gauge(rng, structure, max_order=3):
    """Random t-nilpotent degree-1 (total) gauge components."""
    ctx = structure.ctx
    quiver = structure.quiver
    components = {}
    order = rng.randint(1, max_order)
    # arity-0 part: a degree-1 element, if the algebra has one
    degree1 = [b for b in quiver.basis_in_window(ctx.window)
               if b.degree == 1]
    comps = {}
    if degree1 and rng.random() < 0.7:
        b = rng.choice(degree1)
        comps[0] = arity0_component(
            ctx, 1, {"O": quiver.basis_element(
                b, ctx.scalar(rng.choice([1, -1, 2])))})
    # arity-1 part: random diagonal scaling (degree 0)
    table = {}
    for b in quiver.basis_in_window(ctx.window):
        if rng.random() < 0.4:
            table[(b.key,)] = quiver.basis_element(
                b, ctx.scalar(rng.choice([1, -1, "1/3"])))
    if table:
        comps[1] = table_component(ctx, 1, 1, table)
    if not comps:
        return {}
    components[order] = Cochain(ctx, 1, comps)
    return components
