"""Twisted objects: connections, allowability certificates, the induced
structure on matrices, cones, curvature removal and closed-morphism lifts.

A twisted object is a finite free object ``(+) Sigma^{n_i} A_i`` together
with a degree-1 connection matrix.  A base cochain extends to matrices by
summing over index paths and evaluating on the entries; the suspension
bookkeeping for shifted summands enters through an explicit sign rule
(:class:`SignRule`), fixed once for the whole library and pinned
operationally by ``tests/test_sign_convention.py``: the extension is a
morphism for the brace calculus (so the induced structure squares to
zero), diagonal units stay strictly unital, and shifting preserves
uncurvedness.  In the pinned convention a shift leaves the connection
data unchanged; block forms that the loose-sign literature writes with a
negated lower-right block appear here with a plain one.

The induced structure on twisted objects is the embrace series
``mu + mu{delta} + mu{delta, delta} + ...``, a finite sum here: arities
are bounded and summand lists finite, so the convergence certificates of
the general theory degenerate to bookkeeping.  They are still computed: a
connection is certified upper-triangular (the entry graph is acyclic),
t-nilpotent (its constant term is acyclic and the remainder divisible by
t), or finite-trivial (the universal desk-scale fallback).
"""

from __future__ import annotations

from typing import NamedTuple

from .hochschild import Cochain, CurvedStructure, EvalContext, HochschildError
from .quiver import FreeObject, MatrixHom
from .scalars import NotDivisible


class TwistedError(HochschildError):
    pass


class CertificateFailed(TwistedError):
    pass


class NotStrictlyUnital(TwistedError):
    pass


class Curved(TwistedError):
    pass


# ---------------------------------------------------------------------------
# the suspension sign rule


class SignRule(NamedTuple):
    """Exponent coefficients for the path sign of a matrix evaluation.

    For a path through summands with shifts ``n_0, ..., n_p`` (target row
    first) and arguments of matrix-level shifted degree ``d_1, ..., d_p``,
    write ``Delta_k = n_{k-1} - n_k`` (the k-th entry's shift offset) and
    ``s_k = d_k + Delta_k`` (its shifted degree inside the base quiver).
    The sign is ``(-1)**e`` with ``e`` the chosen combination of:

        cross_d_suffix   sum_k Delta_k * (d_{k+1} + ... + d_p)
        cross_d_prefix   sum_k Delta_k * (d_1 + ... + d_{k-1})
        cross_a_suffix   sum_k Delta_k * (s_{k+1} + ... + s_p)
        cross_a_prefix   sum_k Delta_k * (s_1 + ... + s_{k-1})
        edge_q1          sum_k C(Delta_k, 2)
        edge_q2          sum_k C(Delta_k + 1, 2)
        span_q           C(n_0 - n_p, 2)
        self_dd          sum_k Delta_k * d_k
        lin_span         n_0 - n_p
        head_span        n_0 * (n_0 - n_p)
        tail_span        n_p * (n_0 - n_p)
        tgt_d            sum_k n_{k-1} * d_k
        head_dsum        n_0 * (d_1 + ... + d_p)

    The rule is determined (up to observational equivalence) by requiring
    the shift-decorated structure to verify; see tools/fit_decorated.py.
    """

    cross_d_suffix: int = 0
    cross_d_prefix: int = 0
    cross_a_suffix: int = 0
    cross_a_prefix: int = 0
    edge_q1: int = 0
    edge_q2: int = 0
    span_q: int = 0
    self_dd: int = 0
    lin_span: int = 0
    head_span: int = 0
    tail_span: int = 0
    tgt_d: int = 0
    head_dsum: int = 0


# Frozen: the unique-up-to-equivalence solution of the decorated-structure
# equations (tools/fit_decorated.py) that also survives the construction
# battery (tools/fit_sign_rule.py): each entry's shift offset crosses the
# matrix-level shifted degrees of the later entries, exactly the Koszul
# cost of commuting its line factor out of the evaluation.
SIGN_RULE = SignRule(cross_d_suffix=1)

# connection data of Sigma^n M is (SHIFT_SIGN)^n * delta_M;  +1 is forced:
# in this convention the evaluation signs absorb the classical flip of the
# differential under shift, so connections are carried over unchanged
SHIFT_SIGN = 1

# nested flattening: sign multiplier exponent for an outer entry between
# blocks of outer shifts (n_target, n_source); 0 means none
FLATTEN_OUTER_MODE = 0

# lower-right block of a lifted morphism f_r
FR_SIGN = 1


def _sign_exponent(rule, D, shifts, sdegs):
    p = len(sdegs)
    deltas = [shifts[k] - shifts[k + 1] for k in range(p)]
    entry = [sdegs[k] + deltas[k] for k in range(p)]
    total = 0
    if rule.cross_d_suffix:
        total += sum(deltas[k] * sum(sdegs[k + 1:]) for k in range(p))
    if rule.cross_d_prefix:
        total += sum(deltas[k] * sum(sdegs[:k]) for k in range(p))
    if rule.cross_a_suffix:
        total += sum(deltas[k] * sum(entry[k + 1:]) for k in range(p))
    if rule.cross_a_prefix:
        total += sum(deltas[k] * sum(entry[:k]) for k in range(p))
    if rule.edge_q1:
        total += sum((d * (d - 1)) // 2 for d in deltas)
    if rule.edge_q2:
        total += sum((d * (d + 1)) // 2 for d in deltas)
    if rule.span_q:
        span = shifts[0] - shifts[-1]
        total += (span * (span - 1)) // 2
    if rule.self_dd:
        total += sum(deltas[k] * sdegs[k] for k in range(p))
    if rule.lin_span:
        total += shifts[0] - shifts[-1]
    if rule.head_span:
        total += shifts[0] * (shifts[0] - shifts[-1])
    if rule.tail_span:
        total += shifts[-1] * (shifts[0] - shifts[-1])
    if rule.tgt_d:
        total += sum(shifts[k] * sdegs[k] for k in range(p))
    if rule.head_dsum:
        total += shifts[0] * sum(sdegs)
    return total


def _summands(obj):
    return obj.free.summands if isinstance(obj, TwistedObject) else obj.summands


def matrix_eval(cochain, args, at_object=None, rule=None):
    """Extend a cochain to matrix arguments by signed path sums.

    ``args`` are matrix homs (between free or twisted objects); the arity-0
    case takes ``at_object`` instead.  The entries along an index path are
    fed to the cochain and the result lands at (first row, last column),
    multiplied by the path sign of the frozen :class:`SignRule`.
    """
    rule = rule or SIGN_RULE
    p = len(args)
    D = cochain.sdeg
    if p == 0:
        entries = {}
        for i, (obj, shift) in enumerate(_summands(at_object)):
            value = cochain.at_object(obj)
            if value.is_zero():
                continue
            if _sign_exponent(rule, D, [shift], []) % 2:
                value = value.scale(-1)
            entries[(i, i)] = value
        return MatrixHom(at_object, at_object, cochain.degree, entries)

    target, source = args[0].target, args[-1].source
    for a, b in zip(args, args[1:]):
        if _summands(a.source) != _summands(b.target):
            raise TwistedError("matrix arguments are not composable")
    out_degree = cochain.degree - p + sum(a.degree for a in args)
    sdegs = [a.degree - 1 for a in args]
    node_shifts = [[s for _, s in _summands(args[0].target)]]
    node_shifts += [[s for _, s in _summands(a.source)] for a in args]
    entries = {}

    def walk(k, row0, row, chain, shifts):
        if k == p:
            value = cochain.evaluate(tuple(chain))
            if value.is_zero():
                return
            if _sign_exponent(rule, D, shifts, sdegs) % 2:
                value = value.scale(-1)
            pos = (row0, row)
            entries[pos] = entries[pos] + value if pos in entries else value
            return
        for (j, i), e in args[k].entries.items():
            if j != row:
                continue
            walk(k + 1, row0, i, chain + [e],
                 shifts + [node_shifts[k + 1][i]])

    for (j, i), e in args[0].entries.items():
        walk(1, j, i, [e], [node_shifts[0][j], node_shifts[1][i]])
    return MatrixHom(source=source, target=target, degree=out_degree,
                     entries={pos: e for pos, e in entries.items()
                              if not e.is_zero()})


# ---------------------------------------------------------------------------
# certificates and twisted objects


class AllowabilityCertificate(NamedTuple):
    kind: str            # "upper_triangular" | "t_nilpotent" | "finite_trivial"
    order: int | None    # path-length bound for triangular certificates
    detail: str

    def __str__(self):
        if self.order is not None:
            return "%s(m0=%d)" % (self.kind, self.order)
        return self.kind


def _triangular_order(n_summands, positions):
    """Longest-path bound if the entry graph is acyclic, else None."""
    edges = {}
    for (j, i) in positions:
        edges.setdefault(i, set()).add(j)
    depth = {}
    state = {}

    def longest(v):
        if v in depth:
            return depth[v]
        if state.get(v) == "open":
            return None
        state[v] = "open"
        best = 0
        for w in edges.get(v, ()):
            sub = longest(w)
            if sub is None:
                return None
            best = max(best, 1 + sub)
        state[v] = "done"
        depth[v] = best
        return best

    out = 0
    for v in range(n_summands):
        sub = longest(v)
        if sub is None:
            return None
        out = max(out, sub)
    return out + 1


def certify(connection):
    """Strongest applicable allowability certificate for a connection."""
    n = len(_summands(connection.source))
    order = _triangular_order(n, connection.entries.keys())
    if order is not None:
        return AllowabilityCertificate("upper_triangular", order,
                                       "entry graph is acyclic")
    constant = [pos for pos, e in connection.entries.items()
                if not e.t_coefficient(0).is_zero()]
    order = _triangular_order(n, constant)
    if order is not None:
        return AllowabilityCertificate(
            "t_nilpotent", order,
            "constant term acyclic, remainder divisible by t")
    return AllowabilityCertificate(
        "finite_trivial", None,
        "finite summand list with bounded structure arity")


class TwistedObject:
    """A free object with a certified degree-1 connection."""

    def __init__(self, free, connection_entries, name=None):
        self.free = free
        conn = MatrixHom(free, free, 1, connection_entries)
        ok, diags = conn.validate()
        if not ok:
            raise TwistedError("invalid connection: " + "; ".join(diags))
        self.connection = conn.with_endpoints(self, self)
        self.certificate = certify(self.connection)
        self.name = name

    @property
    def summands(self):
        return self.free.summands

    def __repr__(self):
        return self.name or "Tw(%r)" % (self.free,)


def twist(free, entries, name=None):
    return TwistedObject(free, entries, name=name)


def zero_connection_object(obj, shift=0, name=None):
    return TwistedObject(FreeObject.single(obj, shift), {}, name=name)


# ---------------------------------------------------------------------------
# the induced structure


class _TwQuiverAdapter:
    """Just enough quiver surface for cochains whose elements are matrices."""

    def __init__(self, base_quiver):
        self.base_quiver = base_quiver
        self.objects = ()

    def zero_element(self, source, target, degree):
        return MatrixHom.zero(source, target, degree)


def twisted_context(ctx):
    return EvalContext(_TwQuiverAdapter(ctx.quiver), ctx.field, ctx.precision,
                       ctx.arity_bound, ctx.window)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def embr(structure, rule=None):
    """The induced structure cochain on twisted objects over ``structure``.

    Component p evaluates the finite sum over all interleavings of the seam
    objects' connections between the arguments.
    """
    rule = rule or SIGN_RULE
    mu = structure.cochain
    ctx = twisted_context(structure.ctx)
    top = mu.max_arity()

    def comp0(obj):
        delta = obj.connection
        total = matrix_eval(mu, (), at_object=obj, rule=rule)
        for r in range(1, top + 1):
            total = total + matrix_eval(mu, (delta,) * r, rule=rule)
        return total

    def component(p):
        def fn(args):
            seams = [args[0].target] + [a.source for a in args]
            out_degree = 2 - p + sum(a.degree for a in args)
            total = MatrixHom.zero(args[-1].source, args[0].target,
                                   out_degree)
            for extra in range(0, top - p + 1):
                for rs in _compositions(extra, p + 1):
                    seq = []
                    for k in range(p):
                        seq.extend([seams[k].connection] * rs[k])
                        seq.append(args[k])
                    seq.extend([seams[p].connection] * rs[p])
                    total = total + matrix_eval(mu, tuple(seq), rule=rule)
            return total
        return fn

    comps = {0: comp0}
    for p in range(1, top + 1):
        comps[p] = component(p)
    return Cochain(ctx, 2, comps, label="embr")


class TwistedStructure(CurvedStructure):
    """The induced structure as a curved structure on twisted objects
    (units are the diagonal unit matrices)."""

    def __init__(self, base_structure, rule=None):
        super().__init__(embr(base_structure, rule), units=None,
                         verified=base_structure.verified,
                         window=base_structure.window,
                         arity_bound=base_structure.arity_bound)
        self.base = base_structure

    def unit_element(self, obj):
        return unit_matrix(self.base, obj)

    @property
    def strictly_unital(self):
        return self.base.strictly_unital


def unit_matrix(structure, obj):
    entries = {}
    for i, (a, _) in enumerate(_summands(obj)):
        if isinstance(a, TwistedObject):
            entries[(i, i)] = unit_matrix(structure, a)
        else:
            entries[(i, i)] = structure.unit_element(a)
    return MatrixHom(obj, obj, 0, entries)


def curvature(structure, obj, rule=None):
    """The arity-0 value of the induced structure at a twisted object."""
    return embr(structure, rule).at_object(obj)


def eta_one(structure, f, rule=None):
    """The arity-1 induced operation on a hom between twisted objects."""
    return embr(structure, rule).evaluate((f,))


def eta(structure, args, rule=None):
    return embr(structure, rule).evaluate(tuple(args))


# ---------------------------------------------------------------------------
# constructions


def shift_twisted(obj, n, name=None):
    """Sigma^n of a twisted object: shift the summands, multiply the
    connection by SHIFT_SIGN^n."""
    entries = dict(obj.connection.entries)
    if SHIFT_SIGN == -1 and n % 2:
        entries = {pos: e.scale(-1) for pos, e in entries.items()}
    return TwistedObject(obj.free.shift(n), entries, name=name)


def direct_sum_twisted(objs, name=None):
    summands = []
    entries = {}
    offset = 0
    for obj in objs:
        summands.extend(obj.free.summands)
        for (j, i), e in obj.connection.entries.items():
            entries[(offset + j, offset + i)] = e
        offset += len(obj.free.summands)
    return TwistedObject(FreeObject(summands), entries, name=name)


def flatten(structure, outer_summands, outer_entries=None, name=None):
    """Flatten a free object of twisted objects into one twisted object.

    ``outer_summands``: list of (TwistedObject, outer shift);
    ``outer_entries``: dict (u_target, u_source) -> MatrixHom between the
    corresponding inner objects, the blocks of a degree-1 outer connection.
    Inner connections are installed block-diagonally with the sign
    SHIFT_SIGN^(outer shift); the flattened connection's certificate is
    recomputed from scratch.
    """
    flat = []
    offsets = []
    for inner, n in outer_summands:
        offsets.append(len(flat))
        for (a, m) in inner.free.summands:
            flat.append((a, m + n))
    entries = {}
    for u, (inner, n) in enumerate(outer_summands):
        flip = (SHIFT_SIGN == -1 and n % 2)
        for (j, i), e in inner.connection.entries.items():
            entries[(offsets[u] + j, offsets[u] + i)] = \
                e.scale(-1) if flip else e
    for (u2, u1), block in (outer_entries or {}).items():
        n2 = outer_summands[u2][1]
        n1 = outer_summands[u1][1]
        flip = False
        if FLATTEN_OUTER_MODE == 1:
            flip = bool(n1 % 2)
        elif FLATTEN_OUTER_MODE == 2:
            flip = bool(n2 % 2)
        elif FLATTEN_OUTER_MODE == 3:
            flip = bool((n1 + n2) % 2)
        for (j, i), e in block.entries.items():
            pos = (offsets[u2] + j, offsets[u1] + i)
            val = e.scale(-1) if flip else e
            entries[pos] = entries[pos] + val if pos in entries else val
    return TwistedObject(FreeObject(flat), entries, name=name)


def cone(structure, f, name=None):
    """The cone on f: M -> N of degree 1: the object N (+) M with
    connection [[delta_N, f], [0, delta_M]].

    Its curvature is [[c_N, eta_1(f)], [0, c_M]].
    """
    if f.degree != 1:
        raise TwistedError("cone needs a degree-1 morphism")
    return flatten(structure, [(f.target, 0), (f.source, 0)],
                   {(0, 1): f}, name=name or "cone")


def two_sided_cone(structure, M, N, f, g, name=None, strict=False):
    """M (+) N with connection [[delta_M, f], [g, delta_N]], where
    f: N -> M and g: M -> N both have degree 1.

    With ``strict`` the off-diagonal datum must satisfy one of the
    sufficient allowability criteria (triangular certificate, g divisible
    by t, or a strictly unital base killing long g-strings); otherwise the
    finite-trivial fallback is accepted.
    """
    if f.degree != 1 or g.degree != 1:
        raise TwistedError("two-sided cone needs degree-1 morphisms")
    if _summands(f.source) != N.free.summands \
            or _summands(f.target) != M.free.summands:
        raise TwistedError("f must map N -> M")
    if _summands(g.source) != M.free.summands \
            or _summands(g.target) != N.free.summands:
        raise TwistedError("g must map M -> N")
    out = flatten(structure, [(M, 0), (N, 0)], {(0, 1): f, (1, 0): g},
                  name=name or "cone2")
    if strict and out.certificate.kind == "finite_trivial":
        g_in_t = all(e.t_coefficient(0).is_zero() for e in g.entries.values())
        if not (g_in_t or structure.strictly_unital):
            raise CertificateFailed(
                "two-sided cone needs g in t*Hom, strict units, or a "
                "triangular certificate")
    return out


def matrix_divide_by_t(m):
    """Entrywise division by t; consumes one order of precision."""
    return m.map_entries(lambda e: e.map_scalars(lambda s: s.divide_by_t()))


def matrix_divide_by_t_exact(m):
    """Entrywise division by t in the exact ring k[t]/t^(P+1); the top
    coefficient of the quotient is chosen zero."""
    return m.map_entries(
        lambda e: e.map_scalars(lambda s: s.divide_by_t_exact()))


def remove_curvature(structure, M, r, c_over_r, sign_flip=False, name=None):
    """The curvature-removal object M_r on M (+) Sigma^{-1} M.

    ``c_over_r`` must satisfy r * c_over_r = c_M exactly at working
    precision.  The connection is

        [[delta_M, c_M/r], [-r 1_M, delta_M]]

    (``sign_flip`` negates the lower-left block).  The curvature of the
    result vanishes outside the upper-right block, which equals
    eta_1(c_M/r); it vanishes entirely whenever r is regular on the
    degree-3 endomorphisms of M, in particular always for r = 1.
    """
    if not structure.strictly_unital:
        raise NotStrictlyUnital("curvature removal needs strict units")
    c = curvature(structure, M)
    scaled = c_over_r.map_entries(lambda e: e.scale(r))
    if not (scaled - c.with_endpoints(c_over_r.source, c_over_r.target)) \
            .is_zero():
        raise NotDivisible("r * c_over_r differs from the curvature of M")
    Mm = shift_twisted(M, -1)
    f = MatrixHom(Mm, M, 1, c_over_r.entries)
    ok, diags = f.validate()
    if not ok:
        raise TwistedError("c/r does not fit the cone block: %s" % diags)
    minus_r = r if sign_flip else r.scale(-1)
    g_entries = {}
    for i, (a, _) in enumerate(M.free.summands):
        g_entries[(i, i)] = structure.unit_element(a).scale(minus_r)
    g = MatrixHom(M, Mm, 1, g_entries)
    return two_sided_cone(structure, M, Mm, f, g,
                          name=name or "(%r)_r" % (M,))


def lift_morphism(structure, f, r, c_src_over_r, c_tgt_over_r,
                  eta1_f_over_r, rule=None):
    """Lift f: M -> N (degree 1) to f_r: M_r -> N_r, with the middle-swap
    isomorphism sigma: cone(f_r) -> cone(f)_r and the obstruction entry.

    The divisions c_M/r, c_N/r and eta_1(f)/r are taken precomputed.
    Returns a dict with keys ``f_r``, ``M_r``, ``N_r``, ``cone_f_r``,
    ``cone_of_f_r``, ``sigma``, ``gamma``; gamma is the only possibly
    nonzero block of eta_1(f_r) and satisfies r * gamma = 0 identically.
    """
    M, N = f.source, f.target
    M_r = remove_curvature(structure, M, r, c_src_over_r)
    N_r = remove_curvature(structure, N, r, c_tgt_over_r)

    nM = len(M.free.summands)
    nN = len(N.free.summands)
    entries = {}
    for (j, i), e in f.entries.items():
        entries[(j, i)] = e
        entries[(nN + j, nM + i)] = e.scale(FR_SIGN) if FR_SIGN < 0 else e
    for (j, i), e in eta1_f_over_r.entries.items():
        entries[(j, nM + i)] = e
    f_r = MatrixHom(M_r, N_r, 1, entries)
    ok, diags = f_r.validate()
    if not ok:
        raise TwistedError("lifted morphism is malformed: %s" % diags)

    cone_f_r = cone(structure, f_r, name="cone(f_r)")
    cone_f = cone(structure, f, name="cone(f)")
    cone_entries = {}
    for (j, i), e in c_tgt_over_r.entries.items():
        cone_entries[(j, i)] = e
    for (j, i), e in c_src_over_r.entries.items():
        cone_entries[(nN + j, nN + i)] = e
    for (j, i), e in eta1_f_over_r.entries.items():
        cone_entries[(j, nN + i)] = e
    c_cone_over_r = MatrixHom(cone_f, cone_f, 2, cone_entries)
    cone_of_f_r = remove_curvature(structure, cone_f, r, c_cone_over_r,
                                   name="cone(f)_r")

    # sigma: (N, S^{-1}N, M, S^{-1}M) -> (N, M, S^{-1}N, S^{-1}M)
    unit = structure.unit_element
    sigma_entries = {}
    for j, (a, _) in enumerate(N.free.summands):
        sigma_entries[(j, j)] = unit(a)
        sigma_entries[(nN + nM + j, nN + j)] = unit(a)
    for j, (a, _) in enumerate(M.free.summands):
        sigma_entries[(nN + j, 2 * nN + j)] = unit(a)
        sigma_entries[(nN + nM + nN + j, 2 * nN + nM + j)] = unit(a)
    sigma = MatrixHom(cone_f_r, cone_of_f_r, 0, sigma_entries)
    ok, diags = sigma.validate()
    if not ok:
        raise TwistedError("sigma is malformed: %s" % diags)

    gamma = _gamma_entry(structure, f, c_src_over_r, c_tgt_over_r,
                         eta1_f_over_r, rule)
    return {"f_r": f_r, "M_r": M_r, "N_r": N_r, "cone_f_r": cone_f_r,
            "cone_of_f_r": cone_of_f_r, "sigma": sigma, "gamma": gamma}


def _gamma_entry(structure, f, c_src_over_r, c_tgt_over_r, eta1_f_over_r,
                 rule=None):
    """eta_1(eta_1(f)/r) + eta_2(c_N/r, f) + eta_2(f, c_M/r)."""
    e = embr(structure, rule)
    M, N = f.source, f.target
    total = e.evaluate((eta1_f_over_r.with_endpoints(M, N),))
    total = total + e.evaluate((c_tgt_over_r.with_endpoints(N, N), f))
    total = total + e.evaluate((f, c_src_over_r.with_endpoints(M, M)))
    return total
