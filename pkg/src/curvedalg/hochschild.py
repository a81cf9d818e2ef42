"""Hochschild cochains, braces, structure verification and Maurer-Cartan tools.

Conventions
-----------

Cochains are stored in the *shifted* (bar-side) normalization: a cochain of
total degree ``n`` has, for every arity ``p``, a component mapping
``p``-tuples of hom elements to a hom element; all Koszul signs are computed
from shifted degrees ``deg - 1`` of the arguments and ``n - 1`` of the
cochains.  Tuples are written target-to-source: in ``(x_1, ..., x_p)`` the
first entry is the last arrow, so a product component evaluates
``(x, y) -> x . y`` in composition order.

Classical data is encoded once, on input, with the standard suspension
twist: a graded product ``x . y`` becomes the arity-2 component
``(x, y) -> (-1)^{deg x} x . y``, differentials and derivation-style
arity-1 data are taken as-is, and arity-0 elements are taken as-is.  Under
this encoding ``mu . mu = 0`` holds exactly for associative graded algebras
with zero differential and ``d^2 = 0`` holds for dg algebras, which pins
the sign convention operationally; the unit laws read ``mu_2(1, x) = x``
and ``mu_2(x, 1) = (-1)^{deg x} x``.

Precision policy: every structure is built once at a fixed working
precision; derived computations may truncate downward but never extend,
except for coefficient-extracted (exact, constant) cochains.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .quiver import BasisMor, HomElement
from .scalars import TruncScalar


class HochschildError(Exception):
    pass


class ArityBound(HochschildError):
    """A brace evaluation could exceed the configured arity bound."""


class Unverified(HochschildError):
    """mu . mu = 0 or a unit axiom failed; carries the first witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class GaugeNotNilpotent(HochschildError):
    pass


class SearchUnbounded(HochschildError):
    pass


class EvalContext:
    """Shared evaluation context: quiver, ground field, bounds."""

    def __init__(self, quiver, field, precision, arity_bound=4,
                 window=(-10, 10)):
        self.quiver = quiver
        self.field = field
        self.precision = precision
        self.arity_bound = arity_bound
        self.window = tuple(window)

    def zero_element(self, source, target, degree):
        return self.quiver.zero_element(source, target, degree)

    def scalar(self, value):
        return TruncScalar.constant(self.field, value, self.precision)

    def t_power(self, k, coefficient=1):
        return TruncScalar.t_power(self.field, k, self.precision, coefficient)

    def at_precision(self, precision):
        return EvalContext(self.quiver, self.field, precision,
                           self.arity_bound, self.window)


def _shifted(degree):
    return degree - 1


class Cochain:
    """A bounded-arity Hochschild element.

    ``components[p]`` is a callable: for ``p == 0`` it maps an object to an
    endomorphism element of degree ``n``, for ``p >= 1`` it maps a
    composable tuple of hom elements to a hom element.  The key set is the
    declared arity support.
    """

    def __init__(self, ctx, degree, components, label=""):
        self.ctx = ctx
        self.degree = degree
        self.components = dict(components)
        self.label = label

    @property
    def sdeg(self):
        return _shifted(self.degree)

    @property
    def arities(self):
        return sorted(self.components)

    def max_arity(self):
        return max(self.components) if self.components else 0

    def at_object(self, obj):
        comp = self.components.get(0)
        if comp is None:
            return self.ctx.zero_element(obj, obj, self.degree)
        return comp(obj)

    def evaluate(self, args):
        args = tuple(args)
        p = len(args)
        if p == 0:
            raise HochschildError("use at_object for arity-0 evaluation")
        comp = self.components.get(p)
        if comp is None:
            degree = self.degree - p + sum(x.degree for x in args)
            return self.ctx.zero_element(args[-1].source, args[0].target,
                                         degree)
        return comp(args)

    def __add__(self, other):
        if self.degree != other.degree:
            raise HochschildError("cochain degrees differ")
        comps = {}
        for p in set(self.components) | set(other.components):
            a, b = self.components.get(p), other.components.get(p)
            if a is None:
                comps[p] = b
            elif b is None:
                comps[p] = a
            elif p == 0:
                comps[p] = (lambda f, g: lambda obj: f(obj) + g(obj))(a, b)
            else:
                comps[p] = (lambda f, g: lambda args: f(args) + g(args))(a, b)
        return Cochain(self.ctx, self.degree, comps)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        comps = {}
        for p, fn in self.components.items():
            if p == 0:
                comps[p] = (lambda f: lambda obj: f(obj).scale(c))(fn)
            else:
                comps[p] = (lambda f: lambda args: f(args).scale(c))(fn)
        return Cochain(self.ctx, self.degree, comps, self.label)

    def t_multiple(self, k):
        """Multiply all values by t^k (the deformation parameter)."""
        return self.scale(self.ctx.t_power(k))

    def map_values(self, fn, precision=None):
        ctx = self.ctx if precision is None else self.ctx.at_precision(precision)
        comps = {}
        for p, comp in self.components.items():
            if p == 0:
                comps[p] = (lambda f: lambda obj: fn(f(obj)))(comp)
            else:
                comps[p] = (lambda f: lambda args: fn(f(args)))(comp)
        return Cochain(ctx, self.degree, comps, self.label)

    def t_coefficient(self, k):
        """The exact k-cochain appearing as the t^k coefficient."""
        return self.map_values(lambda e: e.t_coefficient(k), precision=0)

    def truncate(self, precision):
        if precision == self.ctx.precision:
            return self
        if precision > self.ctx.precision:
            raise HochschildError("cannot raise cochain precision")
        return self.map_values(
            lambda e: e.map_scalars(lambda s: s.truncate(precision)),
            precision=precision)

    def extend_exact(self, precision):
        """Extend an exact (constant-coefficient) cochain to a precision."""
        return self.map_values(
            lambda e: e.map_scalars(lambda s: s.extend(precision)),
            precision=precision)

    def cached(self):
        """Memoize component evaluations (for deep derived towers).

        Sound for base-level cochains: keys are the arguments' full data.
        """
        comps = {}
        for p, fn in self.components.items():
            cache = {}
            if p == 0:
                def wrap0(f=fn, cache=cache):
                    def g(obj):
                        if obj not in cache:
                            cache[obj] = f(obj)
                        return cache[obj]
                    return g
                comps[p] = wrap0()
            else:
                def wrap(f=fn, cache=cache):
                    def g(args):
                        key = tuple(
                            (x.source, x.target, x.degree,
                             tuple(sorted(x.terms.items(), key=repr)))
                            for x in args)
                        if key not in cache:
                            cache[key] = f(args)
                        return cache[key]
                    return g
                comps[p] = wrap()
        return Cochain(self.ctx, self.degree, comps, self.label)

    def materialize(self, window=None, arity_bound=None):
        """Tabulate the components on the composable basis tuples inside a
        window (the extensional-table form; evaluations outside the window
        become zero, per the desk-scale windowing contract)."""
        ctx = self.ctx
        window = window or ctx.window
        arity_bound = ctx.arity_bound if arity_bound is None else arity_bound
        one = ctx.scalar(1)
        comps = {}
        for p in self.arities:
            if p == 0:
                table0 = {}
                for obj in ctx.quiver.objects:
                    v = self.at_object(obj)
                    if not v.is_zero():
                        table0[obj] = v
                if table0:
                    comps[0] = arity0_component(ctx, self.degree, table0)
                continue
            if p > arity_bound:
                continue
            table = {}
            for mors in ctx.quiver.composable_tuples(p, window):
                args = tuple(ctx.quiver.basis_element(m, one) for m in mors)
                v = self.evaluate(args)
                if not v.is_zero():
                    table[tuple(m.key for m in mors)] = v
            if table:
                comps[p] = table_component(ctx, self.degree, p, table)
        return Cochain(ctx, self.degree, comps, self.label)

    def first_nonzero(self, window=None, arity_bound=None):
        """First (arity, tuple-or-object, value) with nonzero value, or None."""
        window = window or self.ctx.window
        arity_bound = self.ctx.arity_bound if arity_bound is None \
            else arity_bound
        one = self.ctx.scalar(1)
        for p in self.arities:
            if p > arity_bound:
                continue
            if p == 0:
                for obj in self.ctx.quiver.objects:
                    v = self.at_object(obj)
                    if not v.is_zero():
                        return (0, obj, v)
                continue
            for mors in self.ctx.quiver.composable_tuples(p, window):
                args = tuple(self.ctx.quiver.basis_element(m, one)
                             for m in mors)
                v = self.evaluate(args)
                if not v.is_zero():
                    return (p, mors, v)
        return None

    def is_zero_on(self, window=None, arity_bound=None):
        return self.first_nonzero(window, arity_bound) is None


def zero_cochain(ctx, degree):
    return Cochain(ctx, degree, {})


def table_component(ctx, degree, arity, table):
    """Wrap an extensional table (tuple of basis keys -> HomElement).

    Evaluation extends multilinearly over the arguments' basis terms;
    missing tuples evaluate to zero.
    """

    def fn(args):
        degree_out = degree - arity + sum(x.degree for x in args)
        result = ctx.zero_element(args[-1].source, args[0].target, degree_out)
        for combo in itertools.product(*[list(x.terms.items()) for x in args]):
            value = table.get(tuple(k for k, _ in combo))
            if value is None or value.is_zero():
                continue
            coeff = combo[0][1]
            for _, c in combo[1:]:
                coeff = coeff * c
            result = result + value.scale(coeff)
        return result

    return fn


def basis_component(ctx, degree, arity, fn_basis):
    """Like table_component, but with a callable on basis-morphism tuples."""

    def fn(args):
        degree_out = degree - arity + sum(x.degree for x in args)
        result = ctx.zero_element(args[-1].source, args[0].target, degree_out)
        for combo in itertools.product(*[list(x.terms.items()) for x in args]):
            mors = tuple(BasisMor(x.source, x.target, k, x.degree)
                         for x, (k, _) in zip(args, combo))
            value = fn_basis(mors)
            if value is None or value.is_zero():
                continue
            coeff = combo[0][1]
            for _, c in combo[1:]:
                coeff = coeff * c
            result = result + value.scale(coeff)
        return result

    return fn


def arity0_component(ctx, degree, table):
    """Arity-0 component from a dict object -> HomElement."""
    data = dict(table)

    def fn(obj):
        if obj in data:
            return data[obj]
        return ctx.zero_element(obj, obj, degree)

    return fn


# ---------------------------------------------------------------------------
# braces


def brace(phi, psis):
    """The brace phi{psi_1, ..., psi_k}: sum over order-preserving insertions.

    Koszul rule: inserting psi_j past the raw arguments standing before its
    slot contributes (-1) to the power (shifted degree of psi_j) times (sum
    of shifted degrees of those arguments).
    """
    psis = list(psis)
    k = len(psis)
    if k == 0:
        return phi
    ctx = phi.ctx
    max_p = phi.max_arity() + sum(ps.max_arity() - 1 for ps in psis)
    if max_p > ctx.arity_bound:
        raise ArityBound("brace result may reach arity %d > bound %d"
                         % (max_p, ctx.arity_bound))
    degree = phi.degree + sum(_shifted(ps.degree) for ps in psis)

    def component(P):
        def fn(args, at_object=None):
            degree_out = degree - P + sum(x.degree for x in args)
            if P:
                result = ctx.zero_element(args[-1].source, args[0].target,
                                          degree_out)
            else:
                result = ctx.zero_element(at_object, at_object, degree_out)
            for inner in itertools.product(*[ps.arities for ps in psis]):
                p = P - sum(inner) + k
                if p < k or p not in phi.components:
                    continue
                for slots in itertools.combinations(range(p), k):
                    term = _insertion_term(phi, psis, inner, slots, p,
                                           args, at_object)
                    if term is not None:
                        result = result + term
            return result
        return fn

    arities = set()
    for inner in itertools.product(*[ps.arities for ps in psis]):
        for p in phi.arities:
            if p >= k:
                arities.add(p + sum(inner) - k)
    comps = {}
    for P in sorted(arities):
        fn = component(P)
        if P == 0:
            comps[0] = (lambda f: lambda obj: f((), at_object=obj))(fn)
        else:
            comps[P] = fn
    return Cochain(ctx, degree, comps)


def _insertion_term(phi, psis, inner, slots, p, args, at_object):
    """One insertion configuration of a brace evaluation (None if zero)."""
    slot_of = {s: j for j, s in enumerate(slots)}
    y = []
    raw_pos = 0          # raw arguments consumed so far
    prefix_sdeg = 0      # their total shifted degree
    boundary = args[0].target if args else at_object
    sign_exp = 0
    for s in range(p):
        j = slot_of.get(s)
        if j is None:
            if raw_pos >= len(args):
                return None
            x = args[raw_pos]
            raw_pos += 1
            prefix_sdeg += _shifted(x.degree)
            boundary = x.source
            y.append(x)
            continue
        q = inner[j]
        sign_exp += _shifted(psis[j].degree) * prefix_sdeg
        if q == 0:
            y.append(psis[j].at_object(boundary))
        else:
            if raw_pos + q > len(args):
                return None
            segment = args[raw_pos: raw_pos + q]
            y.append(psis[j].evaluate(segment))
            raw_pos += q
            prefix_sdeg += sum(_shifted(x.degree) for x in segment)
            boundary = segment[-1].source
    if raw_pos != len(args):
        return None
    if any(v.is_zero() for v in y):
        return None
    value = phi.evaluate(tuple(y))
    return value.scale(-1) if sign_exp % 2 else value


def dot(phi, psi):
    return brace(phi, [psi])


def bracket(phi, psi):
    """Graded commutator of dot products on shifted degrees."""
    first = dot(phi, psi)
    second = dot(psi, phi)
    if (_shifted(phi.degree) * _shifted(psi.degree)) % 2:
        return first + second
    return first - second


# ---------------------------------------------------------------------------
# structure encoding and verification


def structure_from_quiver(ctx, curvature=None, label="mu"):
    """The canonical degree-2 cochain of a backend's product/differential.

    ``curvature`` optionally maps objects to degree-2 endomorphism elements
    (the arity-0 part).  Products and differentials come from the backend
    (``mul_basis``/``diff_basis``), encoded with the suspension twist.
    """
    quiver = ctx.quiver

    def mul_fn(mors):
        b1, b2 = mors
        if b1.source != b2.target:
            return None
        terms = {}
        for coeff, key in quiver.mul_basis(b1.key, b2.key):
            c = ctx.scalar(coeff)
            terms[key] = terms[key] + c if key in terms else c
        value = HomElement(quiver, b2.source, b1.target,
                           b1.degree + b2.degree, terms)
        return value.scale(-1) if b1.degree % 2 else value

    def diff_fn(mors):
        (b,) = mors
        terms = {}
        for coeff, key in quiver.diff_basis(b.key):
            c = ctx.scalar(coeff)
            terms[key] = terms[key] + c if key in terms else c
        return HomElement(quiver, b.source, b.target, b.degree + 1, terms)

    comps = {
        1: basis_component(ctx, 2, 1, diff_fn),
        2: basis_component(ctx, 2, 2, mul_fn),
    }
    if curvature:
        comps[0] = arity0_component(ctx, 2, curvature)
    return Cochain(ctx, 2, comps, label=label)


def derivation_component(ctx, gen_values, degree):
    """A derivation on a monomial backend, extended by the graded Leibniz rule.

    ``gen_values[i]`` is the value on the i-th generator (HomElement or
    None); ``degree`` is the derivation's own degree.  Returns an arity-1
    cochain component for a total degree of ``degree + 1``.
    """
    quiver = ctx.quiver

    def on_key(key):
        obj = quiver.OBJECT
        out_degree = quiver._degree(key) + degree
        result = ctx.zero_element(obj, obj, out_degree)
        for i, e in enumerate(key):
            if not e or gen_values[i] is None or gen_values[i].is_zero():
                continue
            for hit in range(e):
                left_exp = [key[j] if j < i else 0 for j in range(len(key))]
                left_exp[i] = hit
                right_exp = [key[j] if j > i else 0 for j in range(len(key))]
                right_exp[i] = e - hit - 1
                sign = -1 if (degree % 2) and \
                    (quiver._degree(tuple(left_exp)) % 2) else 1
                term = _monomial_mul3(ctx, tuple(left_exp), gen_values[i],
                                      tuple(right_exp))
                if not term.is_zero():
                    result = result + term.scale(sign)
        return result

    return basis_component(ctx, degree + 1, 1,
                           lambda mors: on_key(mors[0].key))


def _monomial_mul3(ctx, left_key, middle, right_key):
    """left * middle * right around a hom element, monomial backend."""
    quiver = ctx.quiver
    obj = quiver.OBJECT
    out_deg = (quiver._degree(left_key) + middle.degree
               + quiver._degree(right_key))
    result = ctx.zero_element(obj, obj, out_deg)
    for mid_key, coeff in middle.terms.items():
        for s1, key1 in quiver.mul_basis(left_key, mid_key):
            for s2, key2 in quiver.mul_basis(key1, right_key):
                el = HomElement(quiver, obj, obj, out_deg,
                                {key2: coeff.scale(s1 * s2)})
                result = result + el
    return result


class CurvedStructure:
    """A verified degree-2 cochain, with optional strict units."""

    def __init__(self, cochain, units=None, verified=False,
                 window=None, arity_bound=None):
        self.cochain = cochain
        self.units = dict(units or {})
        self.verified = verified
        self.window = window
        self.arity_bound = arity_bound

    @property
    def ctx(self):
        return self.cochain.ctx

    @property
    def quiver(self):
        return self.cochain.ctx.quiver

    def unit_element(self, obj):
        if obj not in self.units:
            raise HochschildError("object %r has no strict unit" % (obj,))
        return self.units[obj]

    @property
    def strictly_unital(self):
        return set(self.units) == set(self.quiver.objects)

    def component_order(self, k):
        """The exact k-cochain mu^(k): t^k coefficient of the structure."""
        return self.cochain.t_coefficient(k)

    def truncate(self, precision):
        return CurvedStructure(
            self.cochain.truncate(precision),
            {obj: u.map_scalars(lambda s: s.truncate(precision))
             for obj, u in self.units.items()},
            self.verified, self.window, self.arity_bound)


def verify_structure(mu, units=None, window=None, arity_bound=None):
    """Check mu . mu = 0 on all composable basis tuples, plus unit axioms.

    Returns a :class:`CurvedStructure`; raises :class:`Unverified` carrying
    the first failing tuple as witness.
    """
    ctx = mu.ctx
    window = window or ctx.window
    arity_bound = ctx.arity_bound if arity_bound is None else arity_bound
    if mu.degree != 2:
        raise Unverified("structure cochain must have total degree 2")
    witness = dot(mu, mu).first_nonzero(window, arity_bound)
    if witness is not None:
        raise Unverified("mu.mu != 0 at arity %d on %r: %s" % witness,
                         witness=witness)
    units = dict(units or {})
    quiver = ctx.quiver
    one = ctx.scalar(1)
    for obj, unit in units.items():
        if not mu.evaluate((unit,)).is_zero():
            raise Unverified("unit of %r is not closed" % (obj,),
                             witness=(1, (obj,), mu.evaluate((unit,))))
        for b in quiver.basis_in_window(window):
            x = quiver.basis_element(b, one)
            if b.source == obj:
                left = mu.evaluate((x, unit))
                want = x.scale(-1) if b.degree % 2 else x
                if left != want:
                    raise Unverified("right unit law fails on %r" % (b,),
                                     witness=(2, (b, obj), left))
            if b.target == obj:
                if mu.evaluate((unit, x)) != x:
                    raise Unverified("left unit law fails on %r" % (b,),
                                     witness=(2, (obj, b),
                                              mu.evaluate((unit, x))))
        for p in range(3, min(arity_bound, mu.max_arity()) + 1):
            if p not in mu.components:
                continue
            for mors in quiver.composable_tuples(p - 1, window):
                args = [quiver.basis_element(m, one) for m in mors]
                for pos in range(p):
                    seam = args[pos - 1].source if pos else args[0].target
                    if seam != obj:
                        continue
                    val = mu.evaluate(tuple(args[:pos]) + (unit,)
                                      + tuple(args[pos:]))
                    if not val.is_zero():
                        raise Unverified("higher unit law fails at arity %d"
                                         % p, witness=(p, mors, val))
    return CurvedStructure(mu, units, verified=True,
                           window=window, arity_bound=arity_bound)


def curvature_of(structure, target):
    """The arity-0 value at an object; twisted objects delegate."""
    from . import twisted
    if isinstance(target, twisted.TwistedObject):
        return twisted.curvature(structure, target)
    return structure.cochain.at_object(target)


# ---------------------------------------------------------------------------
# Maurer-Cartan machinery
#
# A deformation of a structure over k is given by exact k-cochains
# components[k] (k >= 1), the coefficient of t^k in the deformed structure
# mu = mu0 + sum components[k] t^k.  All cochains involved must have been
# built at a working precision >= the precision of the computation.


def assemble(base, components, precision):
    """mu0 + sum components[k] t^k, truncated to the requested precision."""
    if precision > base.ctx.precision:
        raise HochschildError(
            "base structure was built at precision %d < %d"
            % (base.ctx.precision, precision))
    total = base.cochain.truncate(precision)
    for k, comp in sorted(components.items()):
        if k < 1:
            raise HochschildError("deformation components start at order 1")
        if k <= precision:
            total = total + comp.truncate(precision).t_multiple(k)
    return total


def mc_check(base, components, precision, window=None, arity_bound=None):
    """Does mu = mu0 + sum components[k] t^k square to zero mod t^(P+1)?

    Returns ``(ok, residual)`` with the full mu . mu cochain as residual.
    With a verified base this is the Maurer-Cartan equation
    ``[mu0, phi t] + phi t . phi t = 0`` in dot form.
    """
    mu = assemble(base, components, precision)
    residual = dot(mu, mu)
    witness = residual.first_nonzero(window, arity_bound)
    return witness is None, residual


def mc_residual_half_bracket(base, components, precision):
    """The bracket-form residual [mu0, psi] + (1/2)[psi, psi] (char 0 only).

    Agrees with the dot-form mu . mu residual; exposed as a cross-check.
    """
    if base.ctx.field.p:
        raise HochschildError("half-bracket form needs characteristic zero")
    mu0 = base.cochain.truncate(precision)
    psi = None
    for k, comp in sorted(components.items()):
        if k <= precision:
            piece = comp.truncate(precision).t_multiple(k)
            psi = piece if psi is None else psi + piece
    if psi is None:
        return zero_cochain(mu0.ctx, 3)
    return bracket(mu0, psi) + bracket(psi, psi).scale(Fraction(1, 2))


def gauge_transform(base, components, g_components, precision,
                    window=None, arity_bound=None):
    """Act on a Maurer-Cartan element by a t-nilpotent degree-0 gauge.

    ``g_components`` maps orders >= 1 to exact k-cochains of total degree 1
    (shifted degree 0); the gauge is g = sum g_components[k] t^k.  With
    psi = sum components[k] t^k, the result psi' is

        psi' = exp(ad_g)(psi) - F(ad_g)([mu0, g]),   F(x) = (e^x - 1)/x,

    all series finite by t-nilpotence.  Returns the transformed components
    dict (exact k-cochains at the base's working precision).
    """
    if any(k < 1 for k in g_components):
        raise GaugeNotNilpotent("gauge must lie in t * C")
    field = base.ctx.field
    if field.p and field.p <= precision + 1:
        raise GaugeNotNilpotent(
            "characteristic %d too small for gauge factorials at precision %d"
            % (field.p, precision))
    mu0 = base.cochain.truncate(precision)
    ctx = mu0.ctx

    def assemble_t(parts):
        total = None
        for k, comp in sorted(parts.items()):
            if k <= precision:
                piece = comp.truncate(precision).t_multiple(k)
                total = piece if total is None else total + piece
        return total

    g = assemble_t(g_components)
    if g is None:
        return dict(components)
    if g.degree != 1:
        raise GaugeNotNilpotent("gauge cochain must have total degree 1")
    psi = assemble_t(components) or zero_cochain(ctx, 2)

    result = psi
    term = psi
    for k in range(1, precision + 1):
        term = bracket(g, term)
        result = result + term.scale(_inv_factorial(field, k))
    acc = bracket(mu0, g)
    result = result - acc
    for k in range(1, precision + 1):
        acc = bracket(g, acc)
        result = result - acc.scale(_inv_factorial(field, k + 1))

    # the series above is a deep tower of closures: cache evaluations
    result = result.cached()
    out = {}
    for k in range(1, precision + 1):
        out[k] = result.t_coefficient(k).extend_exact(base.ctx.precision)
    return out


def _inv_factorial(field, k):
    return field.of(Fraction(1, math.factorial(k)))


class ObstructionWitness:
    """A nonzero order-(n+1) residual no in-window coboundary can cancel."""

    def __init__(self, residual, order):
        self.residual = residual
        self.order = order

    def __repr__(self):
        return "Obstruction(order=%d)" % self.order


def extension_search(base, components, order, unknown_supports=None,
                     window=None, arity_bound=None):
    """Search for mu^(n+1) extending an order-n deformation.

    Solves the exact linear system ``[mu0, X] = -(t^(n+1) residual)`` over
    the finite unknown table described by ``unknown_supports``: a list of
    ``(0, object)`` and ``(p, tuple_of_basis_mors)`` slots (default: every
    slot inside the window, up to arity ``arity_bound - 1``).  Returns
    ``{"extension": cochain}`` or ``{"obstruction": ObstructionWitness}``.
    """
    from . import linalg

    ctx = base.ctx
    quiver = ctx.quiver
    field = ctx.field
    window = window or ctx.window
    arity_bound = ctx.arity_bound if arity_bound is None else arity_bound

    ok, _ = mc_check(base, components, order, window, arity_bound)
    if not ok:
        raise HochschildError("deformation is not MC through order %d" % order)
    mu_bar = assemble(base, {k: v for k, v in components.items()
                             if k <= order + 1}, order + 1)
    residual = dot(mu_bar, mu_bar).t_coefficient(order + 1)

    if unknown_supports is None:
        unknown_supports = [(0, obj) for obj in quiver.objects]
        for p in range(1, arity_bound):
            for mors in quiver.composable_tuples(p, window):
                unknown_supports.append((p, mors))

    lo, hi = window
    columns = []
    max_unknown_arity = 0
    for slot in unknown_supports:
        p, where = slot
        if p == 0:
            src = tgt = where
            out_degree = 2
        else:
            mors = where
            src, tgt = mors[-1].source, mors[0].target
            out_degree = 2 - p + sum(m.degree for m in mors)
        if out_degree < lo or out_degree > hi:
            continue
        max_unknown_arity = max(max_unknown_arity, p)
        for b in quiver.basis(src, tgt, out_degree):
            columns.append((slot, b))
    if not columns:
        raise SearchUnbounded("no finitely supported unknowns in window")

    # the coboundary of an arity-p unknown reaches arity p+1; evaluating
    # beyond that (up to the configured bound) only adds residual-only rows
    site_arity = min(arity_bound, max(max_unknown_arity + 1,
                                      max(residual.arities or [0])))
    sites = [(0, obj) for obj in quiver.objects]
    for p in range(1, site_arity + 1):
        for mors in quiver.composable_tuples(p, window):
            sites.append((p, mors))
    one = ctx.scalar(1)

    def eval_sites(cochain):
        coords = []
        for p, where in sites:
            if p == 0:
                value = cochain.at_object(where)
            else:
                args = tuple(quiver.basis_element(m, one) for m in where)
                value = cochain.evaluate(args)
            coords.extend(_element_coords(field, quiver, value))
        return coords

    def cochain_from_coeffs(coeffs):
        tables = {}
        for (slot, b), c in zip(columns, coeffs):
            if field.is_zero(c):
                continue
            p, where = slot
            el = HomElement(quiver, b.source, b.target, b.degree,
                            {b.key: TruncScalar.constant(field, c,
                                                         ctx.precision)})
            key = where if p == 0 else tuple(m.key for m in where)
            bucket = tables.setdefault(p, {})
            bucket[key] = bucket[key] + el if key in bucket else el
        comps = {}
        for p, tbl in tables.items():
            if p == 0:
                comps[0] = arity0_component(ctx, 2, tbl)
            else:
                comps[p] = table_component(ctx, 2, p, tbl)
        return Cochain(ctx, 2, comps)

    matrix_cols = []
    for idx in range(len(columns)):
        unit = cochain_from_coeffs(
            [field.one if j == idx else field.zero
             for j in range(len(columns))])
        matrix_cols.append(eval_sites(bracket(base.cochain, unit)))
    rhs = [field.neg(v) for v in eval_sites(residual)]
    rows = len(rhs)
    mat = [[matrix_cols[c][r] for c in range(len(columns))]
           for r in range(rows)]

    solution = linalg.solve(field, mat, rhs)
    if solution is None:
        return {"obstruction": ObstructionWitness(residual, order + 1)}
    extension = cochain_from_coeffs(solution)
    extended = dict(components)
    extended[order + 1] = extension
    ok, _ = mc_check(base, extended, order + 1, window, arity_bound)
    if not ok:
        # sites under-determined the equation; treat as a failed search
        raise SearchUnbounded("candidate extension fails the full check; "
                              "enlarge the window or arity bound")
    return {"extension": extension}


def _element_coords(field, quiver, value):
    """Exact k-coordinates of a HomElement over its basis slot."""
    basis = quiver.basis(value.source, value.target, value.degree)
    coords = []
    for b in basis:
        c = value.terms.get(b.key)
        if c is None:
            coords.append(field.zero)
            continue
        if any(not field.is_zero(c.coefficient(k))
               for k in range(1, c.precision + 1)):
            raise HochschildError(
                "expected an exact k-valued cochain in the linear solve")
        coords.append(c.coefficient(0))
    return coords
