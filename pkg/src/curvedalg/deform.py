"""Deformation workflows over k[t]/t^(N+1).

A deformation packages an uncurved base structure over k with exact
order-k cochain components; assembling them at a working precision gives
the deformed structure.  On top of that:

* curvature profiles ``c_M = sum c_M^(l) t^l`` of a twisted object with
  k-valued connection;
* the order-n uncurved object built from an order-(n+1) extension, whose
  next curvature coefficient is the pairing of the arity-1 operation's
  t-components with the profile components;
* the formal variant at working precision, where dividing the curvature
  by t consumes one order of precision;
* reduction mod t and endomorphism dg algebras of uncurved objects.
"""

from __future__ import annotations

from . import twisted as tw
from .hochschild import (CurvedStructure, HochschildError, assemble,
                         mc_check)
from .quiver import MatrixHom


class DeformError(HochschildError):
    pass


class BaseCurved(DeformError):
    pass


class NoExtension(DeformError):
    pass


class Curved(DeformError):
    pass


class Deformation:
    """An uncurved base structure over k plus exact order components.

    ``components[k]`` is the coefficient of t^k in the deformed structure
    (an exact degree-2 cochain over k, built at the base's precision).
    """

    def __init__(self, base, components):
        self.base = base
        self.components = dict(components)
        for obj in base.quiver.objects:
            if not base.cochain.at_object(obj).is_zero():
                raise BaseCurved("base structure must be uncurved")

    @property
    def ctx(self):
        return self.base.ctx

    def order(self):
        return max(self.components) if self.components else 0

    def structure(self, precision):
        """The deformed structure mu0 + sum components[k] t^k, verified
        MC-ness being the caller's concern (see mc_verify)."""
        mu = assemble(self.base, self.components, precision)
        units = {obj: u.map_scalars(lambda s: s.truncate(precision))
                 for obj, u in self.base.units.items()}
        return CurvedStructure(mu, units, verified=self.base.verified,
                               window=self.base.window,
                               arity_bound=self.base.arity_bound)

    def mc_verify(self, precision, window=None, arity_bound=None):
        return mc_check(self.base, self.components, precision,
                        window, arity_bound)


def _require_k_valued_connection(M):
    for e in M.connection.entries.values():
        for c in e.terms.values():
            if any(not c.field.is_zero(c.coefficient(k))
                   for k in range(1, c.precision + 1)):
                raise DeformError("twisted object must live over the base "
                                  "(k-valued connection)")


def curvature_profile(deformation, M, precision):
    """The components c_M^(l), l = 0..precision, as exact matrices.

    Requires (M, delta) uncurved over the base: c_M^(0) = 0.
    """
    _require_k_valued_connection(M)
    struct = deformation.structure(precision)
    c = tw.curvature(struct, M)
    profile = {l: c.t_coefficient(l) for l in range(precision + 1)}
    if not profile[0].is_zero():
        raise BaseCurved("connection is curved over the base already")
    return profile


def _profile_quotient(deformation, M, precision):
    """c_M / t = sum_l c^(l+1) t^l as an exact matrix at ``precision``."""
    profile = curvature_profile(deformation, M, precision + 1)
    ctx = deformation.ctx.at_precision(precision)
    out = MatrixHom.zero(M, M, 2)
    for l in range(0, precision + 1):
        comp = profile[l + 1]
        piece = comp.map_entries(
            lambda e, l=l: e.map_scalars(
                lambda s: s.extend(precision) * ctx.t_power(l)))
        out = out + piece
    return out


def build_Mn(deformation, M, n):
    """The uncurved order-n object from an order-(n+1) extension.

    Precondition: the deformation is Maurer-Cartan through order n+1 (use
    the extension search first if the component is missing), the base is
    uncurved at M and strictly unital.  The result lives at precision n
    and its curvature vanishes exactly there; at precision n+1 the t^(n+1)
    curvature coefficient is the sum over k+l = n+1 of the t^k component
    of the arity-1 operation applied to c^(l+1).
    """
    if n + 1 not in deformation.components:
        raise NoExtension("no order-%d component; run the extension search"
                          % (n + 1))
    ok, _ = deformation.mc_verify(n + 1)
    if not ok:
        raise NoExtension("deformation is not Maurer-Cartan through order %d"
                          % (n + 1))
    struct = deformation.structure(n)
    c_over_t = _profile_quotient(deformation, M, n)
    t = struct.ctx.t_power(1)
    return tw.remove_curvature(struct, M, t, c_over_t,
                               name="%r_(%d)" % (M, n))


def residual_identity(deformation, M, n):
    """Both sides of the order-(n+1) curvature coefficient identity.

    Returns (coefficient, termwise) where ``coefficient`` is the t^(n+1)
    part of the curvature of the order-n construction computed at
    precision n+1, and ``termwise`` is the list of exact matrices
    eta_1^(k)(c^(l+1)) over k + l = n+1.
    """
    struct = deformation.structure(n + 1)
    c_over_t = _profile_quotient(deformation, M, n)
    lifted = c_over_t.map_entries(
        lambda e: e.map_scalars(lambda s: s.extend(n + 1)))
    t = struct.ctx.t_power(1)
    M_t = tw.remove_curvature(struct, M, t, lifted)
    coefficient = tw.curvature(struct, M_t).t_coefficient(n + 1)

    profile = curvature_profile(deformation, M, n + 1)
    eta = tw.embr(struct)
    terms = []
    for k in range(0, n + 2):
        l = n + 1 - k
        if l + 1 > n + 1:
            continue
        comp = profile.get(l + 1)
        if comp is None or comp.is_zero():
            continue
        lifted_comp = comp.map_entries(
            lambda e: e.map_scalars(lambda s: s.extend(n + 1)))
        lifted_comp = lifted_comp.with_endpoints(M, M)
        value = eta.evaluate((lifted_comp,)).t_coefficient(k)
        if not value.is_zero():
            terms.append(((k, l + 1), value))
    return coefficient, terms


def build_formal_At(deformation, M, precision):
    """The working-precision formal construction: M_t at precision P-1.

    Dividing the curvature by t consumes one order of precision, mirroring
    the order drop of the infinitesimal statement.  The curvature of the
    result vanishes mod t^P as far as the remaining precision certifies.
    """
    if precision < 1:
        raise DeformError("need at least precision 1")
    struct_p = deformation.structure(precision)
    c = tw.curvature(struct_p, M)
    if not c.t_coefficient(0).is_zero():
        raise BaseCurved("connection is curved over the base already")
    c_over_t = tw.matrix_divide_by_t(c)
    struct = deformation.structure(precision - 1)
    t = struct.ctx.t_power(1)
    return tw.remove_curvature(struct, M, t, c_over_t,
                               name="%r_t" % (M,))


def reduce_mod_t(X, name=None):
    """Coefficientwise t = 0 reduction of a twisted object."""
    entries = {}
    for pos, e in X.connection.entries.items():
        r = e.t_coefficient(0)
        if not r.is_zero():
            entries[pos] = r
    return tw.TwistedObject(X.free, entries, name=name or "%r mod t" % (X,))


class EndomorphismDga:
    """End(X) of an uncurved twisted object over an arity-<=2 base.

    The product is the arity-2 induced operation, the differential the
    arity-1 one; ``basis(degree)`` lists (j, i, key) labels inside the
    degree window, and elements are matrix homs.
    """

    def __init__(self, structure, X, window):
        if structure.cochain.max_arity() > 2:
            raise DeformError("endomorphism dg algebra needs an arity-<=2 "
                              "base structure")
        c = tw.curvature(structure, X)
        if not c.is_zero():
            raise Curved("endomorphism dg algebra of a curved object")
        self.structure = structure
        self.X = X
        self.window = tuple(window)
        self._eta = tw.embr(structure)

    def basis(self, degree):
        quiver = self.structure.quiver
        out = []
        summands = self.X.free.summands
        for j, (tgt_obj, n_j) in enumerate(summands):
            for i, (src_obj, m_i) in enumerate(summands):
                d = degree + n_j - m_i
                for b in quiver.basis(src_obj, tgt_obj, d):
                    out.append((j, i, b.key))
        return out

    def element(self, degree, j, i, key, coefficient=1):
        quiver = self.structure.quiver
        src_obj, m_i = self.X.free.summands[i]
        tgt_obj, n_j = self.X.free.summands[j]
        d = degree + n_j - m_i
        el = quiver.element(src_obj, tgt_obj, d,
                            {key: self.structure.ctx.scalar(coefficient)})
        return MatrixHom(self.X, self.X, degree, {(j, i): el})

    def differential(self, f):
        return self._eta.evaluate((f,))

    def product(self, f, g):
        return self._eta.evaluate((f, g))

    def unit(self):
        return tw.unit_matrix(self.structure, self.X)

    def verify(self, degrees=None):
        """d^2 = 0 on every basis element, and the Leibniz relation in the
        form 'the induced structure squares to zero at arity 2' on every
        basis pair (these are the same data with the curvature gone)."""
        from .hochschild import dot
        lo, hi = self.window
        degrees = list(range(lo, hi + 1)) if degrees is None else list(degrees)
        square = dot(self._eta, self._eta)
        for degree in degrees:
            for (j, i, key) in self.basis(degree):
                f = self.element(degree, j, i, key)
                if not self.differential(self.differential(f)).is_zero():
                    return False, ("d^2", degree, (j, i, key))
        for degree in degrees:
            for (j, i, key) in self.basis(degree):
                f = self.element(degree, j, i, key)
                for degree2 in degrees:
                    for (j2, i2, key2) in self.basis(degree2):
                        if i != j2:
                            continue
                        g = self.element(degree2, j2, i2, key2)
                        if not square.evaluate((f, g)).is_zero():
                            return False, ("leibniz", degree, degree2)
        return True, None


def endomorphism_dga(structure, X, window):
    return EndomorphismDga(structure, X, window)
