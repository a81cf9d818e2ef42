"""Graded quivers with finite hom-bases, free objects and matrix homs.

Two backends:

* :class:`TableQuiver` -- an explicit finite basis with structure constants
  for the product (and optionally a differential) inside a degree window;
  products escaping the window raise :class:`WindowOverflow`.
* :class:`MonomialQuiver` -- one object whose endomorphism algebra is a
  finitely generated graded-commutative monomial algebra: basis elements
  are exponent tuples, relations are ``gen**cap = 0``, invertible
  generators get integer exponents.  This covers the two built-in
  examples (a graded field with one invertible degree-2 generator, and
  the algebra on an even and an odd square-zero generator).

Elements are sparse sums of basis morphisms with :class:`TruncScalar`
coefficients; matrix homs between free objects carry a declared total
degree ``l`` and entries of intrinsic degree ``l + n_j - m_i``.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple

from .scalars import TruncScalar


class QuiverError(Exception):
    pass


class WindowOverflow(QuiverError):
    """A product left the degree window of a table backend."""


class DegreeMismatch(QuiverError):
    pass


class BasisMor(NamedTuple):
    source: str
    target: str
    key: object
    degree: int


class GradedQuiver:
    """Base class: a set of objects plus graded hom-bases between them."""

    objects = ()

    def basis(self, source, target, degree):
        raise NotImplementedError

    def basis_in_window(self, window):
        """All basis morphisms with degree inside [lo, hi]."""
        raise NotImplementedError

    def key_str(self, key):
        return str(key)

    def composable_tuples(self, arity, window):
        """Composable basis tuples (t_1, ..., t_p), t_1 the last arrow.

        Composability: source(t_k) == target(t_{k+1}).  Only morphisms with
        degree inside the window are enumerated.
        """
        pool = list(self.basis_in_window(window))
        by_target = {}
        for b in pool:
            by_target.setdefault(b.target, []).append(b)
        if arity == 0:
            yield ()
            return

        def extend(prefix):
            if len(prefix) == arity:
                yield tuple(prefix)
                return
            for b in by_target.get(prefix[-1].source, ()):
                prefix.append(b)
                yield from extend(prefix)
                prefix.pop()

        for b in pool:
            yield from extend([b])

    # -- element constructors -------------------------------------------

    def element(self, source, target, degree, terms):
        return HomElement(self, source, target, degree, terms)

    def zero_element(self, source, target, degree):
        return HomElement(self, source, target, degree, {})

    def basis_element(self, mor, coefficient):
        return HomElement(self, mor.source, mor.target, mor.degree,
                          {mor.key: coefficient})


class TableQuiver(GradedQuiver):
    """Finite basis with explicit structure constants in a degree window.

    ``product[(k1, k2)]`` lists ``(rational, key)`` terms for the plain
    (unshifted) product "k1 after k2"; missing pairs multiply to zero when
    the would-be degree lies inside the window and raise
    :class:`WindowOverflow` when it escapes.  ``differential`` maps keys to
    term lists of one degree higher.  ``units[obj]`` names the basis key
    acting as a strict unit, if any.
    """

    def __init__(self, objects, morphisms, window, product=None,
                 differential=None, units=None):
        self.objects = tuple(objects)
        self._basis = {}
        self._by_key = {}
        for (source, target, key, degree) in morphisms:
            mor = BasisMor(source, target, key, degree)
            if key in self._by_key:
                raise QuiverError("duplicate basis key %r" % (key,))
            self._by_key[key] = mor
            self._basis.setdefault((source, target), []).append(mor)
        self.window = (int(window[0]), int(window[1]))
        self.product = dict(product or {})
        self.differential = dict(differential or {})
        self.units = dict(units or {})
        for (k1, k2), terms in self.product.items():
            m1, m2 = self._by_key[k1], self._by_key[k2]
            if m1.source != m2.target:
                raise QuiverError("product pair %r,%r not composable" % (k1, k2))
            for _, k in terms:
                m = self._by_key[k]
                if m.degree != m1.degree + m2.degree:
                    raise QuiverError("product term %r breaks degree" % (k,))

    def mor(self, key):
        return self._by_key[key]

    def basis(self, source, target, degree):
        return [b for b in self._basis.get((source, target), ())
                if b.degree == degree]

    def basis_in_window(self, window):
        lo, hi = window
        for mors in self._basis.values():
            for b in mors:
                if lo <= b.degree <= hi:
                    yield b

    def mul_basis(self, k1, k2):
        """Terms of the plain product, or WindowOverflow outside the window."""
        if (k1, k2) in self.product:
            return self.product[(k1, k2)]
        m1, m2 = self._by_key[k1], self._by_key[k2]
        deg = m1.degree + m2.degree
        lo, hi = self.window
        if deg < lo or deg > hi:
            raise WindowOverflow(
                "product of %r and %r has degree %d outside [%d, %d]"
                % (k1, k2, deg, lo, hi))
        return []

    def diff_basis(self, key):
        return self.differential.get(key, [])


class MonomialQuiver(GradedQuiver):
    """One-object graded-commutative monomial algebra.

    Generators: ``(name, degree, cap, invertible)`` with ``cap`` the least
    vanishing power (``gen**cap = 0``; None for no relation) and
    ``invertible`` allowing integer exponents.  Basis keys are exponent
    tuples; the unit is the zero tuple.  Generator degrees must be nonzero
    so degree windows cut out finite basis sets.
    """

    OBJECT = "A"

    def __init__(self, generators):
        self.objects = (self.OBJECT,)
        self.generators = []
        for (name, degree, cap, invertible) in generators:
            if degree == 0:
                raise QuiverError("degree-0 generators make windows infinite")
            if invertible and cap is not None:
                raise QuiverError("generator %s cannot be both invertible "
                                  "and nilpotent" % name)
            self.generators.append((name, int(degree), cap, bool(invertible)))
        if len({g[0] for g in self.generators}) != len(self.generators):
            raise QuiverError("duplicate generator names")

    @property
    def unit_key(self):
        return (0,) * len(self.generators)

    def _degree(self, key):
        return sum(e * g[1] for e, g in zip(key, self.generators))

    def mor_from_key(self, key):
        return BasisMor(self.OBJECT, self.OBJECT, tuple(key), self._degree(key))

    def basis(self, source, target, degree):
        # only used through windows in practice; enumerate lazily
        return [b for b in self.basis_in_window((degree, degree))]

    def basis_in_window(self, window):
        lo, hi = window
        ranges = []
        bound = max(abs(lo), abs(hi))
        for (_, degree, cap, invertible) in self.generators:
            reach = bound // abs(degree)
            if invertible:
                ranges.append(range(-reach, reach + 1))
            else:
                top = reach if cap is None else min(reach, cap - 1)
                ranges.append(range(0, top + 1))
        for key in itertools.product(*ranges):
            if lo <= self._degree(key) <= hi:
                yield self.mor_from_key(key)

    def mul_basis(self, k1, k2):
        """Supercommutative monomial product: [(sign, key)] or []."""
        sign = 1
        out = []
        for idx, (g, e1, e2) in enumerate(zip(self.generators, k1, k2)):
            _, degree, cap, _ = g
            if degree % 2 and e1 and e2:
                return []  # odd generator squares to zero
            e = e1 + e2
            if cap is not None and e >= cap:
                return []
            out.append(e)
        # interchange signs: each odd generator power of k2 moves past the
        # odd generator powers of k1 sitting later in the canonical order
        for j, gj in enumerate(self.generators):
            if gj[1] % 2 == 0 or not k2[j]:
                continue
            swaps = sum(k1[i] for i in range(j + 1, len(k1))
                        if self.generators[i][1] % 2)
            if swaps % 2:
                sign = -sign
        return [(sign, tuple(out))]

    def diff_basis(self, key):
        return []

    def key_str(self, key):
        parts = []
        for (name, _, _, _), e in zip(self.generators, key):
            if e == 0:
                continue
            parts.append(name if e == 1 else "%s^%d" % (name, e))
        return "*".join(parts) if parts else "1"


class HomElement:
    """A homogeneous sparse sum of basis morphisms with scalar coefficients.

    All stored terms share source, target and degree; zero coefficients are
    never stored.
    """

    __slots__ = ("quiver", "source", "target", "degree", "terms")

    def __init__(self, quiver, source, target, degree, terms):
        self.quiver = quiver
        self.source = source
        self.target = target
        self.degree = degree
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    def _compatible(self, other):
        if (self.source, self.target, self.degree) != \
                (other.source, other.target, other.degree):
            raise DegreeMismatch(
                "cannot add (%s -> %s, deg %d) and (%s -> %s, deg %d)"
                % (self.source, self.target, self.degree,
                   other.source, other.target, other.degree))

    def __add__(self, other):
        self._compatible(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return HomElement(self.quiver, self.source, self.target,
                          self.degree, terms)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        if isinstance(c, TruncScalar):
            terms = {k: v * c for k, v in self.terms.items()}
        else:
            terms = {k: v.scale(c) for k, v in self.terms.items()}
        return HomElement(self.quiver, self.source, self.target,
                          self.degree, terms)

    def is_zero(self):
        return not self.terms

    def t_coefficient(self, k):
        """The t^k coefficient as an element with precision-0 scalars."""
        terms = {}
        for key, c in self.terms.items():
            terms[key] = TruncScalar(c.field, (c.coefficient(k),), 0)
        return HomElement(self.quiver, self.source, self.target,
                          self.degree, terms)

    def map_scalars(self, fn):
        return HomElement(self.quiver, self.source, self.target, self.degree,
                          {k: fn(v) for k, v in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, HomElement)
                and (self.source, self.target, self.degree)
                == (other.source, other.target, other.degree)
                and self.terms == other.terms)

    def __repr__(self):
        return "<%s -> %s deg %d: %s>" % (
            self.source, self.target, self.degree, str(self))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, key=repr):
            c = self.terms[key]
            ks = self.quiver.key_str(key)
            cs = str(c)
            if cs == "1":
                parts.append(ks)
            elif ks == "1":
                parts.append(cs if "+" not in cs and cs.count("-") <= (
                    1 if cs.startswith("-") else 0) else "(%s)" % cs)
            elif "+" in cs or (cs.count("-") and not cs.startswith("-")) \
                    or (cs.startswith("-") and "-" in cs[1:]):
                parts.append("(%s)*%s" % (cs, ks))
            else:
                parts.append("%s*%s" % (cs, ks))
        return " + ".join(parts)


class FreeObject:
    """A finite formal direct sum of shifted objects."""

    __slots__ = ("summands",)

    def __init__(self, summands):
        self.summands = tuple((obj, int(shift)) for obj, shift in summands)

    @staticmethod
    def single(obj, shift=0):
        return FreeObject([(obj, shift)])

    def shift(self, n):
        return FreeObject([(obj, s + n) for obj, s in self.summands])

    def __len__(self):
        return len(self.summands)

    def objects(self):
        return [obj for obj, _ in self.summands]

    def shifts(self):
        return [s for _, s in self.summands]

    def __eq__(self, other):
        return isinstance(other, FreeObject) and self.summands == other.summands

    def __hash__(self):
        return hash(self.summands)

    def __repr__(self):
        def one(obj, s):
            if s == 0:
                return str(obj)
            return "S^%d %s" % (s, obj) if s != 1 else "S %s" % obj
        return " (+) ".join(one(o, s) for o, s in self.summands)


def direct_sum(objects):
    summands = []
    for m in objects:
        summands.extend(m.summands)
    return FreeObject(summands)


def _summands_of(obj):
    # FreeObject or anything exposing .free (a twisted object)
    return obj.summands if isinstance(obj, FreeObject) else obj.free.summands


class MatrixHom:
    """A degree-l morphism between free objects, as a sparse entry matrix.

    Entry (j, i) maps summand i of the source to summand j of the target and
    has intrinsic degree ``l + n_j - m_i``.  Sources/targets may be free
    objects or twisted objects (they expose ``summands`` via ``free``).
    """

    __slots__ = ("source", "target", "degree", "entries")

    def __init__(self, source, target, degree, entries):
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.entries = {pos: e for pos, e in entries.items() if not e.is_zero()}

    @staticmethod
    def zero(source, target, degree):
        return MatrixHom(source, target, degree, {})

    @property
    def source_summands(self):
        return _summands_of(self.source)

    @property
    def target_summands(self):
        return _summands_of(self.target)

    def entry(self, j, i, quiver=None):
        if (j, i) in self.entries:
            return self.entries[(j, i)]
        if quiver is None:
            quiver = next(iter(self.entries.values())).quiver if self.entries \
                else None
        src_obj, m_i = self.source_summands[i]
        tgt_obj, n_j = self.target_summands[j]
        return HomElement(quiver, src_obj, tgt_obj,
                          self.degree + n_j - m_i, {})

    def validate(self):
        """Degree/endpoint check; returns (ok, list of diagnostics)."""
        diags = []
        src = self.source_summands
        tgt = self.target_summands
        for (j, i), e in self.entries.items():
            if not (0 <= j < len(tgt) and 0 <= i < len(src)):
                diags.append("entry (%d, %d) outside matrix shape" % (j, i))
                continue
            src_obj, m_i = src[i]
            tgt_obj, n_j = tgt[j]
            want = self.degree + n_j - m_i
            if e.degree != want:
                diags.append(
                    "entry (%d, %d) has degree %d, expected %d + %d - %d = %d"
                    % (j, i, e.degree, self.degree, n_j, m_i, want))
            if e.source != src_obj or e.target != tgt_obj:
                diags.append("entry (%d, %d) maps %s -> %s, expected %s -> %s"
                             % (j, i, e.source, e.target, src_obj, tgt_obj))
        return (not diags), diags

    def __add__(self, other):
        if (self.source_summands != other.source_summands
                or self.target_summands != other.target_summands
                or self.degree != other.degree):
            raise DegreeMismatch("matrix shapes/degrees differ")
        entries = dict(self.entries)
        for pos, e in other.entries.items():
            entries[pos] = entries[pos] + e if pos in entries else e
        return MatrixHom(self.source, self.target, self.degree, entries)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return MatrixHom(self.source, self.target, self.degree,
                         {pos: e.scale(c) for pos, e in self.entries.items()})

    def is_zero(self):
        return not self.entries

    def map_entries(self, fn):
        return MatrixHom(self.source, self.target, self.degree,
                         {pos: fn(e) for pos, e in self.entries.items()})

    def t_coefficient(self, k):
        return self.map_entries(lambda e: e.t_coefficient(k))

    def with_endpoints(self, source, target):
        return MatrixHom(source, target, self.degree, self.entries)

    def __eq__(self, other):
        return (isinstance(other, MatrixHom)
                and self.source_summands == other.source_summands
                and self.target_summands == other.target_summands
                and self.degree == other.degree
                and self.entries == other.entries)

    def __repr__(self):
        body = ", ".join("(%d,%d): %s" % (j, i, e)
                         for (j, i), e in sorted(self.entries.items()))
        return "MatrixHom(deg %d, {%s})" % (self.degree, body)
