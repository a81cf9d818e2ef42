"""Exact coefficient arithmetic.

Two layers:

* a ground field ``k`` -- the rationals, or a prime field ``GF(p)`` whose
  characteristic must exceed the arity/precision bounds used downstream
  (gauge exponentials divide by factorials);
* the truncated polynomial ring ``k[t]/t^(P+1)`` realized by
  :class:`TruncScalar`.  Every scalar carries its own working precision
  ``P``; binary operations truncate to the minimum of the two precisions,
  and :meth:`TruncScalar.divide_by_t` consumes exactly one order.

All values are immutable after construction.
"""

from __future__ import annotations

from fractions import Fraction


class ScalarError(Exception):
    pass


class NotDivisible(ScalarError):
    """Division by t requested for a scalar with nonzero constant term."""


class PrecisionExhausted(ScalarError):
    """An operation needs at least one more order of t-precision."""


class MixedCharacteristic(ScalarError):
    """Operands live over fields of different characteristic."""


class Field:
    """A ground field: exact rationals (default) or a prime field GF(p).

    Elements are plain ``Fraction`` objects over QQ and ints in
    ``range(p)`` over GF(p); the field object supplies the arithmetic.
    """

    def __init__(self, characteristic=0):
        if characteristic == 0:
            self.p = 0
        else:
            p = int(characteristic)
            if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
                raise ScalarError("characteristic must be 0 or a prime")
            self.p = p

    # -- element constructors -------------------------------------------

    def of(self, value):
        """Coerce an int, Fraction or 'a/b' string into a field element."""
        if isinstance(value, str):
            value = Fraction(value)
        if self.p == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ScalarError("denominator not invertible mod %d" % self.p)
            return (value.numerator * pow(value.denominator, -1, self.p)) % self.p
        return int(value) % self.p

    @property
    def zero(self):
        return self.of(0)

    @property
    def one(self):
        return self.of(1)

    # -- arithmetic ------------------------------------------------------

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero field element")
        return pow(a, -1, self.p) if self.p else 1 / a

    def is_zero(self, a):
        return a == 0

    def to_str(self, a):
        return str(a)

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p == 0 else "GF(%d)" % self.p


QQ = Field(0)


def _check_same_field(x, y):
    if x.field != y.field:
        raise MixedCharacteristic(
            "cannot mix %r and %r scalars" % (x.field, y.field))


class TruncScalar:
    """An element of k[t]/t^(P+1) with tracked working precision P.

    ``coeffs`` has exactly ``P + 1`` entries; arithmetic never reads past
    index ``P``.  Instances are immutable and hashable.
    """

    __slots__ = ("field", "coeffs", "precision")

    def __init__(self, field, coeffs, precision=None):
        coeffs = tuple(field.of(c) for c in coeffs)
        if precision is None:
            precision = len(coeffs) - 1
        if precision < 0:
            raise ScalarError("precision must be >= 0")
        if len(coeffs) < precision + 1:
            coeffs = coeffs + (field.zero,) * (precision + 1 - len(coeffs))
        elif len(coeffs) > precision + 1:
            coeffs = coeffs[: precision + 1]
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "precision", precision)

    def __setattr__(self, name, value):
        raise AttributeError("TruncScalar is immutable")

    # -- constructors ----------------------------------------------------

    @staticmethod
    def constant(field, value, precision):
        return TruncScalar(field, (field.of(value),), precision)

    @staticmethod
    def zero(field, precision):
        return TruncScalar.constant(field, 0, precision)

    @staticmethod
    def one(field, precision):
        return TruncScalar.constant(field, 1, precision)

    @staticmethod
    def t_power(field, k, precision, coefficient=1):
        """coefficient * t^k at the given precision (zero if k > precision)."""
        coeffs = [field.zero] * (precision + 1)
        if 0 <= k <= precision:
            coeffs[k] = field.of(coefficient)
        return TruncScalar(field, coeffs, precision)

    # -- arithmetic ------------------------------------------------------

    def _binary_precision(self, other):
        _check_same_field(self, other)
        return min(self.precision, other.precision)

    def __add__(self, other):
        p = self._binary_precision(other)
        f = self.field
        return TruncScalar(
            f, [f.add(a, b) for a, b in zip(self.coeffs, other.coeffs)][: p + 1], p)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        f = self.field
        return TruncScalar(f, [f.neg(a) for a in self.coeffs], self.precision)

    def __mul__(self, other):
        if not isinstance(other, TruncScalar):
            return self.scale(other)
        p = self._binary_precision(other)
        f = self.field
        out = [f.zero] * (p + 1)
        for i, a in enumerate(self.coeffs[: p + 1]):
            if f.is_zero(a):
                continue
            for j in range(p + 1 - i):
                b = other.coeffs[j]
                if not f.is_zero(b):
                    out[i + j] = f.add(out[i + j], f.mul(a, b))
        return TruncScalar(f, out, p)

    def scale(self, c):
        """Multiply by a bare field element (or int/Fraction)."""
        f = self.field
        c = f.of(c)
        return TruncScalar(f, [f.mul(c, a) for a in self.coeffs], self.precision)

    def divide_by_t(self):
        """Strip one factor of t, consuming one order of precision."""
        f = self.field
        if not f.is_zero(self.coeffs[0]):
            raise NotDivisible("constant term %s != 0" % f.to_str(self.coeffs[0]))
        if self.precision == 0:
            raise PrecisionExhausted("cannot divide by t at precision 0")
        return TruncScalar(f, self.coeffs[1:], self.precision - 1)

    def divide_by_t_exact(self):
        """Division by t in the exact ring k[t]/t^(P+1): keeps the precision
        and chooses the representative whose top coefficient is zero."""
        f = self.field
        if not f.is_zero(self.coeffs[0]):
            raise NotDivisible("constant term %s != 0" % f.to_str(self.coeffs[0]))
        return TruncScalar(f, self.coeffs[1:] + (f.zero,), self.precision)

    def truncate(self, precision):
        if precision > self.precision:
            raise PrecisionExhausted(
                "cannot raise precision %d to %d" % (self.precision, precision))
        return TruncScalar(self.field, self.coeffs[: precision + 1], precision)

    def extend(self, precision):
        """Reinterpret at higher precision, padding with zero coefficients.

        Only sound for scalars known exactly (e.g. freshly constructed
        constants); deformation plumbing uses it when assembling structures
        whose components are exact k-cochains.
        """
        if precision < self.precision:
            return self.truncate(precision)
        f = self.field
        return TruncScalar(
            f, self.coeffs + (f.zero,) * (precision - self.precision), precision)

    # -- queries ---------------------------------------------------------

    def is_zero(self):
        f = self.field
        return all(f.is_zero(c) for c in self.coeffs)

    def coefficient(self, k):
        if k > self.precision:
            raise PrecisionExhausted("coefficient %d beyond precision %d"
                                     % (k, self.precision))
        return self.coeffs[k]

    def order(self):
        """Least k with nonzero t^k coefficient, or None for zero."""
        for k, c in enumerate(self.coeffs):
            if not self.field.is_zero(c):
                return k
        return None

    def __eq__(self, other):
        return (isinstance(other, TruncScalar) and self.field == other.field
                and self.precision == other.precision
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field, self.precision, self.coeffs))

    def __repr__(self):
        return "TruncScalar(%s, P=%d)" % (str(self), self.precision)

    def __str__(self):
        f = self.field
        parts = []
        for k, c in enumerate(self.coeffs):
            if f.is_zero(c):
                continue
            cs = f.to_str(c)
            if k == 0:
                parts.append(cs)
            else:
                tk = "t" if k == 1 else "t^%d" % k
                if cs == "1":
                    parts.append(tk)
                elif cs == "-1":
                    parts.append("-" + tk)
                else:
                    parts.append("%s*%s" % (cs, tk))
        if not parts:
            return "0"
        out = parts[0]
        for part in parts[1:]:
            out += " - " + part[1:] if part.startswith("-") else " + " + part
        return out


def is_regular_on(r, t_action, dimension):
    """Is multiplication by ``r`` injective on a finite R-module?

    The module is given as k-linear data: its k-dimension and the nilpotent
    matrix of the t-action (rows of Fractions/field elements).  Always true
    for r = 1.
    """
    from . import linalg

    field = r.field
    # mult-by-r = sum_k r_k * T^k  as a k-linear map
    mat = [[field.zero] * dimension for _ in range(dimension)]
    power = [[field.one if i == j else field.zero for j in range(dimension)]
             for i in range(dimension)]
    for k in range(r.precision + 1):
        ck = r.coeffs[k]
        if not field.is_zero(ck):
            for i in range(dimension):
                for j in range(dimension):
                    mat[i][j] = field.add(mat[i][j], field.mul(ck, power[i][j]))
        if k < r.precision:
            power = linalg.mat_mul(field, power, t_action)
    return linalg.rank(field, mat) == dimension
