from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedalg.scalars import (Field, MixedCharacteristic, NotDivisible,
                               PrecisionExhausted, QQ, TruncScalar,
                               is_regular_on)


def ts(coeffs, precision=None):
    return TruncScalar(QQ, coeffs, precision)


def test_add_identity():
    assert ts([1], 0) + ts([0], 0) == ts([1], 0)


def test_t_squared_vanishes_at_precision_one():
    t = TruncScalar.t_power(QQ, 1, 1)
    assert (t * t).is_zero()


def test_truncated_product():
    # (1 + t)(1 - t) = 1 - t^2 at precision 3
    a = ts([1, 1], 3)
    b = ts([1, -1], 3)
    assert a * b == ts([1, 0, -1, 0], 3)


def test_min_precision_rule():
    a = ts([1, 2, 3], 2)
    b = ts([1, 1], 1)
    assert (a + b).precision == 1
    assert (a * b).precision == 1


scalars = st.builds(
    lambda coeffs, p: ts(coeffs[: p + 1], p),
    st.lists(st.fractions(max_denominator=20), min_size=4, max_size=4),
    st.integers(min_value=0, max_value=3))


@settings(max_examples=60, deadline=None)
@given(scalars, scalars, scalars)
def test_ring_axioms(x, y, z):
    p = min(x.precision, y.precision, z.precision)
    x, y, z = x.truncate(p), y.truncate(p), z.truncate(p)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x
    assert x * y == y * x


@settings(max_examples=40, deadline=None)
@given(scalars)
def test_divide_after_multiply_by_t(x):
    if x.precision < 1:
        x = x.extend(1)
    t = TruncScalar.t_power(QQ, 1, x.precision)
    out = (t * x).divide_by_t()
    assert out.precision == x.precision - 1
    assert out == x.truncate(x.precision - 1)


def test_divide_by_t_examples():
    t = TruncScalar.t_power(QQ, 1, 2)
    assert t.divide_by_t() == ts([1, 0], 1)
    x = ts([0, 1, 3], 2)
    assert x.divide_by_t() == ts([1, 3], 1)
    with pytest.raises(NotDivisible):
        ts([1, 1], 1).divide_by_t()
    with pytest.raises(PrecisionExhausted):
        ts([0], 0).divide_by_t()


def test_exact_division_keeps_precision():
    x = ts([0, 1, 3], 2)
    assert x.divide_by_t_exact() == ts([1, 3, 0], 2)


def test_nilpotency_of_high_powers():
    for precision in range(0, 4):
        for k in range(0, precision + 2):
            a = TruncScalar.t_power(QQ, precision + 1 - k, precision)
            b = TruncScalar.t_power(QQ, k, precision)
            assert (a * b).is_zero()


def test_mixed_characteristic_rejected():
    with pytest.raises(MixedCharacteristic):
        ts([1], 1) + TruncScalar(Field(7), [1], 1)


def test_prime_field_arithmetic():
    gf = Field(7)
    a = TruncScalar(gf, [3, 5], 1)
    b = TruncScalar(gf, [5, 4], 1)
    assert a * b == TruncScalar(gf, [1, (3 * 4 + 5 * 5) % 7], 1)
    assert gf.of(Fraction(1, 2)) == 4  # 2 * 4 = 8 = 1 mod 7


def test_regularity_of_one():
    one = TruncScalar.one(QQ, 2)
    # any module: here k[t]/t^3 with the shift action
    action = [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    assert is_regular_on(one, action, 3)


def test_t_not_regular_on_dual_numbers():
    t = TruncScalar.t_power(QQ, 1, 1)
    action = [[0, 0], [1, 0]]
    assert not is_regular_on(t, action, 2)


def test_t_regular_below_precision():
    from curvedalg import linalg
    # on the full truncated rank-1 module the top degree dies ...
    full = [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    t3 = TruncScalar.t_power(QQ, 1, 2)
    assert not is_regular_on(t3, full, 3)
    # ... but restricted to degrees < P the shift into the module is
    # injective: the rectangular multiplication matrix has full column rank
    shift_from_low_degrees = [[0, 0], [1, 0], [0, 1]]
    assert linalg.rank(QQ, shift_from_low_degrees) == 2
    # and units are always regular
    unit = TruncScalar(QQ, [1, 1, 0], 2)
    assert is_regular_on(unit, full, 3)


def test_string_rendering():
    assert str(ts([Fraction(3, 2), 0, 1], 2)) == "3/2 + t^2"
    assert str(ts([0, -1], 1)) == "-t"
    assert str(ts([0], 3)) == "0"
