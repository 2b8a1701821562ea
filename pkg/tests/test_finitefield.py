import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steersim.errors import DivisionByZero, NotPrime, UnsupportedSize
from steersim.finitefield import Field, field_create, gf_add, gf_inv, gf_mul, gf_trace, is_irreducible

IN_SCOPE = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (11, 2)]


def egcd_inverse(a, p):
    # extended Euclid, independent of the field tables
    old_r, r, old_s, s = a, p, 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    return old_s % p


def naive_mul(f, a, b):
    """Schoolbook polynomial product reduced by long division."""
    pa, pb, p, m = f.coeffs(a), f.coeffs(b), f.p, f.modulus
    prod = [0] * (2 * f.k - 1)
    for i, x in enumerate(pa):
        for j, y in enumerate(pb):
            prod[i + j] += x * y
    prod = [c % p for c in prod]
    for i in range(len(prod) - 1, f.k - 1, -1):
        c = prod[i]
        for j in range(f.k + 1):
            prod[i - f.k + j] = (prod[i - f.k + j] - c * m[j]) % p
    return sum(c * p ** i for i, c in enumerate(prod[:f.k]))


@pytest.fixture(scope="module", params=IN_SCOPE, ids=lambda pk: f"GF({pk[0]}^{pk[1]})")
def field(request):
    return Field(*request.param)


def test_gf5_inverse_of_two():
    f = field_create(5, 1)
    assert gf_inv(f, 2) == 3
    assert gf_inv(f, 2).index == egcd_inverse(2, 5)


def test_gf4_modulus_and_omega_squared():
    f = field_create(2, 2)
    assert f.modulus == (1, 1, 1)
    omega = f.element([0, 1])
    assert omega * omega == f.element([1, 1])
    assert gf_add(f, omega, omega) == 0


def test_documented_moduli():
    assert Field(2, 3).modulus == (1, 1, 0, 1)
    assert Field(3, 2).modulus == (1, 0, 1)
    assert Field(7, 1).modulus == (0, 1)


def test_gf5_mul_and_gf7_identity_inverse():
    assert gf_mul(field_create(5), 3, 4) == 2
    assert gf_inv(field_create(7), 1) == 1


def test_construction_errors():
    with pytest.raises(NotPrime):
        field_create(4, 1)
    with pytest.raises(UnsupportedSize):
        field_create(2, 13)
    with pytest.raises(DivisionByZero):
        gf_inv(field_create(7), 0)


def test_trace_examples():
    f4 = Field(2, 2)
    assert gf_trace(f4, f4.element([0, 1])) == 1
    assert gf_trace(f4, 0) == 0
    f7 = Field(7)
    assert [gf_trace(f7, a) for a in range(7)] == list(range(7))


def test_prime_field_inverses_match_euclid():
    for p in (3, 5, 7, 11, 13):
        f = Field(p)
        for a in range(1, p):
            assert f.inv(a) == egcd_inverse(a, p)


def test_exhaustive_mul_matches_schoolbook(field):
    for a in range(field.q):
        for b in range(field.q):
            assert field.mul(a, b) == naive_mul(field, a, b)


def test_exhaustive_inverse_and_commutativity(field):
    for a in range(1, field.q):
        assert field.mul(a, field.inv(a)) == 1
    for a, b in itertools.product(range(field.q), repeat=2):
        assert field.add(a, b) == field.add(b, a)
        assert field.mul(a, b) == field.mul(b, a)


@pytest.mark.parametrize("pk", [(2, 2), (2, 3), (3, 2), (5, 1)])
def test_exhaustive_associativity_distributivity(pk):
    f = Field(*pk)
    r = range(f.q)
    for a, b, c in itertools.product(r, r, r):
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 120), st.integers(0, 120), st.integers(0, 120))
def test_axioms_gf121_sampled(a, b, c):
    f = _gf121()
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))


_cache = {}


def _gf121():
    if "f" not in _cache:
        _cache["f"] = Field(11, 2)
    return _cache["f"]


def test_trace_linear_and_nondegenerate(field):
    tr = field.trace_table()
    p = field.p
    for a in range(field.q):
        assert 0 <= tr[a] < p
        for b in range(field.q):
            assert tr[field.add(a, b)] == (tr[a] + tr[b]) % p
    # scalar linearity over the prime subfield
    for c in range(p):
        for a in range(field.q):
            assert tr[field.mul(c, a)] == (c * tr[a]) % p
    for b in range(1, field.q):
        assert any(tr[field.mul(a, b)] for a in range(field.q))


def test_irreducibility_check():
    assert is_irreducible((1, 1, 1), 2)
    assert not is_irreducible((1, 0, 1), 2)  # (x+1)^2
    assert not is_irreducible((2, 0, 1), 3)  # x^2 - 1
    assert is_irreducible((1, 0, 1), 3)
    with pytest.raises(ValueError):
        Field(2, 2, modulus=(1, 0, 1))


def test_element_objects():
    f = Field(3, 2)
    a, b = f.element(4), f.element([2, 1])
    assert (a * b) / b == a
    assert -a + a == f.zero
    assert a ** (f.q - 1) == f.one
    assert a.coefficients == (1, 1)
    assert hash(f.element(4)) == hash(a)
