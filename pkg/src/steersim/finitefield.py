"""Exact arithmetic in GF(p^k).

Elements are polynomials over GF(p) reduced modulo a fixed monic irreducible
polynomial.  Each element also has an integer index

    index = c_0 + c_1 p + ... + c_{k-1} p^{k-1}

where ``c_i`` is the coefficient of ``x^i``.  Multiplication goes through
log/antilog tables built once per field.

Modulus table
-------------
The modulus is the monic irreducible of degree ``k`` whose lower coefficients
have the smallest index (nonzero constant term for ``k > 1``).  For the sizes
used by the MUB construction this gives

    GF(p), p prime   x
    GF(4)            x^2 + x + 1
    GF(8)            x^3 + x + 1
    GF(9)            x^2 + 1

so MUB amplitudes are reproducible bit for bit across runs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DivisionByZero, NotPrime, UnsupportedSize

MAX_FIELD_SIZE = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(n: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``n == p**k`` and ``p`` prime, else None."""
    if n < 2:
        return None
    for p in range(2, n + 1):
        if n % p == 0:
            if not is_prime(p):
                return None
            k = 0
            m = n
            while m % p == 0:
                m //= p
                k += 1
            return (p, k) if m == 1 else None
    return None


# Polynomials are tuples of coefficients, lowest degree first.

def _trim(a: list[int]) -> list[int]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` divided by the monic polynomial ``m`` over GF(p)."""
    r = [c % p for c in a]
    dm = len(m) - 1
    for i in range(len(r) - 1, dm - 1, -1):
        c = r[i]
        if c:
            for j in range(dm + 1):
                r[i - dm + j] = (r[i - dm + j] - c * m[j]) % p
    r = r[:dm] if dm > 0 else [0]
    return r + [0] * (dm - len(r))


def _polymul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _monic_polys(p: int, deg: int) -> Iterator[tuple[int, ...]]:
    for low in itertools.product(range(p), repeat=deg):
        yield tuple(reversed(low)) + (1,)


def is_irreducible(m: Sequence[int], p: int) -> bool:
    """Exhaustive trial division by every monic polynomial up to half degree."""
    m = _trim(list(m))
    k = len(m) - 1
    if k < 1 or m[-1] % p != 1:
        return False
    for deg in range(1, k // 2 + 1):
        for f in _monic_polys(p, deg):
            if not any(_polymod(m, f, p)):
                return False
    return True


def default_modulus(p: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (0, 1)
    for low in range(1, p ** k):
        coeffs = [(low // p ** i) % p for i in range(k)]
        if coeffs[0] == 0:
            continue
        cand = tuple(coeffs) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {k} over GF({p})")


class Field:
    """The finite field GF(p^k).

    Parameters
    ----------
    p : int
        Prime characteristic.
    k : int
        Extension degree, at least 1.
    modulus : sequence of int, optional
        Monic irreducible polynomial of degree ``k`` (lowest coefficient
        first).  Defaults to the documented table in the module docstring.
    max_size : int
        Largest ``p**k`` accepted.
    """

    def __init__(self, p: int, k: int = 1, modulus: Sequence[int] | None = None,
                 max_size: int = MAX_FIELD_SIZE):
        if k < 1:
            raise UnsupportedSize(f"extension degree must be >= 1, got {k}")
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if p ** k > max_size:
            raise UnsupportedSize(f"GF({p}^{k}) has {p ** k} elements, limit is {max_size}")
        self.p = p
        self.k = k
        self.q = p ** k
        if modulus is None:
            modulus = default_modulus(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is not a monic irreducible of degree {k} over GF({p})")
        self.modulus = modulus

        q = self.q
        idx = np.arange(q)
        self._digits = np.stack([(idx // p ** i) % p for i in range(k)], axis=1)
        self._weights = p ** np.arange(k)
        self._build_tables()
        self._trace = np.array([self._trace_slow(a) for a in range(q)], dtype=np.int64)

    # -- construction helpers -------------------------------------------

    def _encode(self, coeffs: Sequence[int]) -> int:
        return int(sum((int(c) % self.p) * self.p ** i for i, c in enumerate(coeffs)))

    def _build_tables(self) -> None:
        q, p = self.q, self.p
        self._exp = np.zeros(2 * (q - 1), dtype=np.int64)
        self._log = np.full(q, -1, dtype=np.int64)
        if q == 2:
            self._exp[:] = 1
            self._log[1] = 0
            self.generator = 1
            return
        for g in range(2 if self.k == 1 else p, q):
            gpoly = list(self._digits[g])
            cur = [1] + [0] * (self.k - 1)
            powers = []
            for _ in range(q - 1):
                powers.append(self._encode(cur))
                cur = _polymod(_polymul(cur, gpoly, p), self.modulus, p)
            if len(set(powers)) == q - 1:
                self.generator = g
                powers = np.array(powers, dtype=np.int64)
                self._exp[: q - 1] = powers
                self._exp[q - 1:] = powers
                self._log[powers] = np.arange(q - 1)
                return
        raise AssertionError("no primitive element found")  # unreachable for a field

    def _trace_slow(self, a: int) -> int:
        acc = 0
        for i in range(self.k):
            acc = self.add(acc, self.pow(a, self.p ** i))
        if acc >= self.p:
            raise AssertionError(f"trace of {a} left the prime subfield")
        return acc

    # -- integer-index arithmetic ----------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self._digits[a])

    def add(self, a: int, b: int) -> int:
        return int(((self._digits[a] + self._digits[b]) % self.p) @ self._weights)

    def neg(self, a: int) -> int:
        return int(((-self._digits[a]) % self.p) @ self._weights)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"zero has no inverse in GF({self.q})")
        return int(self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)])

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            if n < 0:
                raise DivisionByZero("negative power of zero")
            return 0
        return int(self._exp[(self._log[a] * n) % (self.q - 1)])

    def trace(self, a: int) -> int:
        return int(self._trace[a])

    def trace_table(self) -> np.ndarray:
        """Absolute trace of every element, indexed by element index."""
        return self._trace.copy()

    # -- element objects ---------------------------------------------------

    def element(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            if not 0 <= value < self.q:
                raise ValueError(f"index {value} outside GF({self.q})")
            return FieldElement(self, int(value))
        coeffs = list(value)
        if len(coeffs) > self.k:
            raise ValueError(f"expected at most {self.k} coefficients")
        return FieldElement(self, self._encode(coeffs))

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, i) for i in range(self.q)]

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Field) and self.p == other.p and self.k == other.k
                and self.modulus == other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __repr__(self) -> str:
        return f"Field(p={self.p}, k={self.k}, modulus={self.modulus})"


@dataclass(frozen=True, eq=False)
class FieldElement:
    field: Field
    index: int

    @property
    def coefficients(self) -> tuple[int, ...]:
        return self.field.coeffs(self.index)

    def _other(self, other) -> int:
        return self.field.element(other).index

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.index, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.index, self._other(other)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.index))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.index, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * FieldElement(self.field, self.field.inv(self._other(other)))

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.pow(self.index, n))

    def inverse(self) -> FieldElement:
        return FieldElement(self.field, self.field.inv(self.index))

    def trace(self) -> int:
        return self.field.trace(self.index)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer)):
            return self.index == other
        return isinstance(other, FieldElement) and self.field == other.field and self.index == other.index

    def __hash__(self) -> int:
        return hash((self.field, self.index))

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"GF({self.field.q})[{self.index}]"


def field_create(p: int, k: int = 1) -> Field:
    return Field(p, k)


def gf_add(f: Field, a, b) -> FieldElement:
    return f.element(a) + f.element(b)


def gf_mul(f: Field, a, b) -> FieldElement:
    return f.element(a) * f.element(b)


def gf_inv(f: Field, a) -> FieldElement:
    return f.element(a).inverse()


def gf_trace(f: Field, a) -> int:
    return f.element(a).trace()
