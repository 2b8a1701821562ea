"""Complete families of mutually unbiased bases in prime-power dimension.

Basis 0 is the computational basis.  Basis ``x + 1`` (``x`` a field element
index) is

* odd characteristic:  <j|phi_x^a> = w^{Tr(x j^2 + a j)} / sqrt(d),  w = exp(2 pi i / p)
* characteristic 2:    <j|phi_x^a> = i^{Q_x(j)} (-1)^{a.j} / sqrt(d)

where for ``d = 2^k`` the Z4-valued quadratic form is
``Q_x(j) = sum_u S_uu j_u + 2 sum_{u<v} S_uv j_u j_v`` with
``S_uv = Tr(x e_u e_v)`` over the polynomial basis ``e_u = t^u``, and
``a.j`` is the GF(2) dot product of coefficient vectors.  Distinct ``x``
give forms whose difference is nonsingular over GF(2), which is what makes
the corresponding bases unbiased.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IndexOutOfRange, UnsupportedDimension
from .finitefield import Field, prime_power

SUPPORTED_DIMS = (2, 3, 4, 5, 7, 8, 9, 11, 13)


@dataclass(frozen=True)
class Basis:
    label: int
    vectors: np.ndarray  # (d, d), row a is |phi^a>

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def projector(self, a: int) -> np.ndarray:
        v = self.vectors[a]
        return np.outer(v, v.conj())


@dataclass(frozen=True, eq=False)
class MubFamily:
    """Orthonormal bases stacked as ``vectors[x, a, j] = <j|phi_x^a>``."""

    d: int
    vectors: np.ndarray
    labels: tuple[int, ...] = ()

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 3 or v.shape[1:] != (self.d, self.d):
            raise ValueError(f"expected shape (n, {self.d}, {self.d}), got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(v.shape[0])))

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def __getitem__(self, x: int) -> Basis:
        return Basis(self.labels[x], self.vectors[x])

    @property
    def n_settings(self) -> int:
        return len(self)

    @property
    def is_complete(self) -> bool:
        return len(self) == self.d + 1

    def vector(self, x: int, a: int) -> np.ndarray:
        if not (0 <= x < len(self) and 0 <= a < self.d):
            raise IndexOutOfRange(f"(x={x}, a={a}) outside {len(self)} bases of dimension {self.d}")
        return self.vectors[x, a]

    def projector(self, x: int, a: int) -> np.ndarray:
        v = self.vector(x, a)
        return np.outer(v, v.conj())

    def subset(self, xs) -> MubFamily:
        xs = list(xs)
        return MubFamily(self.d, self.vectors[xs], tuple(self.labels[x] for x in xs))


def _odd_bases(field: Field) -> np.ndarray:
    q, p = field.q, field.p
    tr = field.trace_table()
    j = np.arange(q)
    jsq = np.array([field.mul(i, i) for i in j])
    out = np.empty((q, q, q), dtype=complex)
    for x in range(q):
        xj2 = np.array([field.mul(x, s) for s in jsq])
        for a in range(q):
            arg = [field.add(xj2[i], field.mul(a, i)) for i in j]
            out[x, a] = np.exp(2j * np.pi * tr[arg] / p)
    return out / np.sqrt(q)


def _even_bases(field: Field) -> np.ndarray:
    q, k = field.q, field.k
    bits = np.array([field.coeffs(i) for i in range(q)])  # (q, k)
    e = [2 ** u for u in range(k)]
    out = np.empty((q, q, q), dtype=complex)
    signs = (-1.0) ** ((bits @ bits.T) % 2)  # [a, j]
    for x in range(q):
        s = np.array([[field.trace(field.mul(x, field.mul(e[u], e[v]))) for v in range(k)]
                      for u in range(k)])
        upper = np.triu(s, 1)
        quad = bits @ np.diag(s) + 2 * np.einsum("ju,uv,jv->j", bits, upper, bits)
        phase = 1j ** (quad % 4)
        out[x] = signs * phase[None, :]
    return out / np.sqrt(q)


@lru_cache(maxsize=None)
def _build(d: int) -> MubFamily:
    pk = prime_power(d)
    if d not in SUPPORTED_DIMS or pk is None:
        raise UnsupportedDimension(f"d={d} is not a supported prime power {SUPPORTED_DIMS}")
    field = Field(*pk)
    rest = _odd_bases(field) if field.p != 2 else _even_bases(field)
    vecs = np.concatenate([np.eye(d, dtype=complex)[None], rest], axis=0)
    return MubFamily(d, vecs)


def build_mubs(d: int) -> MubFamily:
    """Complete family of ``d + 1`` MUBs; basis 0 is computational."""
    return _build(int(d))


@dataclass(frozen=True)
class MubReport:
    d: int
    n_bases: int
    max_orthonormality_dev: float
    max_unbiasedness_dev: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n_bases": self.n_bases,
            "max_orthonormality_dev": self.max_orthonormality_dev,
            "max_unbiasedness_dev": self.max_unbiasedness_dev,
            "tol": self.tol,
            "pass": self.passed,
        }


def verify_mub(fam: MubFamily, tol: float = 1e-10) -> MubReport:
    """Worst-case orthonormality and unbiasedness deviations over the family."""
    v = fam.vectors
    n, d = v.shape[0], fam.d
    # overlaps[x, a, y, b] = <phi_x^a|phi_y^b>
    g = np.einsum("xaj,ybj->xayb", v.conj(), v)
    ortho = 0.0
    unbiased = 0.0
    target = 1 / np.sqrt(d)
    eye = np.eye(d)
    for x in range(n):
        ortho = max(ortho, float(np.max(np.abs(g[x, :, x, :] - eye))))
        for y in range(x + 1, n):
            unbiased = max(unbiased, float(np.max(np.abs(np.abs(g[x, :, y, :]) - target))))
    return MubReport(d, n, ortho, unbiased, tol, ortho <= tol and unbiased <= tol)


def conjugate_family(fam: MubFamily) -> MubFamily:
    """Complex-conjugated family; Bob's measurement bases."""
    return MubFamily(fam.d, fam.vectors.conj(), fam.labels)
