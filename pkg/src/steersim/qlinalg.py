"""Dense complex linear algebra for qudit and bipartite operators.

Bipartite index convention: ``alice_index * d_B + bob_index`` (Alice-major),
which is what ``numpy.kron`` produces.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadSplit, DimensionMismatch, InvalidDensity, NonHermitian, SizeOverflow

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9
MAX_KRON_DIM = 4096


def ket(amplitudes) -> np.ndarray:
    """Normalized state vector as a 1-D complex array."""
    v = np.asarray(amplitudes, dtype=complex).ravel()
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite amplitude")
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector cannot be normalized")
    return v / n


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def kron(a, b, max_dim: int = MAX_KRON_DIM) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[0] * b.shape[0] > max_dim:
        raise SizeOverflow(f"kron of {a.shape} and {b.shape} exceeds {max_dim}")
    return np.kron(a, b)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A validated density matrix.

    Construction checks Hermiticity, unit trace and positivity with the
    module tolerances.  Nothing is repaired silently; call
    :func:`clip_and_renormalize` explicitly when a repair is wanted.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dims = tuple(int(x) for x in self.dims)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDensity(f"density matrix must be square, got shape {m.shape}")
        if int(np.prod(dims)) != m.shape[0]:
            raise BadSplit(f"dims {dims} do not multiply to {m.shape[0]}")
        if not np.all(np.isfinite(m)):
            raise InvalidDensity("non-finite entries")
        if not is_hermitian(m):
            raise NonHermitian("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1) > TRACE_TOL:
            raise InvalidDensity(f"trace {tr!r} differs from 1")
        lam = np.linalg.eigvalsh(m).min()
        if lam < PSD_TOL:
            raise InvalidDensity(f"minimum eigenvalue {lam:.3e} below {PSD_TOL}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def density(m, dims=None) -> DensityOperator:
    m = np.asarray(m)
    return DensityOperator(m, tuple(dims) if dims is not None else (m.shape[0],))


def clip_and_renormalize(m, dims=None) -> DensityOperator:
    """Project onto the PSD cone by clipping negative eigenvalues, then renormalize."""
    m = np.asarray(m, dtype=complex)
    m = (m + m.conj().T) / 2
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0, None)
    if w.sum() == 0:
        raise InvalidDensity("no positive spectrum left after clipping")
    fixed = (v * (w / w.sum())) @ v.conj().T
    return density(fixed, dims)


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)


def partial_trace(rho, dims: tuple[int, int] | None = None, trace_out: str = "A"):
    """Trace out one side of a bipartite operator.

    Parameters
    ----------
    rho : DensityOperator or ndarray
        Operator on ``d_A * d_B``.
    dims : (d_A, d_B), optional
        Required when ``rho`` is a bare array; taken from ``rho.dims`` otherwise.
    trace_out : {"A", "B"}
        Side to remove.

    Returns
    -------
    DensityOperator when given one, ndarray otherwise.
    """
    m = _as_matrix(rho)
    if dims is None:
        if not isinstance(rho, DensityOperator) or len(rho.dims) != 2:
            raise BadSplit("bipartite dims must be given")
        dims = rho.dims
    da, db = dims
    if da * db != m.shape[0] or m.shape[0] != m.shape[1]:
        raise BadSplit(f"operator of shape {m.shape} does not split as {da}x{db}")
    t = m.reshape(da, db, da, db)
    if trace_out == "A":
        out = np.einsum("ijik->jk", t)
    elif trace_out == "B":
        out = np.einsum("ijkj->ik", t)
    else:
        raise ValueError(f"trace_out must be 'A' or 'B', not {trace_out!r}")
    if isinstance(rho, DensityOperator):
        return density(out)
    return out


def expect(rho, op) -> float:
    """``Tr(rho op)`` for Hermitian ``op``; the imaginary residue is checked and dropped."""
    m = _as_matrix(rho)
    op = np.asarray(op)
    if op.shape != m.shape:
        raise DimensionMismatch(f"operator shape {op.shape} vs state shape {m.shape}")
    if not is_hermitian(op):
        raise NonHermitian("observable is not Hermitian")
    val = np.einsum("ij,ji->", m, op)
    if abs(val.imag) > 1e-10:
        raise NonHermitian(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def apply_kraus(m: np.ndarray, kraus: list[np.ndarray], dims: tuple[int, int], side: str = "B") -> np.ndarray:
    """Apply a channel given by Kraus operators to one side of a bipartite operator."""
    da, db = dims
    out = np.zeros_like(m, dtype=complex)
    for k in kraus:
        full = np.kron(np.eye(da), k) if side == "B" else np.kron(k, np.eye(db))
        out += full @ m @ full.conj().T
    return out


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre draw (used by tests and demos)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase fix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
