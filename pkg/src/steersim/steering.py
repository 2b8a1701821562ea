"""n-setting linear steering functional, its bounds and noise thresholds.

Alice measures basis ``x`` of a MUB family, Bob measures the complex
conjugate of the same basis (equivalently the transposed projectors).  The
functional sums the same-outcome probabilities over all settings:

    S = sum_x sum_a P(a, a | x, x)

Quantum bound ``d + 1``, LHS bound ``1 + sqrt(d)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange
from .mub import MubFamily, build_mubs, conjugate_family
from .qlinalg import DensityOperator, partial_trace


# -- closed forms --------------------------------------------------------------

def lhs_bound(d: int) -> float:
    return 1 + math.sqrt(d)


def quantum_bound(d: int) -> float:
    return float(d + 1)


def violation(d: int) -> float:
    """Ideal degree of violation ``(1 + d) / (1 + sqrt(d))``."""
    return quantum_bound(d) / lhs_bound(d)


def violation_from_S(S: float, d: int) -> float:
    return S / lhs_bound(d)


def two_setting_violation_max(d: int) -> float:
    """Largest violation reachable with the 2-setting linear criterion; always < 2."""
    return 2 / (1 + 1 / math.sqrt(d))


def s_iso_theory(d: int, p: float) -> float:
    return (d + 1) * (p + (1 - p) / d)


def p_min_theory(d: int) -> float:
    """Smallest pure-state weight of an isotropic state that still violates ``S <= 1 + sqrt(d)``."""
    return (d ** 1.5 - 1) / (d ** 2 - 1)


def p_min_two_setting(d: int) -> float:
    return 0.5 * (1 + (math.sqrt(d) - 1) / (d - 1))


# -- report ----------------------------------------------------------------------

@dataclass(frozen=True)
class SteeringReport:
    d: int
    n_settings: int
    S: float
    S_sigma: float = 0.0
    lhs_bound: float | None = None
    quantum_bound: float | None = None
    V: float | None = None
    V_sigma: float | None = None

    @classmethod
    def from_value(cls, d: int, n_settings: int, S: float, S_sigma: float = 0.0) -> SteeringReport:
        # bounds are only known for the complete family
        if n_settings != d + 1:
            return cls(d, n_settings, float(S), float(S_sigma))
        lb = lhs_bound(d)
        return cls(d, n_settings, float(S), float(S_sigma), lb, quantum_bound(d),
                   S / lb, S_sigma / lb)

    @property
    def violates(self) -> bool | None:
        return None if self.lhs_bound is None else self.S > self.lhs_bound

    def to_dict(self) -> dict:
        return asdict(self)


# -- probabilities -------------------------------------------------------------

def _matrix(rho):
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)


def _dim(rho, fam: MubFamily) -> int:
    m = _matrix(rho)
    if m.shape != (fam.d ** 2, fam.d ** 2):
        raise DimensionMismatch(f"state of shape {m.shape} does not match MUB dimension {fam.d}")
    return fam.d


def conditional_state(rho, proj) -> tuple[np.ndarray, float]:
    """Bob's subnormalized state ``Tr_A[(proj (x) I) rho]`` and its trace."""
    m = _matrix(rho)
    proj = np.asarray(proj)
    da = proj.shape[0]
    if m.shape[0] % da:
        raise DimensionMismatch(f"projector of size {da} does not divide state size {m.shape[0]}")
    db = m.shape[0] // da
    op = np.kron(proj, np.eye(db)) @ m
    sigma = partial_trace(op, (da, db), trace_out="A")
    return sigma, float(np.trace(sigma).real)


def joint_table(rho, fam: MubFamily, x: int) -> np.ndarray:
    """``P[a, b] = <phi_x^a, conj(phi_x^b)| rho |phi_x^a, conj(phi_x^b)>`` for setting ``x``."""
    d = _dim(rho, fam)
    if not 0 <= x < len(fam):
        raise IndexOutOfRange(f"setting {x} outside 0..{len(fam) - 1}")
    alice = fam.vectors[x].T
    bob = conjugate_family(fam).vectors[x].T
    w = np.kron(alice, bob)
    m = _matrix(rho)
    p = np.einsum("ic,ij,jc->c", w.conj(), m, w).real
    return p.reshape(d, d)


def joint_prob(rho, fam: MubFamily, x: int, a: int) -> float:
    """``Tr[(A_{a|x} (x) A_{a|x}^T) rho]``."""
    _dim(rho, fam)
    if not 0 <= a < fam.d:
        raise IndexOutOfRange(f"outcome {a} outside 0..{fam.d - 1}")
    v = np.kron(fam.vector(x, a), conjugate_family(fam).vector(x, a))
    return float(np.real(v.conj() @ _matrix(rho) @ v))


def steering_functional(rho, fam: MubFamily | None = None) -> SteeringReport:
    if fam is None:
        d = int(round(math.sqrt(_matrix(rho).shape[0])))
        fam = build_mubs(d)
    d = _dim(rho, fam)
    S = sum(float(np.trace(joint_table(rho, fam, x))) for x in range(len(fam)))
    return SteeringReport.from_value(d, len(fam), S)


# -- LHS oracle ----------------------------------------------------------------

def _lhs_objective(fam: MubFamily, psi: np.ndarray) -> tuple[float, np.ndarray]:
    probs = np.abs(fam.vectors.conj() @ psi) ** 2  # (n, d)
    return float(probs.max(axis=1).sum()), probs.argmax(axis=1)


def lhs_max_numeric(fam: MubFamily, restarts: int = 20, tol: float = 1e-12,
                    rng: np.random.Generator | int | None = 0, max_iter: int = 500) -> float:
    """Best deterministic-LHS value ``max_psi sum_x max_a |<phi_x^a|psi>|^2`` found.

    Each restart alternates between picking Alice's best outcome per setting
    and replacing ``psi`` by the top eigenvector of the summed projectors.
    Both steps never decrease the objective, so every restart ends at a local
    maximum; the result is the largest over restarts.
    """
    rng = np.random.default_rng(rng)
    d = fam.d
    best = -np.inf
    for _ in range(max(1, restarts)):
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi /= np.linalg.norm(psi)
        val, choice = _lhs_objective(fam, psi)
        for _ in range(max_iter):
            sel = fam.vectors[np.arange(len(fam)), choice]  # (n, d)
            m = sel.T @ sel.conj()
            w, v = np.linalg.eigh(m)
            psi = v[:, -1]
            new_val, new_choice = _lhs_objective(fam, psi)
            done = new_val - val <= tol and np.array_equal(new_choice, choice)
            val, choice = max(val, new_val), new_choice
            if done:
                break
        best = max(best, val)
    return float(best)
