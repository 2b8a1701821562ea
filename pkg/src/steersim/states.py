"""Bipartite OAM qudit states: maximally entangled, isotropic, SPDC and noise channels."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadProbability, DegenerateSpectrum, DimensionMismatch
from .qlinalg import DensityOperator, apply_kraus

DEFAULT_SPIRAL_SIGMA = 4.0


def mode_labels(d: int) -> tuple[int, ...]:
    """OAM indices spanning the d-dimensional subspace, in increasing order.

    Odd ``d`` uses ``-(d-1)/2 .. (d-1)/2``; even ``d`` uses ``-d/2 .. d/2``
    without ``l = 0``.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if d % 2:
        h = (d - 1) // 2
        return tuple(range(-h, h + 1))
    h = d // 2
    return tuple(l for l in range(-h, h + 1) if l != 0)


class BipartiteState(DensityOperator):
    """Density operator on d x d with OAM labels; ``ket`` is kept for pure states."""

    def __init__(self, matrix, d: int, labels=None, ket=None):
        object.__setattr__(self, "labels", tuple(labels) if labels is not None else mode_labels(d))
        object.__setattr__(self, "ket", None if ket is None else np.asarray(ket, dtype=complex))
        super().__init__(matrix, (d, d))

    @property
    def d(self) -> int:
        return self.dims[0]

    def mixed_with(self, other: BipartiteState, weight: float) -> BipartiteState:
        """``weight * self + (1 - weight) * other``."""
        if other.dims != self.dims:
            raise DimensionMismatch("states live on different spaces")
        m = weight * self.matrix + (1 - weight) * other.matrix
        return BipartiteState(m, self.d, self.labels)

    def __repr__(self) -> str:
        kind = "pure" if self.ket is not None else "mixed"
        return f"BipartiteState(d={self.d}, {kind})"


def _from_ket(psi: np.ndarray, d: int, labels=None) -> BipartiteState:
    return BipartiteState(np.outer(psi, psi.conj()), d, labels, ket=psi)


def max_entangled_ket(d: int) -> np.ndarray:
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = 1 / np.sqrt(d)
    return psi


def max_entangled(d: int) -> BipartiteState:
    if d < 2:
        raise ValueError("d must be >= 2")
    return _from_ket(max_entangled_ket(d), d)


def _check_prob(p: float, name: str = "p", hi: float = 1.0) -> float:
    p = float(p)
    if not (0.0 <= p <= hi):
        raise BadProbability(f"{name}={p} outside [0, {hi}]")
    return p


def isotropic(d: int, p: float) -> BipartiteState:
    """``p |Phi+><Phi+| + (1 - p) I / d^2``."""
    p = _check_prob(p)
    psi = max_entangled_ket(d)
    m = p * np.outer(psi, psi.conj()) + (1 - p) * np.eye(d * d) / d ** 2
    return BipartiteState(m, d, ket=psi if p == 1 else None)


# -- spiral spectrum ---------------------------------------------------------

def gaussian_spectrum(sigma: float, labels) -> dict[int, complex]:
    """Unnormalized Gaussian spiral bandwidth ``c_l = exp(-l^2 / (2 sigma^2))``."""
    return {l: complex(np.exp(-(l ** 2) / (2 * sigma ** 2))) for l in labels}


def flat_spectrum(labels) -> dict[int, complex]:
    return {l: 1.0 + 0j for l in labels}


def read_spectrum_csv(path) -> dict[int, complex]:
    """Read rows ``l, re, im``; a header row and ``#`` comments are skipped."""
    spec = {}
    with open(Path(path), newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                l, re, im = (c.strip() for c in row[:3])
                spec[int(l)] = complex(float(re), float(im))
            except ValueError:
                if not spec:  # header
                    continue
                raise
    return spec


def spdc_state(spectrum: dict[int, complex], labels) -> BipartiteState:
    """Pure state ``sum_l c_l |l>_A |l>_B`` restricted to ``labels`` and renormalized."""
    labels = tuple(labels)
    c = np.array([spectrum.get(l, 0) for l in labels], dtype=complex)
    if np.any(np.abs(c) == 0):
        missing = [l for l, v in zip(labels, c) if v == 0]
        raise DegenerateSpectrum(f"spectrum vanishes on modes {missing}")
    c = c / np.linalg.norm(c)
    d = len(labels)
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = c
    return _from_ket(psi, d, labels)


def schmidt_amplitudes(state: BipartiteState) -> np.ndarray:
    """Amplitudes ``c_l`` of a pure state supported on the diagonal ``|l,l>``."""
    if state.ket is None:
        raise ValueError("state has no stored ket; not a pure diagonal state")
    d = state.d
    m = state.ket.reshape(d, d)
    off = m - np.diag(np.diag(m))
    if np.max(np.abs(off)) > 1e-12:
        raise ValueError("state is not of the form sum_l c_l |l,l>")
    return np.diag(m).copy()


def procrustean_concentrate(state: BipartiteState) -> tuple[BipartiteState, float]:
    """Local filtering to the maximally entangled state.

    Alice applies ``F = diag(min|c| / c_l)``, which attenuates the strong
    modes and removes the Schmidt phases.  Returns the post-selected state
    and the filter success probability ``d * min|c_l|^2``.
    """
    c = schmidt_amplitudes(state)
    if np.any(np.abs(c) == 0):
        raise DegenerateSpectrum("cannot concentrate a spectrum with empty modes")
    d = state.d
    cmin = np.abs(c).min()
    filt = cmin / c
    out = (c * filt)
    success = float(np.sum(np.abs(out) ** 2))
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = out / np.sqrt(success)
    return _from_ket(psi, d, state.labels), success


# -- crosstalk ---------------------------------------------------------------

def crosstalk_kraus(d: int, eps: float) -> list[np.ndarray]:
    """Kraus operators of the nearest-neighbour mode-hopping channel.

    A mode stays put with probability ``1 - 2 eps`` and moves to each adjacent
    label with probability ``eps``; a hop off either end of the label list is
    reflected back to the neighbouring mode.
    """
    eps = _check_prob(eps, "eps", 0.5)
    ops = [np.sqrt(1 - 2 * eps) * np.eye(d, dtype=complex)]
    if eps == 0 or d == 1:
        if d == 1:
            ops[0] = np.eye(1, dtype=complex)
        return ops
    up = np.zeros((d, d), dtype=complex)
    down = np.zeros((d, d), dtype=complex)
    for j in range(d - 1):
        up[j + 1, j] = 1
        down[j, j + 1] = 1
    up_edge = np.zeros((d, d), dtype=complex)
    down_edge = np.zeros((d, d), dtype=complex)
    up_edge[d - 2, d - 1] = 1
    down_edge[1, 0] = 1
    s = np.sqrt(eps)
    return ops + [s * up, s * up_edge, s * down, s * down_edge]


def crosstalk(state: BipartiteState, eps: float) -> BipartiteState:
    """Apply the mode-hopping channel to Bob's photon."""
    kraus = crosstalk_kraus(state.d, eps)
    if len(kraus) == 1:
        return state
    m = apply_kraus(state.matrix, kraus, state.dims, side="B")
    return BipartiteState(m, state.d, state.labels)


def source_state(d: int, spiral_sigma: float | None = None, spectrum: dict | None = None,
                 concentrate: bool = True) -> BipartiteState:
    """Entangled source feeding the experiment.

    ``spiral_sigma=None`` and no spectrum give the ideal flat source.  With a
    finite bandwidth the SPDC state is concentrated unless ``concentrate`` is
    False.
    """
    labels = mode_labels(d)
    if spectrum is None and spiral_sigma is None:
        return max_entangled(d)
    if spectrum is None:
        spectrum = gaussian_spectrum(spiral_sigma, labels)
    st = spdc_state(spectrum, labels)
    if concentrate:
        st, _ = procrustean_concentrate(st)
    return st
