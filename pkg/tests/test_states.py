import numpy as np
import pytest

from steersim.errors import BadProbability, DegenerateSpectrum
from steersim.qlinalg import partial_trace, random_density
from steersim.states import (BipartiteState, crosstalk, crosstalk_kraus, flat_spectrum, gaussian_spectrum,
                             isotropic, max_entangled, mode_labels, procrustean_concentrate,
                             read_spectrum_csv, source_state, spdc_state)
from steersim.steering import steering_functional


def test_mode_labels():
    assert mode_labels(5) == (-2, -1, 0, 1, 2)
    assert mode_labels(4) == (-2, -1, 1, 2)
    assert mode_labels(1) == (0,)
    assert mode_labels(11) == tuple(range(-5, 6))
    assert 0 not in mode_labels(8) and len(mode_labels(8)) == 8


def test_max_entangled():
    st = max_entangled(2)
    assert np.allclose(st.ket, np.array([1, 0, 0, 1]) / np.sqrt(2))
    for d in (2, 3, 11):
        st = max_entangled(d)
        assert abs(st.purity() - 1) < 1e-12
        assert np.allclose(partial_trace(st, trace_out="A").matrix, np.eye(d) / d, atol=1e-12)


def test_isotropic_limits_and_spectrum():
    assert np.allclose(isotropic(3, 1).matrix, max_entangled(3).matrix)
    assert np.allclose(isotropic(3, 0).eigvals(), 1 / 9)
    ev = np.sort(isotropic(4, 0.5).eigvals())
    assert abs(ev[-1] - 0.53125) < 1e-12
    assert np.allclose(ev[:-1], 0.03125, atol=1e-12)
    with pytest.raises(BadProbability):
        isotropic(3, 1.2)


@pytest.mark.parametrize("d", [2, 5, 7])
def test_isotropic_affine(d):
    rng = np.random.default_rng(d)
    for _ in range(5):
        p1, p2, a = rng.uniform(size=3)
        lhs = isotropic(d, a * p1 + (1 - a) * p2).matrix
        rhs = a * isotropic(d, p1).matrix + (1 - a) * isotropic(d, p2).matrix
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_spdc_state():
    labels = mode_labels(3)
    assert np.allclose(spdc_state(flat_spectrum(labels), labels).matrix, max_entangled(3).matrix)
    st = spdc_state(gaussian_spectrum(3.0, labels), labels)
    w = np.array([np.exp(-1 / 9), 1, np.exp(-1 / 9)])
    w /= w.sum()
    assert np.allclose(np.abs(np.diag(st.ket.reshape(3, 3))) ** 2, w, atol=1e-12)
    with pytest.raises(DegenerateSpectrum):
        spdc_state({-1: 1, 0: 0, 1: 1}, labels)


def test_procrustean():
    st, prob = procrustean_concentrate(max_entangled(4))
    assert prob == pytest.approx(1, abs=1e-12)
    amp = {-1: np.sqrt(0.8), 1: np.sqrt(0.2)}
    st, prob = procrustean_concentrate(spdc_state(amp, mode_labels(2)))
    assert prob == pytest.approx(0.4, abs=1e-12)
    fid = abs(np.vdot(max_entangled(2).ket, st.ket)) ** 2
    assert abs(fid - 1) < 1e-10


def test_procrustean_random_spectra():
    rng = np.random.default_rng(7)
    for d in (3, 5, 11):
        labels = mode_labels(d)
        amps = rng.uniform(0.1, 1, d) * np.exp(2j * np.pi * rng.uniform(size=d))
        st, prob = procrustean_concentrate(spdc_state(dict(zip(labels, amps)), labels))
        assert np.allclose(partial_trace(st, trace_out="A").matrix, np.eye(d) / d, atol=1e-10)
        w = np.abs(amps) ** 2 / np.sum(np.abs(amps) ** 2)
        assert prob == pytest.approx(d * w.min(), rel=1e-12)


def hopping_matrix(d, eps):
    t = np.eye(d) * (1 - 2 * eps)
    for j in range(d):
        for step in (-1, 1):
            k = j + step
            if k < 0 or k >= d:
                k = j - step  # reflected
            t[k, j] += eps
    return t


def test_crosstalk_population_transfer():
    d, eps = 5, 0.15
    t = hopping_matrix(d, eps)
    kraus = crosstalk_kraus(d, eps)
    assert np.allclose(sum(k.conj().T @ k for k in kraus), np.eye(d))
    for j in range(d):
        rho = np.zeros((d, d))
        rho[j, j] = 1
        out = sum(k @ rho @ k.conj().T for k in kraus)
        assert np.allclose(np.diag(out).real, t[:, j])


def test_crosstalk_channel_properties():
    st = max_entangled(3)
    assert crosstalk(st, 0) is st
    rng = np.random.default_rng(11)
    for _ in range(5):
        st = BipartiteState(random_density(16, rng), 4)
        out = crosstalk(st, rng.uniform(0, 0.5))
        assert abs(np.trace(out.matrix) - 1) < 1e-12
        assert out.eigvals().min() > -1e-12
    with pytest.raises(BadProbability):
        crosstalk(st, 0.6)


def test_crosstalk_lowers_functional():
    st = max_entangled(3)
    before = steering_functional(st).S
    after = steering_functional(crosstalk(st, 0.1)).S
    assert before == pytest.approx(4)
    assert after < before - 0.1


def test_source_state_and_spectrum_csv(tmp_path):
    assert np.allclose(source_state(5).matrix, max_entangled(5).matrix)
    raw = source_state(5, spiral_sigma=2.0, concentrate=False)
    conc = source_state(5, spiral_sigma=2.0)
    assert raw.purity() == pytest.approx(1)
    assert np.allclose(conc.matrix, max_entangled(5).matrix, atol=1e-12)
    f = tmp_path / "spec.csv"
    f.write_text("l,re,im\n-1,0.6,0\n1,0.8,0.0\n")
    assert read_spectrum_csv(f) == {-1: 0.6 + 0j, 1: 0.8 + 0j}
