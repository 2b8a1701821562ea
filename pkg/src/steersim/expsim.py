"""Monte Carlo model of the coincidence experiment.

Three pieces:

* Poissonian coincidence counting for a given bipartite state.
* The hologram pool: the entangled preparation ("grating") mixed with the
  ``(d+1) d^2`` product preparations whose average is ``I / d^2``.  The grating
  is shown with frame probability ``P = p / (p + (1-p) d)`` and yields
  coincidences at ``d`` times the rate of a product hologram, so the
  detected events come from the entangled state with probability ``p``.
* A sweep over ``p`` followed by a weighted straight-line fit whose crossing
  with the LHS bound gives the empirical noise threshold.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace, asdict

import numpy as np

from .errors import (BadProbability, ConfigError, DimensionMismatch, EmptyTable, SingularFit,
                     UnsupportedDimension)
from .mub import SUPPORTED_DIMS, MubFamily, build_mubs, conjugate_family
from .qlinalg import apply_kraus
from .states import (BipartiteState, crosstalk, crosstalk_kraus, max_entangled_ket, read_spectrum_csv,
                     source_state)
from .steering import SteeringReport, joint_table, lhs_bound

ERROR_METHODS = ("poisson", "repeat")
NOISE_MODELS = ("pool", "direct")


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    p: float = 1.0
    counts: int = 100_000
    seed: int = 0
    eps_crosstalk: float = 0.0
    spiral_sigma: float | None = None  # None means a flat spectrum
    concentrate: bool = True
    error_method: str = "poisson"
    repeats: int = 10
    noise_model: str = "pool"
    exact: bool = False
    spectrum_file: str | None = None

    def validate(self) -> ExperimentConfig:
        if self.d not in SUPPORTED_DIMS:
            raise UnsupportedDimension(f"d={self.d} is not a supported prime power {SUPPORTED_DIMS}")
        errs = {}
        if not 0 <= self.p <= 1:
            errs["p"] = f"{self.p} outside [0, 1]"
        if self.counts < 1:
            errs["counts"] = "must be >= 1"
        if not 0 <= self.seed < 2 ** 64:
            errs["seed"] = "must be a 64-bit unsigned integer"
        if not 0 <= self.eps_crosstalk <= 0.5:
            errs["eps_crosstalk"] = f"{self.eps_crosstalk} outside [0, 0.5]"
        if self.spiral_sigma is not None and not self.spiral_sigma > 0:
            errs["spiral_sigma"] = "must be positive or 'flat'"
        if self.error_method not in ERROR_METHODS:
            errs["error_method"] = f"expected one of {ERROR_METHODS}"
        if self.repeats < 2 and self.error_method == "repeat":
            errs["repeats"] = "repeat-trials needs at least 2 runs"
        if self.noise_model not in NOISE_MODELS:
            errs["noise_model"] = f"expected one of {NOISE_MODELS}"
        if errs:
            raise ConfigError("invalid experiment config: " + "; ".join(f"{k}: {v}" for k, v in errs.items()), errs)
        return self

    def to_dict(self) -> dict:
        return asdict(self)


def make_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Independent stream for sweep point ``index`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


# -- coincidence tables ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoincidenceTable:
    x: int
    counts: np.ndarray  # (d, d), [alice outcome, bob outcome]

    @property
    def total(self):
        return self.counts.sum()


def simulate_coincidences(rho, fam: MubFamily, x: int, N: float, rng: np.random.Generator) -> CoincidenceTable:
    """Independent Poisson counts with means ``N * P(a, b | x, x)``."""
    probs = joint_table(rho, fam, x)
    return CoincidenceTable(x, rng.poisson(N * np.clip(probs, 0, None)))


def expected_tables(rho, fam: MubFamily, N: float) -> list[CoincidenceTable]:
    """Noise-free tables holding the mean counts."""
    return [CoincidenceTable(x, N * joint_table(rho, fam, x)) for x in range(len(fam))]


def _setting_estimates(tables) -> tuple[np.ndarray, np.ndarray]:
    s, tot = [], []
    for t in tables:
        c = np.asarray(t.counts, dtype=float)
        total = c.sum()
        if not total > 0:
            raise EmptyTable(f"setting {t.x} recorded no coincidences")
        s.append(np.trace(c) / total)
        tot.append(total)
    return np.array(s), np.array(tot)


def estimate_functional(tables) -> SteeringReport:
    """Plug-in estimate of the functional from per-setting tables.

    The uncertainty propagates independent Poisson errors through the
    per-setting normalization: with ``D`` diagonal and ``O`` off-diagonal
    counts, ``var(D / (D + O)) = D O / (D + O)^3``.
    """
    tables = list(tables)
    if not tables:
        raise EmptyTable("no tables")
    d = np.asarray(tables[0].counts).shape[0]
    s, tot = _setting_estimates(tables)
    var = s * (1 - s) / tot
    return SteeringReport.from_value(d, len(tables), float(s.sum()), float(math.sqrt(var.sum())))


def estimate_repeat(runs) -> SteeringReport:
    """Mean over repeated runs with the standard error of that mean."""
    runs = [list(r) for r in runs]
    if len(runs) < 2:
        raise ValueError("need at least two runs")
    vals = np.array([_setting_estimates(r)[0].sum() for r in runs])
    d = np.asarray(runs[0][0].counts).shape[0]
    return SteeringReport.from_value(d, len(runs[0]), float(vals.mean()),
                                     float(vals.std(ddof=1) / math.sqrt(len(vals))))


# -- hologram pool -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HologramPool:
    """Time-multiplexed state preparations.

    Element 0 is the grating, which passes the entangled source ``source``.
    Elements ``1 .. (d+1) d^2`` prepare ``alice[i] (x) bob[i]``: first all
    computational pairs ``|l_i l_j>``, then ``|phi_x^a phi_x^b>`` for every
    non-computational basis ``x``.
    """

    d: int
    p: float
    grating_prob: float
    source: np.ndarray
    alice: np.ndarray
    bob: np.ndarray
    probabilities: np.ndarray = field(repr=False)

    @property
    def n_elements(self) -> int:
        return len(self.probabilities)

    @property
    def rates(self) -> np.ndarray:
        """Relative coincidence rate per frame of each element."""
        r = np.ones(self.n_elements)
        r[0] = self.d
        return r

    @property
    def event_weights(self) -> np.ndarray:
        """Probability that a detected event originates from each element."""
        w = self.probabilities * self.rates
        return w / w.sum()


def grating_probability(d: int, p: float) -> float:
    return p / (p + (1 - p) * d)


def hologram_pool(d: int, p: float, source: np.ndarray | None = None,
                  fam: MubFamily | None = None) -> HologramPool:
    p = float(p)
    if not 0 <= p <= 1:
        raise BadProbability(f"p={p} outside [0, 1]")
    fam = build_mubs(d) if fam is None else fam
    source = max_entangled_ket(d) if source is None else np.asarray(source, dtype=complex)
    eye = np.eye(d, dtype=complex)
    ii, jj = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    alice = [eye[ii.ravel()]]
    bob = [eye[jj.ravel()]]
    for x in range(1, d + 1):
        v = fam.vectors[x]
        alice.append(v[ii.ravel()])
        bob.append(v[jj.ravel()])
    alice = np.concatenate(alice)
    bob = np.concatenate(bob)
    P = grating_probability(d, p)
    n_prod = (d + 1) * d * d
    probs = np.concatenate([[P], np.full(n_prod, (1 - P) / n_prod)])
    return HologramPool(d, p, P, source, alice, bob, probs)


def pool_average_state(pool: HologramPool) -> BipartiteState:
    """Event-weighted mixture of every prepared state in the pool."""
    w = pool.event_weights
    prod = np.einsum("ni,nj->nij", pool.alice, pool.bob).reshape(len(pool.alice), -1)
    m = w[0] * np.outer(pool.source, pool.source.conj())
    m = m + (prod.T * w[1:]) @ prod.conj()
    return BipartiteState(m, pool.d)


def _element_tables(pool: HologramPool, fam: MubFamily, x: int, kraus) -> np.ndarray:
    """Outcome distributions ``(n_elements, d, d)`` of every pool element for setting ``x``."""
    d = pool.d
    src = np.outer(pool.source, pool.source.conj())
    if len(kraus) > 1:
        src = apply_kraus(src, kraus, (d, d))
    first = joint_table(src, fam, x)
    alice_basis = fam.vectors[x]
    bob_basis = conjugate_family(fam).vectors[x]
    pa = np.abs(pool.alice @ alice_basis.conj().T) ** 2  # (n, d)
    pb = sum(np.abs((pool.bob @ k.T) @ bob_basis.conj().T) ** 2 for k in kraus)
    rest = pa[:, :, None] * pb[:, None, :]
    return np.concatenate([first[None], rest])


def simulate_pool_run(pool: HologramPool, fam: MubFamily, N: float, rng: np.random.Generator,
                      eps_crosstalk: float = 0.0) -> list[CoincidenceTable]:
    """Event-level simulation of the pool, one table per setting.

    Per setting the number of events from each element is Poisson with mean
    ``N * event_weight``; each event's outcome pair is then drawn from that
    element's distribution.  Summed over elements every cell is an
    independent Poisson count, as in :func:`simulate_coincidences`.
    """
    if fam.d != pool.d:
        raise DimensionMismatch("pool and MUB family dimensions differ")
    kraus = crosstalk_kraus(pool.d, eps_crosstalk)
    w = pool.event_weights
    tables = []
    for x in range(len(fam)):
        dist = _element_tables(pool, fam, x, kraus).reshape(pool.n_elements, -1)
        dist = np.clip(dist, 0, None)
        dist /= dist.sum(axis=1, keepdims=True)
        n_events = rng.poisson(N * w)
        live = n_events > 0
        counts = rng.multinomial(n_events[live], dist[live]).sum(axis=0)
        tables.append(CoincidenceTable(x, counts.reshape(pool.d, pool.d)))
    return tables


# -- full runs ---------------------------------------------------------------------

def _source_for(cfg: ExperimentConfig) -> BipartiteState:
    spectrum = None
    if cfg.spectrum_file:
        spectrum = read_spectrum_csv(cfg.spectrum_file)
    return source_state(cfg.d, cfg.spiral_sigma, spectrum, cfg.concentrate)


def model_state(cfg: ExperimentConfig) -> BipartiteState:
    """Exact state reaching the detectors under ``cfg``."""
    src = _source_for(cfg)
    d = cfg.d
    m = cfg.p * src.matrix + (1 - cfg.p) * np.eye(d * d) / d ** 2
    return crosstalk(BipartiteState(m, d, src.labels), cfg.eps_crosstalk)


def _one_run(cfg: ExperimentConfig, fam: MubFamily, rng: np.random.Generator) -> list[CoincidenceTable]:
    if cfg.noise_model == "pool":
        src = _source_for(cfg)
        pool = hologram_pool(cfg.d, cfg.p, src.ket, fam)
        return simulate_pool_run(pool, fam, cfg.counts, rng, cfg.eps_crosstalk)
    rho = model_state(cfg)
    return [simulate_coincidences(rho, fam, x, cfg.counts, rng) for x in range(len(fam))]


def run_experiment(cfg: ExperimentConfig, rng: np.random.Generator | None = None,
                   fam: MubFamily | None = None) -> tuple[SteeringReport, list[CoincidenceTable]]:
    """Simulate one data-taking run and estimate the functional.

    Returns the report and the coincidence tables (expected counts in exact
    mode, the first run's tables in repeat-trials mode).
    """
    cfg.validate()
    fam = build_mubs(cfg.d) if fam is None else fam
    rng = make_rng(cfg.seed) if rng is None else rng
    if cfg.exact:
        rho = model_state(cfg)
        tables = expected_tables(rho, fam, cfg.counts)
        s = sum(float(np.trace(joint_table(rho, fam, x))) for x in range(len(fam)))
        return SteeringReport.from_value(cfg.d, len(fam), s), tables
    if cfg.error_method == "repeat":
        runs = [_one_run(cfg, fam, rng) for _ in range(cfg.repeats)]
        return estimate_repeat(runs), runs[0]
    tables = _one_run(cfg, fam, rng)
    return estimate_functional(tables), tables


# -- sweep and fit -------------------------------------------------------------------

def fit_line(x, y, sigma=None) -> tuple[float, float, np.ndarray]:
    """Weighted least-squares line ``y = slope * x + intercept``.

    With positive ``sigma`` the weights are ``1 / sigma^2`` and the
    covariance is absolute.  Without uncertainties (or if any is zero) an
    ordinary fit is done and the covariance is scaled by the residual
    variance.  Returns ``(slope, intercept, cov)`` with cov ordered the same.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(np.unique(x)) < 2:
        raise SingularFit("need at least two distinct abscissae")
    a = np.column_stack([x, np.ones_like(x)])
    weighted = sigma is not None and np.all(np.asarray(sigma) > 0)
    w = 1 / np.asarray(sigma, dtype=float) ** 2 if weighted else np.ones_like(x)
    aw = a * w[:, None]
    normal = a.T @ aw
    cov = np.linalg.inv(normal)
    beta = cov @ (aw.T @ y)
    if not weighted:
        dof = len(x) - 2
        resid = y - a @ beta
        cov = cov * (resid @ resid / dof if dof > 0 else 0.0)
    return float(beta[0]), float(beta[1]), cov


@dataclass(frozen=True, eq=False)
class SweepResult:
    d: int
    p: np.ndarray
    S: np.ndarray
    S_sigma: np.ndarray
    slope: float
    intercept: float
    cov: np.ndarray
    p_min: float
    p_min_sigma: float
    lhs_bound: float

    def rows(self):
        return [(float(p), float(s), float(e)) for p, s, e in zip(self.p, self.S, self.S_sigma)]

    def summary(self) -> dict:
        return {
            "d": self.d,
            "slope": self.slope,
            "intercept": self.intercept,
            "covariance": [[float(v) for v in row] for row in self.cov],
            "p_min": self.p_min,
            "p_min_sigma": self.p_min_sigma,
            "lhs_bound": self.lhs_bound,
            "n_points": len(self.p),
        }


def threshold_crossing(slope: float, intercept: float, cov: np.ndarray, level: float) -> tuple[float, float]:
    """Abscissa where the line reaches ``level`` with first-order error propagation."""
    if slope == 0:
        raise SingularFit("flat fit never crosses the bound")
    p0 = (level - intercept) / slope
    grad = np.array([-(level - intercept) / slope ** 2, -1 / slope])
    var = float(grad @ cov @ grad)
    return float(p0), math.sqrt(max(var, 0.0))


def sweep_and_fit(cfg: ExperimentConfig, p_list, workers: int = 1) -> SweepResult:
    """Run the experiment at each ``p`` and fit ``S(p)`` with a weighted line.

    Point ``i`` uses the RNG stream ``(cfg.seed, i)``, so results do not
    depend on ``workers``.
    """
    p_arr = np.asarray(sorted(float(p) for p in p_list))
    if len(np.unique(p_arr)) < 2:
        raise SingularFit("sweep needs at least two distinct p values")
    if np.any(np.diff(p_arr) == 0):
        raise ConfigError("duplicate p values in sweep", {"p_range": "values must be distinct"})
    cfg.validate()
    fam = build_mubs(cfg.d)

    def point(i):
        return run_experiment(replace(cfg, p=float(p_arr[i])), make_rng(cfg.seed, i), fam)[0]

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            reports = list(ex.map(point, range(len(p_arr))))
    else:
        reports = [point(i) for i in range(len(p_arr))]
    S = np.array([r.S for r in reports])
    sig = np.array([r.S_sigma for r in reports])
    slope, intercept, cov = fit_line(p_arr, S, sig)
    lb = lhs_bound(cfg.d)
    p_min, p_min_sigma = threshold_crossing(slope, intercept, cov, lb)
    return SweepResult(cfg.d, p_arr, S, sig, slope, intercept, cov, p_min, p_min_sigma, lb)


def parse_p_range(spec: str) -> np.ndarray:
    """``"start:stop:step"`` with ``stop`` included (within half a step)."""
    try:
        start, stop, step = (float(s) for s in spec.split(":"))
    except ValueError:
        raise ConfigError(f"bad p-range {spec!r}; expected start:stop:step", {"p_range": spec}) from None
    if step <= 0:
        raise ConfigError("p-range step must be positive", {"p_range": spec})
    if stop < start:
        raise ConfigError("p-range stop below start", {"p_range": spec})
    n = int(math.floor((stop - start) / step + 0.5)) + 1
    vals = np.round(start + step * np.arange(n), 12)
    if vals.min() < 0 or vals.max() > 1:
        raise ConfigError("p-range leaves [0, 1]", {"p_range": spec})
    return vals
