"""Monte Carlo order-detection experiments.

Every trial draws its noise from a stream keyed by ``(seed, N, trial)`` and
trials are scored in fixed-size blocks, so a report depends only on its
config: not on thread count or scheduling. Thread count is capped by the
``SG_CV_THREADS`` environment variable.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .design import DesignSpec, build_nested_basis
from .selection import _roundoff_floor, bic_scores, cv_scores, select_order_cv, smallest_argmin, smooth_series
from .signals import NoiseModel, cubic_grid, draw_noise, sample_kinematic

METHODS = ("cv", "bic_n", "bic_snr")
AXES = ("window_len", "noise_var", "p_i", "setting")
DEFAULT_TRIALS = 2000
BLOCK_SIZE = 250
CUBIC = (1.0, 0.0, 0.0, 0.01)

N_GRID = (6, 8, 10, 12, 16, 20, 24, 32, 40)
VARIANCE_GRID = tuple(10.0**-e for e in range(1, 11))


def thread_count() -> int:
    env = os.environ.get("SG_CV_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"SG_CV_THREADS must be a positive integer, got {env!r}") from None
        if value < 1:
            raise ValueError(f"SG_CV_THREADS must be a positive integer, got {env!r}")
        return value
    return os.cpu_count() or 1


def _fmt(v) -> str:
    if isinstance(v, (tuple, list)):
        return ";".join(_fmt(u) for u in v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep of the detection experiment.

    ``axis`` selects what ``values`` vary:

    * ``window_len``: N, with noise from the sigma/p_i fields
    * ``noise_var``: nominal variance sigma_w^2, at fixed ``window_len``
    * ``p_i``: impulsive probability, at fixed ``window_len``
    * ``setting``: ``(N, sigma_i_sq, p_i)`` triples

    The signal is the polynomial with ascending ``coefficients`` sampled on
    the centered integer grid; ``true_order`` defaults to its degree.
    """

    axis: str
    values: tuple
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    methods: tuple = METHODS
    window_len: int = 16
    sigma_w_sq: float = 1.0
    sigma_i_sq: float = 0.0
    p_i: float = 0.0
    coefficients: tuple = CUBIC
    true_order: int | None = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if not self.values:
            raise ValueError("sweep needs at least one axis value")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ValueError(f"methods must be a non-empty subset of {METHODS}")
        object.__setattr__(self, "values", tuple(tuple(v) if isinstance(v, list) else v for v in self.values))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if self.true_order is None:
            nz = np.flatnonzero(self.coefficients)
            object.__setattr__(self, "true_order", int(nz[-1]) if nz.size else 0)
        for value in self.values:
            n, noise = self.point(value)
            if n < self.true_order + 2:
                raise ValueError(f"N={n} cannot detect order {self.true_order}: need N >= {self.true_order + 2}")

    def point(self, value) -> tuple[int, NoiseModel]:
        if self.axis == "window_len":
            return int(value), NoiseModel(self.sigma_w_sq, self.sigma_i_sq, self.p_i)
        if self.axis == "noise_var":
            return self.window_len, NoiseModel(float(value), self.sigma_i_sq, self.p_i)
        if self.axis == "p_i":
            return self.window_len, NoiseModel(self.sigma_w_sq, self.sigma_i_sq, float(value))
        n, sigma_i_sq, p_i = value
        return int(n), NoiseModel(self.sigma_w_sq, float(sigma_i_sq), float(p_i))

    @classmethod
    def vs_n(cls, window_sizes=N_GRID, noise_var=1.0, **kw) -> "ExperimentConfig":
        return cls("window_len", tuple(window_sizes), sigma_w_sq=noise_var, **kw)

    @classmethod
    def vs_variance(cls, variances=VARIANCE_GRID, window_len=6, **kw) -> "ExperimentConfig":
        return cls("noise_var", tuple(variances), window_len=window_len, **kw)

    @classmethod
    def robustness(cls, settings, sigma_w_sq=1.0, **kw) -> "ExperimentConfig":
        return cls("setting", tuple(tuple(s) for s in settings), sigma_w_sq=sigma_w_sq, **kw)


@dataclass
class MethodStats:
    prob: float
    stderr: float
    histogram: np.ndarray
    trials: int

    @classmethod
    def from_orders(cls, orders: np.ndarray, true_order: int, n_orders: int) -> "MethodStats":
        hist = np.bincount(orders, minlength=n_orders)
        trials = int(orders.size)
        prob = hist[true_order] / trials
        return cls(float(prob), float(np.sqrt(prob * (1 - prob) / trials)), hist, trials)


@dataclass
class PointResult:
    axis_value: object
    window_len: int
    noise: NoiseModel
    stats: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    name: str
    config: ExperimentConfig
    points: list

    def point(self, axis_value) -> PointResult:
        for pt in self.points:
            if pt.axis_value == axis_value:
                return pt
        raise KeyError(axis_value)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["axis_value", "method", "prob", "stderr", "trials"])
        for pt in self.points:
            for method in self.config.methods:
                s = pt.stats[method]
                w.writerow([_fmt(pt.axis_value), method, _fmt(s.prob), _fmt(s.stderr), s.trials])
        return buf.getvalue()

    def to_json(self) -> str:
        cfg = asdict(self.config)
        doc = {
            "experiment": self.name,
            "config": cfg,
            "points": [
                {
                    "axis_value": pt.axis_value,
                    "window_len": pt.window_len,
                    "noise": asdict(pt.noise),
                    "methods": {
                        m: {
                            "prob": s.prob,
                            "stderr": s.stderr,
                            "trials": s.trials,
                            "histogram": [int(c) for c in s.histogram],
                        }
                        for m, s in pt.stats.items()
                    },
                }
                for pt in self.points
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _score_block(x, basis, noise, seed, trials, methods):
    n = x.size
    y = np.empty((n, len(trials)))
    for j, t in enumerate(trials):
        y[:, j] = x + draw_noise(noise, n, (seed, n, t))
    tpe, residual, _ = cv_scores(basis, y)
    x_norm_sq = np.einsum("nm,nm->m", y, y)
    out = {}
    if "cv" in methods:
        floor = _roundoff_floor(x_norm_sq, 1.0 / basis.complement_by_order)
        out["cv"] = smallest_argmin(tpe, floor)
    if "bic_n" in methods or "bic_snr" in methods:
        bic_n, bic_snr = bic_scores(residual, n, x_norm_sq)
        out["bic_n"] = np.argmin(bic_n, axis=0)
        out["bic_snr"] = np.argmin(bic_snr, axis=0)
    return {m: out[m] for m in methods}


def detect_orders(config: ExperimentConfig, n: int, noise: NoiseModel) -> dict:
    """Selected order of every trial at one sweep point, per method."""
    basis = build_nested_basis(DesignSpec(n, n - 2))
    x = np.polynomial.polynomial.polyval(cubic_grid(n), config.coefficients)
    blocks = [range(i, min(i + BLOCK_SIZE, config.trials)) for i in range(0, config.trials, BLOCK_SIZE)]
    args = (x, basis, noise, config.seed)
    with ThreadPoolExecutor(max_workers=min(thread_count(), len(blocks))) as pool:
        parts = list(pool.map(lambda b: _score_block(*args, b, config.methods), blocks))
    return {m: np.concatenate([p[m] for p in parts]) for m in config.methods}


def run_experiment(config: ExperimentConfig, name: str | None = None) -> ExperimentReport:
    points = []
    for value in config.values:
        n, noise = config.point(value)
        orders = detect_orders(config, n, noise)
        stats = {m: MethodStats.from_orders(o, config.true_order, n - 1) for m, o in orders.items()}
        points.append(PointResult(value, n, noise, stats))
    return ExperimentReport(name or config.axis, config, points)


def run_detection_vs_n(config: ExperimentConfig) -> ExperimentReport:
    if config.axis != "window_len":
        raise ValueError("detection-vs-N sweeps the window_len axis")
    return run_experiment(config, "vs-n")


def run_detection_vs_variance(config: ExperimentConfig) -> ExperimentReport:
    if config.axis != "noise_var":
        raise ValueError("detection-vs-variance sweeps the noise_var axis")
    return run_experiment(config, "vs-var")


def run_robustness_sweep(config: ExperimentConfig) -> ExperimentReport:
    return run_experiment(config, "robustness")


@dataclass
class BiasVarianceTrace:
    residual_norm: np.ndarray
    mean_gamma: np.ndarray
    tpe: np.ndarray
    best_order: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["order", "residual_norm", "mean_gamma", "tpe"])
        for p, row in enumerate(zip(self.residual_norm, self.mean_gamma, self.tpe)):
            w.writerow([p, *(_fmt(v) for v in row)])
        return buf.getvalue()


def run_bias_variance_trace(n: int = 16, seed: int = 0, noise_var: float = 1.0) -> BiasVarianceTrace:
    """Residual norm, mean leverage weight and CV score of one noisy cubic
    window for every order ``0..N-2``."""
    basis = build_nested_basis(DesignSpec(n, n - 2))
    y = np.polynomial.polynomial.polyval(cubic_grid(n), CUBIC) + draw_noise(NoiseModel(noise_var), n, (seed, n, 0))
    res = select_order_cv(y, basis)
    return BiasVarianceTrace(res.residual_norm_by_order, res.gamma_by_order.mean(axis=0), res.tpe_by_order, res.best_order)


@dataclass
class KinematicDemo:
    t: np.ndarray
    x_true: np.ndarray
    y: np.ndarray
    orders: np.ndarray
    smoothed: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x_true", "y", "order", "y_smooth"])
        for t, x, y, o, s in zip(self.t, self.x_true, self.y, self.orders, self.smoothed):
            edge = o < 0
            w.writerow([_fmt(t), _fmt(x), _fmt(y), "" if edge else int(o), "" if edge else _fmt(s)])
        return buf.getvalue()


def run_kinematic_demo(window_len: int = 5, p_max: int = 3, sample_period: float = 0.5,
                       noise_var: float = 0.01, seed: int = 0) -> KinematicDemo:
    """Sliding-window smoothing of the noisy kinematic trajectory with a
    CV-selected order per sample. ``noise_var`` is a presentation choice."""
    if window_len % 2 == 0:
        raise ValueError("window_len must be odd (centered window)")
    if not sample_period > 0:
        raise ValueError("sample_period must be positive")
    t = np.arange(0.0, 20.0 + sample_period / 2, sample_period)
    t = t[t <= 20.0]
    x = sample_kinematic(t)
    y = x + draw_noise(NoiseModel(noise_var), t.size, seed)
    orders, smoothed = smooth_series(y, window_len, p_max)
    return KinematicDemo(t, x, y, orders, smoothed)
