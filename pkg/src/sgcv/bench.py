"""Runtime comparison of brute-force and order-recursive leave-one-out CV."""

from __future__ import annotations

import csv
import io
import platform
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .design import DesignSpec, _orthogonal_polynomials, build_nested_basis
from .selection import conventional_cv, select_order_cv
from .signals import rng

EQUALITY_RTOL = 1e-9
MIN_SAMPLE_NS = 20_000


class ImplementationMismatch(RuntimeError):
    """The two CV implementations disagree, so timing them is meaningless."""


@dataclass
class BenchRow:
    n: int
    conventional_us: float
    efficient_nogs_us: float
    efficient_gs_us: float

    @property
    def speedup_nogs(self) -> float:
        return self.conventional_us / self.efficient_nogs_us

    @property
    def speedup_gs(self) -> float:
        return self.conventional_us / self.efficient_gs_us


@dataclass
class BenchReport:
    rows: list
    reps: int
    environment: str = field(default_factory=lambda: (
        f"{platform.python_implementation()} {platform.python_version()}, numpy {np.__version__}, "
        f"{platform.system()} {platform.machine()}"
    ))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "conventional_us", "efficient_nogs_us", "efficient_gs_us", "speedup_nogs", "speedup_gs"])
        for r in self.rows:
            w.writerow([r.n, f"{r.conventional_us:.3f}", f"{r.efficient_nogs_us:.3f}",
                        f"{r.efficient_gs_us:.3f}", f"{r.speedup_nogs:.2f}", f"{r.speedup_gs:.2f}"])
        return buf.getvalue()


def _median_us(fn, reps: int) -> float:
    """Median wall time of ``fn`` in microseconds; calls shorter than the
    timer can resolve are batched and the batch time divided."""
    fn()
    batch = 1
    while True:
        t0 = time.perf_counter_ns()
        for _ in range(batch):
            fn()
        if time.perf_counter_ns() - t0 >= MIN_SAMPLE_NS:
            break
        batch *= 2
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        for _ in range(batch):
            fn()
        samples.append((time.perf_counter_ns() - t0) / batch)
    return statistics.median(samples) / 1e3


def verify_equal(x, spec: DesignSpec) -> None:
    fast = select_order_cv(x, build_nested_basis(spec))
    slow = conventional_cv(x, spec)
    if not np.allclose(fast.tpe_by_order, slow.tpe_by_order, rtol=EQUALITY_RTOL, atol=0.0) \
            or fast.best_order != slow.best_order:
        raise ImplementationMismatch(f"efficient and conventional CV disagree at N={spec.window_len}")


def _build_and_select(x, spec):
    _orthogonal_polynomials.cache_clear()
    return select_order_cv(x, build_nested_basis(spec))


def run_bench(sizes=(5, 10, 15, 20), reps: int = 1000, seed: int = 0) -> BenchReport:
    """Median runtimes at ``P_max = N - 2`` on one seeded random window per N.

    "nogs" reuses a precomputed basis; "gs" rebuilds it (QR included) on every
    call. Both implementations are checked for equal outputs first.
    """
    sizes = [int(n) for n in sizes]
    if not sizes or any(n < 5 for n in sizes):
        raise ValueError("benchmark sizes must all be >= 5")
    if reps < 1:
        raise ValueError("reps must be positive")
    inputs = {n: rng((seed, n)).standard_normal(n) for n in sizes}
    for n in sizes:
        verify_equal(inputs[n], DesignSpec(n, n - 2))
    rows = []
    for n in sizes:
        x, spec = inputs[n], DesignSpec(n, n - 2)
        basis = build_nested_basis(spec)
        rows.append(BenchRow(
            n,
            _median_us(lambda: conventional_cv(x, spec), reps),
            _median_us(lambda: select_order_cv(x, basis), reps),
            _median_us(lambda: _build_and_select(x, spec), reps),
        ))
    return BenchReport(rows, reps)
