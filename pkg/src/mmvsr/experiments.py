"""Seeded Monte Carlo phase-transition experiments.

``run_phase`` sweeps m over a grid, sets the per-vector measurement count
from the target rate fraction

    ratio = log2(m) / (n * c(W))   =>   n = ceil(log2(m) / (ratio * c(W))),

runs independent decoding trials at each grid point, and reports exact
support-recovery error rates with Wilson 95% intervals. ratio < 1 operates
below the threshold rate (errors should shrink as m grows); ratio > 1
operates above it (errors stay bounded away from zero).

Decoder choices:

* ``ml``: the exact maximum-likelihood search for the schedule's known value
  matrix (decode_matched). The unconstrained least-squares scan badly
  overfits at the tiny n this scaling produces, so the optimal-map surrogate
  is the matched rule; the free-fit decoder remains available as
  ``decoders.decode_ml``.
* ``net``: the quantized threshold decoder with tolerance ``epsilon``.

Noise is canonicalized to sigma_z^2 = 1 and sigma_a^2 = alpha; error
statistics depend on the variances only through their ratio.

Reproducibility: trial t of grid point i draws from
``derive_rng(master_seed, i, t)``, so results are independent of trial
scheduling and thread count; per-point aggregation is a commutative error
counter.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .decoders import decode_matched, decode_net
from .errors import BudgetError, InvalidInputError
from .model import (
    ProblemConfig,
    SignalValueMatrix,
    accumulate_measurements,
    default_epsilon,
    derive_rng,
    sample_support,
)
from .threshold import c_of_w, split_sign_matrix

WILSON_Z = 1.959963984540054  # two-sided 95%

MAX_M = 512
MAX_K = 4
MAX_L = 4
MAX_TRIALS = 10**4


@dataclass(frozen=True)
class Schedule:
    """One phase-transition sweep specification."""

    w: SignalValueMatrix
    alpha: float
    m_grid: tuple
    ratio: float
    trials_per_point: int
    decoder: str = "ml"
    master_seed: int = 0
    epsilon: float | None = None
    budget: int = 10**8
    fixed_a: bool = False

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise InvalidInputError("alpha must be positive and finite")
        grid = tuple(int(m) for m in self.m_grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidInputError("m_grid must be non-empty and strictly increasing")
        if grid[0] < self.w.k:
            raise InvalidInputError("every m must be at least k")
        if grid[-1] > MAX_M:
            raise InvalidInputError(f"m capped at {MAX_M} for exhaustive decoding")
        if self.w.k > MAX_K or self.w.l > MAX_L:
            raise InvalidInputError(f"desk-scale caps: k <= {MAX_K}, l <= {MAX_L}")
        if not (self.ratio > 0 and math.isfinite(self.ratio)):
            raise InvalidInputError("ratio must be positive")
        if not (1 <= self.trials_per_point <= MAX_TRIALS):
            raise InvalidInputError(f"trials_per_point must be in [1, {MAX_TRIALS}]")
        if self.decoder not in ("ml", "net"):
            raise InvalidInputError("decoder must be 'ml' or 'net'")
        if self.epsilon is not None and not self.epsilon > 0:
            raise InvalidInputError("epsilon must be positive when given")
        object.__setattr__(self, "m_grid", grid)
        object.__setattr__(self, "trials_per_point", int(self.trials_per_point))


@dataclass(frozen=True)
class PhasePoint:
    m: int
    n: int
    trials: int
    errors: int | None
    error_rate: float | None
    wilson_halfwidth: float | None
    status: str  # "ok" | "skipped"


@dataclass(frozen=True)
class PhaseCurve:
    points: tuple
    ratio: float
    decoder: str
    c_of_w: float


def wilson_halfwidth(errors: int, trials: int, z: float = WILSON_Z) -> float:
    """Half-width of the Wilson 95% score interval for errors/trials."""
    if trials < 1:
        raise InvalidInputError("trials must be positive")
    p = errors / trials
    denom = 1.0 + z * z / trials
    return (z / denom) * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))


def spearman(x, y) -> float:
    """Spearman rank correlation with average ranks; 0.0 when degenerate."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    sx = rx.std()
    sy = ry.std()
    if sx == 0.0 or sy == 0.0:
        return 0.0
    return float(((rx - rx.mean()) * (ry - ry.mean())).mean() / (sx * sy))


def _average_ranks(values):
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _point_n(m: int, ratio: float, c_value: float) -> int:
    return int(math.ceil(math.log2(m) / (ratio * c_value)))


def _run_trial(schedule, cfg, point_index, t, fixed_A):
    rng = derive_rng(schedule.master_seed, point_index, t)
    w = schedule.w
    support = sample_support(cfg.m, w.k, rng)
    if fixed_A is None:
        A = rng.standard_normal((cfg.n, cfg.m)) * math.sqrt(cfg.sigma_a_sq)
    else:
        A = fixed_A
    Z = rng.standard_normal((cfg.n, w.l)) * math.sqrt(cfg.sigma_z_sq)
    Y = accumulate_measurements(A, support, w.entries, Z)
    if schedule.decoder == "ml":
        result = decode_matched(Y, A, w, budget=schedule.budget)
    else:
        result = decode_net(
            Y, A, w.k, cfg, epsilon=cfg.epsilon, budget=schedule.budget
        )
    return result.support != tuple(support.tolist())


def run_phase(schedule: Schedule, threads: int = 1, n_grid=None) -> PhaseCurve:
    """Estimate the error curve of a schedule.

    ``n_grid`` overrides the per-point measurement counts (used when several
    schedules must be compared at matched (m, n)); by default n follows the
    ratio rule above. A grid point whose decoder exceeds its search budget
    is reported with status "skipped" rather than being dropped.
    """
    c_value = c_of_w(schedule.w, schedule.alpha, 1.0).c_of_w
    if n_grid is not None and len(n_grid) != len(schedule.m_grid):
        raise InvalidInputError("n_grid must match m_grid length")
    eps = (
        schedule.epsilon
        if schedule.epsilon is not None
        else default_epsilon(schedule.alpha, 1.0)
    )
    points = []
    for i, m in enumerate(schedule.m_grid):
        n = int(n_grid[i]) if n_grid is not None else _point_n(m, schedule.ratio, c_value)
        cfg = ProblemConfig(
            m=m,
            n=n,
            sigma_a_sq=schedule.alpha,
            sigma_z_sq=1.0,
            epsilon=eps,
            seed=schedule.master_seed,
        )
        fixed_A = None
        if schedule.fixed_a:
            rng_a = derive_rng(schedule.master_seed, i)
            fixed_A = rng_a.standard_normal((n, m)) * math.sqrt(schedule.alpha)
        trials = schedule.trials_per_point
        try:
            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    flags = list(
                        pool.map(
                            lambda t: _run_trial(schedule, cfg, i, t, fixed_A),
                            range(trials),
                        )
                    )
            else:
                flags = [_run_trial(schedule, cfg, i, t, fixed_A) for t in range(trials)]
        except BudgetError:
            points.append(PhasePoint(m, n, trials, None, None, None, "skipped"))
            continue
        errors = int(sum(flags))
        points.append(
            PhasePoint(
                m,
                n,
                trials,
                errors,
                errors / trials,
                wilson_halfwidth(errors, trials),
                "ok",
            )
        )
    return PhaseCurve(tuple(points), schedule.ratio, schedule.decoder, c_value)


def compare_smv_mmv(
    k: int,
    alpha: float,
    m_grid,
    trials_per_point: int,
    master_seed: int = 0,
    ratio: float = 1.4,
    threads: int = 1,
) -> dict:
    """Single- versus multiple-vector error curves at matched (m, n).

    Three value matrices with equal column norms: all-ones single column,
    two identical all-ones columns, and the split-sign pair. One n per grid
    point is shared by all three cases so the curves are comparable; it is
    set from the single-vector threshold via the given ratio, which for
    ratio in (1, c_iii/c_i) lands between the single-vector and split-sign
    thresholds.
    """
    if k % 2 != 0:
        raise InvalidInputError("k must be even for the split-sign case")
    cases = {
        "smv": SignalValueMatrix(np.ones((k, 1))),
        "mmv-identical": SignalValueMatrix(np.ones((k, 2))),
        "mmv-split-sign": split_sign_matrix(k),
    }
    c_values = {name: c_of_w(w, alpha, 1.0).c_of_w for name, w in cases.items()}
    n_grid = [_point_n(m, ratio, c_values["smv"]) for m in m_grid]
    curves = {}
    for name, w in cases.items():
        schedule = Schedule(
            w=w,
            alpha=alpha,
            m_grid=tuple(m_grid),
            ratio=ratio,
            trials_per_point=trials_per_point,
            decoder="ml",
            master_seed=master_seed,
        )
        curves[name] = run_phase(schedule, threads=threads, n_grid=n_grid)
    return {"curves": curves, "c_values": c_values, "n_grid": n_grid}
