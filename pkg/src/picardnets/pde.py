"""Desk-scale experiment harness: reference solutions, error metrics, trends.

Problems are semilinear heat equations with diffusion coefficient c, either in
terminal form (u_t + c Lap(u) + f(u) = 0 with datum at t = horizon) or initial
form (u_t = c Lap(u) + f(u) with datum at t = 0). The estimator itself is
fixed to the terminal form with c = 1/2, so problems are first rescaled in
time (and initial-form problems flipped) before estimation. Closed-form
references exist for the squared-norm datum with zero or linear nonlinearity
and are gated by a finite-difference residual check before any experiment
runs.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .engine import MlpConfig, ProblemFns, mlp_estimate_batch
from .sampling import RandomOracle, box_points, brownian_increment

CSV_HEADER = ("n", "M", "seed", "p", "error", "wall_ms")


@dataclass(frozen=True)
class PdeProblem:
    """A semilinear heat problem on a box, with tagged nonlinearity and datum.

    f_kind: "zero", "linear" (f(u) = lam * u), or "custom" (callable f_custom
    with declared constant f_lipschitz). g_kind: "quadratic" (||x||^2),
    "gaussian-bump" (exp(-||x||^2)), or "custom" (callable g_custom).
    direction: "terminal" or "initial".
    """

    d: int
    horizon: float
    c: float
    f_kind: str = "zero"
    lam: float = 0.0
    f_custom: Callable[[float], float] | None = None
    f_lipschitz: float | None = None
    g_kind: str = "quadratic"
    g_custom: Callable[[np.ndarray], float] | None = None
    box: tuple[float, float] = (0.0, 1.0)
    direction: str = "terminal"

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError("horizon must be finite and positive")
        if not (np.isfinite(self.c) and self.c > 0):
            raise ValueError("diffusion coefficient must be finite and positive")
        if self.f_kind not in ("zero", "linear", "custom"):
            raise ValueError(f"unknown nonlinearity kind {self.f_kind!r}")
        if self.g_kind not in ("quadratic", "gaussian-bump", "custom"):
            raise ValueError(f"unknown datum kind {self.g_kind!r}")
        if self.direction not in ("terminal", "initial"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.f_kind == "custom" and self.f_custom is None:
            raise ValueError("custom nonlinearity needs f_custom")
        if self.g_kind == "custom" and self.g_custom is None:
            raise ValueError("custom datum needs g_custom")
        if not self.box[0] < self.box[1]:
            raise ValueError("box needs low < high")

    def f_callable(self) -> Callable[[float], float]:
        if self.f_kind == "zero":
            return lambda v: 0.0
        if self.f_kind == "linear":
            lam = self.lam
            return lambda v: lam * v
        return self.f_custom  # type: ignore[return-value]

    def f_lipschitz_constant(self) -> float | None:
        if self.f_kind == "zero":
            return 0.0
        if self.f_kind == "linear":
            return abs(self.lam)
        return self.f_lipschitz

    def g_callable(self) -> Callable[[np.ndarray], float]:
        if self.g_kind == "quadratic":
            return lambda x: float(x @ x)
        if self.g_kind == "gaussian-bump":
            return lambda x: float(np.exp(-(x @ x)))
        return self.g_custom  # type: ignore[return-value]


def reference_solution(problem: PdeProblem, t: float, x: object) -> float:
    """Closed form for the squared-norm datum with zero or linear nonlinearity.

    Terminal form: u(t, x) = exp(lam * (horizon - t)) * (||x||^2 + 2 c d (horizon - t)).
    Initial form:  u(t, x) = exp(lam * t) * (||x||^2 + 2 c d t).
    The linear factor cancels exactly against the nonlinearity term, so no
    further correction is needed; `pde_residual_check` verifies this.
    """
    if problem.g_kind != "quadratic" or problem.f_kind not in ("zero", "linear"):
        raise ValueError("closed-form reference needs the quadratic datum and zero/linear f")
    pt = np.asarray(x, dtype=np.float64)
    lam = problem.lam if problem.f_kind == "linear" else 0.0
    if problem.direction == "terminal":
        tau = problem.horizon - t
    else:
        tau = t
    if not 0.0 <= t <= problem.horizon:
        raise ValueError(f"time {t} outside [0, {problem.horizon}]")
    return math.exp(lam * tau) * (float(pt @ pt) + 2.0 * problem.c * problem.d * tau)


def pde_residual_check(
    problem: PdeProblem, n_probes: int = 16, h: float = 1.0e-3, tol: float = 1.0e-6
) -> float:
    """Max finite-difference residual of the closed-form reference on probe points.

    Central differences in time and space; raises when the residual exceeds
    `tol`, so experiments can hard-gate on a verified reference. Returns the
    measured maximum.
    """
    lam = problem.lam if problem.f_kind == "linear" else 0.0
    lo, hi = problem.box
    oracle = RandomOracle(20_160_913, problem.d)
    pts = box_points(oracle, n_probes, lo, hi)
    times = np.linspace(0.25 * problem.horizon, 0.75 * problem.horizon, 4)
    worst = 0.0
    for t in times:
        for row in pts:
            u_t = (
                reference_solution(problem, t + h, row) - reference_solution(problem, t - h, row)
            ) / (2.0 * h)
            lap = 0.0
            center = reference_solution(problem, t, row)
            for axis in range(problem.d):
                step = np.zeros(problem.d)
                step[axis] = h
                lap += (
                    reference_solution(problem, t, row + step)
                    - 2.0 * center
                    + reference_solution(problem, t, row - step)
                ) / h**2
            if problem.direction == "terminal":
                residual = u_t + problem.c * lap + lam * center
            else:
                residual = u_t - problem.c * lap - lam * center
            worst = max(worst, abs(residual))
    if worst > tol:
        raise ValueError(f"reference residual {worst:.3e} exceeds {tol:.1e}")
    return worst


@dataclass(frozen=True)
class EngineForm:
    """A problem mapped onto the estimator's native setting (terminal, c = 1/2).

    Time rescaling: v(s, x) = u(s / (2c), x) solves the c' = 1/2 equation with
    horizon 2 c * horizon and nonlinearity f / (2c). Initial-form problems are
    flipped first (w(t, x) = u(horizon - t, x)), which turns the datum at
    t = 0 into a terminal datum. `engine_time(t)` maps a native time to the
    engine's clock.
    """

    problem: PdeProblem
    horizon: float
    fns: ProblemFns
    time_scale: float

    def engine_time(self, t: float) -> float:
        if self.problem.direction == "terminal":
            return self.time_scale * t
        return self.time_scale * (self.problem.horizon - t)


def time_rescale(problem: PdeProblem) -> EngineForm:
    scale = 2.0 * problem.c
    f_native = problem.f_callable()
    g = problem.g_callable()
    fns = ProblemFns(
        f=lambda v: f_native(v) / scale,
        g=g,
        f_lipschitz=None
        if problem.f_lipschitz_constant() is None
        else problem.f_lipschitz_constant() / scale,
    )
    return EngineForm(
        problem=problem, horizon=scale * problem.horizon, fns=fns, time_scale=scale
    )


@dataclass(frozen=True)
class ErrorEstimate:
    p: float
    value: float
    stderr: float
    samples: int


def lp_error(
    reference: Callable[[np.ndarray], float],
    approximation: Callable[[np.ndarray], float],
    box: tuple[float, float],
    d: int,
    p: float,
    n_samples: int,
    seed: int,
) -> ErrorEstimate:
    """Monte Carlo estimate of the L^p distance under the uniform box measure.

    Returns ((1/N) sum |diff|^p)^(1/p) with a delta-method standard error. The
    power-mean inequality (the p/2 estimate never exceeds the p estimate on
    the same samples) is asserted on every call as a self-check.
    """
    if p <= 0 or n_samples < 1:
        raise ValueError("need p > 0 and at least one sample")
    oracle = RandomOracle(seed, d)
    pts = box_points(oracle, n_samples, box[0], box[1])
    diffs = np.abs(
        np.array([reference(row) - approximation(row) for row in pts], dtype=np.float64)
    )
    powered = diffs**p
    mean = float(powered.mean())
    value = mean ** (1.0 / p)
    if mean > 0.0:
        spread = float(powered.std(ddof=1)) / math.sqrt(n_samples) if n_samples > 1 else 0.0
        stderr = spread * (1.0 / p) * mean ** ((1.0 - p) / p)
    else:
        stderr = 0.0
    half = float((diffs ** (p / 2.0)).mean()) ** (2.0 / p)
    if half > value * (1.0 + 1.0e-12) + 1.0e-300:
        raise AssertionError(f"power-mean check failed: L^{p/2} {half} > L^{p} {value}")
    return ErrorEstimate(p=p, value=value, stderr=stderr, samples=n_samples)


def brownian_moment_check(
    d: int, s: float, gamma: int, n_samples: int, seed: int
) -> dict:
    """Compare sampled E||W_s||^(2 gamma) with the exact chi-squared moment.

    The exact value is (2 s)^gamma * prod_{k=0}^{gamma-1} (d/2 + k). Passes
    when the sampled mean is within max(3 standard errors, 3%) of exact.
    """
    if gamma < 1 or n_samples < 2:
        raise ValueError("need gamma >= 1 and at least two samples")
    oracle = RandomOracle(seed, d)
    values = np.empty(n_samples)
    for i in range(n_samples):
        w = brownian_increment(oracle, (i,), s)
        values[i] = (w @ w) ** gamma
    exact = (2.0 * s) ** gamma * math.prod(d / 2.0 + k for k in range(gamma))
    mean = float(values.mean())
    stderr = float(values.std(ddof=1)) / math.sqrt(n_samples)
    slack = max(3.0 * stderr, 0.03 * abs(exact))
    return {
        "d": d,
        "s": s,
        "gamma": gamma,
        "samples": n_samples,
        "sampled": mean,
        "exact": exact,
        "stderr": stderr,
        "passed": bool(abs(mean - exact) <= slack),
    }


def _experiment_row(
    form: EngineForm,
    level: tuple[int, int],
    seed: int,
    pts: np.ndarray,
    refs: np.ndarray,
    t_native: float,
    p: float,
) -> tuple:
    n, m = level
    cfg = MlpConfig(
        n=n, M=m, horizon=form.horizon, t=form.engine_time(t_native), d=form.problem.d
    )
    start = time.perf_counter()
    estimates = mlp_estimate_batch(cfg, pts, [seed], form.fns)[0]
    wall_ms = int(round((time.perf_counter() - start) * 1000.0))
    err = float(np.mean(np.abs(estimates - refs) ** p) ** (1.0 / p))
    return (n, m, seed, p, err, wall_ms)


def convergence_experiment(
    problem: PdeProblem,
    levels: Sequence[tuple[int, int]],
    seeds: Sequence[int],
    n_points: int,
    p: float,
    t_native: float = 0.0,
    workers: int = 1,
) -> list[tuple]:
    """One row per (level, seed): empirical L^p error against the reference.

    Evaluation points are the first `n_points` of the uniform box stream keyed
    by seeds[0]; they are shared by every row so errors are comparable. The
    reference is hard-gated by the finite-difference residual check. Rows come
    back in deterministic order (levels outer, seeds inner) no matter how many
    workers run; wall_ms is honest timing and is the one column that varies
    between runs. `t_native` is the problem-native evaluation time; for
    initial-form problems the interesting choice is the horizon, which the
    engine clock maps to 0.
    """
    if n_points < 1:
        raise ValueError("need at least one evaluation point")
    if not seeds:
        raise ValueError("need at least one seed")
    if not 0.0 <= t_native <= problem.horizon:
        raise ValueError(f"evaluation time {t_native} outside [0, {problem.horizon}]")
    native_eval_time = t_native
    pde_residual_check(problem)
    form = time_rescale(problem)
    oracle = RandomOracle(int(seeds[0]), problem.d)
    pts = box_points(oracle, n_points, problem.box[0], problem.box[1])
    refs = np.array([reference_solution(problem, native_eval_time, row) for row in pts])
    jobs = [(level, int(seed)) for level in levels for seed in seeds]
    if workers <= 1:
        rows = [
            _experiment_row(form, level, seed, pts, refs, native_eval_time, p)
            for level, seed in jobs
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_experiment_row, form, level, seed, pts, refs, native_eval_time, p)
                for level, seed in jobs
            ]
            rows = [f.result() for f in futures]
    return rows


def rows_to_csv(rows: Sequence[tuple]) -> str:
    """Render experiment rows as CSV with the pinned header and repr floats."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for n, m, seed, p, err, wall_ms in rows:
        writer.writerow([n, m, seed, repr(float(p)), repr(float(err)), wall_ms])
    return buf.getvalue()
