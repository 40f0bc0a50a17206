"""Monte Carlo harness: acceptance rates, moment audits, scaling laws.

Trials are driven by per-trial derived seeds, so cells are reproducible
bit-for-bit given (plan, base_seed), trials can run in parallel without
coordination, and aggregates do not depend on completion order (each
cell's per-trial records are assembled in trial-index order before
aggregation).
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import norm as _norm

from .core import TesterConfig, compute_statistic, required_sample_size, threshold
from .distributions import DistributionSpec, Seed, covariance_of, sample
from .validation import check_positive, check_positive_int

__all__ = [
    "ExperimentPlan",
    "CellResult",
    "ExperimentResult",
    "MomentAudit",
    "NotAchievableError",
    "wilson_interval",
    "run_experiment",
    "empirical_sample_complexity",
    "moment_audit",
    "small_ball_ratio",
    "calibrate_cstar",
    "statistic_runtime_ns_per_sample_coord",
]

# alpha grid for the small-ball ratio estimator: 2^-10 .. 2^0
DEFAULT_ALPHA_GRID = tuple(2.0**k for k in range(-10, 1))


class NotAchievableError(RuntimeError):
    """Raised when the empirical sample-complexity search exhausts its range."""


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; well-behaved near 0 and 1."""
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must be in [0, trials], got {successes}/{trials}")
    trials = check_positive_int(trials, "trials")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    z = float(_norm.ppf(0.5 + confidence / 2.0))
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials)) / denom
    # the interval always contains phat in exact arithmetic; clamp out rounding
    return min(phat, max(0.0, center - half)), max(phat, min(1.0, center + half))


@dataclass(frozen=True)
class ExperimentPlan:
    """One grid of tester configs crossed with null/alternative specs.

    A (config, spec) cell exists for every pair with matching ``dim``;
    every spec and every config must participate in at least one cell.
    """

    name: str
    grid: tuple[TesterConfig, ...]
    null_spec: DistributionSpec | None
    alt_specs: tuple[DistributionSpec, ...] = ()
    trials: int = 1000
    base_seed: Seed = Seed(0)
    record_timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(self.grid))
        object.__setattr__(self, "alt_specs", tuple(self.alt_specs))
        if not self.name:
            raise ValueError("plan name must be nonempty")
        if not self.grid:
            raise ValueError("grid must contain at least one tester config")
        check_positive_int(self.trials, "trials")
        self.cells()  # validates the pairing

    def specs(self) -> tuple[tuple[str, DistributionSpec], ...]:
        out = []
        if self.null_spec is not None:
            out.append(("null", self.null_spec))
        out.extend(("alt", s) for s in self.alt_specs)
        return tuple(out)

    def cells(self) -> tuple[tuple[TesterConfig, DistributionSpec, str], ...]:
        specs = self.specs()
        if not specs:
            raise ValueError("plan needs a null_spec or at least one alt spec")
        cells = [
            (config, spec, role)
            for config in self.grid
            for role, spec in specs
            if spec.dim == config.dim
        ]
        paired_dims = {c.dim for c in self.grid}
        for role, spec in specs:
            if spec.dim not in paired_dims:
                raise ValueError(
                    f"{role} spec with dim={spec.dim} pairs with no grid entry "
                    f"(grid dims: {sorted(paired_dims)})"
                )
        spec_dims = {spec.dim for _, spec in specs}
        for config in self.grid:
            if config.dim not in spec_dims:
                raise ValueError(f"grid entry with dim={config.dim} pairs with no spec")
        return tuple(cells)


@dataclass(frozen=True)
class CellResult:
    config: TesterConfig
    spec: DistributionSpec
    role: str
    trials: int
    accept_rate: float
    wilson_ci: tuple[float, float]
    mean_z: float
    var_z: float
    mean_runtime_ns_per_sample_coord: float | None = None
    error: str | None = None

    @property
    def reject_rate(self) -> float:
        return 1.0 - self.accept_rate


@dataclass(frozen=True)
class ExperimentResult:
    plan_name: str
    cells: tuple[CellResult, ...]
    completed_trials: int

    @property
    def complete(self) -> bool:
        return all(c.error is None for c in self.cells)


def _run_trial(config: TesterConfig, spec: DistributionSpec, seed: Seed, record_timing: bool):
    """One trial: draw 2n rows, compute z, decide. Never raises; errors are
    returned so parallel schedules keep serial abort semantics."""
    try:
        n = config.n
        batch = sample(spec, 2 * n, seed)
        started = time.perf_counter_ns() if record_timing else 0
        stat = compute_statistic(batch[:n], batch[n:])
        elapsed = time.perf_counter_ns() - started if record_timing else 0
        accept = abs(stat.z) <= config.threshold
        ns_per = elapsed / (2.0 * n * config.dim) if record_timing else math.nan
        return stat.z, accept, ns_per, None
    except Exception as exc:  # noqa: BLE001 - diagnostic travels in the record
        return math.nan, False, math.nan, f"{type(exc).__name__}: {exc}"


def _aggregate_cell(config, spec, role, outcomes, record_timing) -> CellResult:
    """Reduce trial-index-ordered outcome records to one CellResult.

    A failed trial aborts the cell there; earlier trials still count and
    the diagnostic is recorded.
    """
    error = None
    completed = len(outcomes)
    for i, (_, _, _, err) in enumerate(outcomes):
        if err is not None:
            error = f"trial {i}: {err}"
            completed = i
            break
    zs = np.array([o[0] for o in outcomes[:completed]])
    accepts = int(sum(o[1] for o in outcomes[:completed]))
    if completed:
        rate = accepts / completed
        ci = wilson_interval(accepts, completed)
        mean_z = float(zs.mean())
        var_z = float(zs.var(ddof=1)) if completed > 1 else 0.0
    else:
        rate, ci, mean_z, var_z = math.nan, (math.nan, math.nan), math.nan, math.nan
    runtime = None
    if record_timing and completed:
        runtime = float(np.mean([o[2] for o in outcomes[:completed]]))
    return CellResult(
        config=config,
        spec=spec,
        role=role,
        trials=completed,
        accept_rate=rate,
        wilson_ci=ci,
        mean_z=mean_z,
        var_z=var_z,
        mean_runtime_ns_per_sample_coord=runtime,
        error=error,
    )


def run_experiment(plan: ExperimentPlan, parallelism: int = 1) -> ExperimentResult:
    """Run every (config, spec) cell of the plan for ``plan.trials`` trials.

    Trial t of cell c uses the derived seed base.for_trial(c * trials + t),
    so results are identical for any ``parallelism``.
    """
    parallelism = check_positive_int(parallelism, "parallelism")
    cells = plan.cells()
    results = []
    for cell_index, (config, spec, role) in enumerate(cells):
        seeds = [
            plan.base_seed.for_trial(cell_index * plan.trials + t) for t in range(plan.trials)
        ]
        if parallelism == 1:
            outcomes = [_run_trial(config, spec, s, plan.record_timing) for s in seeds]
        else:
            outcomes = Parallel(n_jobs=parallelism)(
                delayed(_run_trial)(config, spec, s, plan.record_timing) for s in seeds
            )
        results.append(_aggregate_cell(config, spec, role, outcomes, plan.record_timing))
    completed = min((c.trials for c in results), default=0)
    return ExperimentResult(plan_name=plan.name, cells=tuple(results), completed_trials=completed)


def _accept_rate(spec: DistributionSpec, n: int, trials: int, seed: Seed, stream: int) -> float:
    """Acceptance rate of the |z| <= sqrt(3 d)/n rule over seeded trials."""
    cutoff = threshold(spec.dim, n)
    accepts = 0
    base = (2 * n + stream) * trials
    for t in range(trials):
        batch = sample(spec, 2 * n, seed.for_trial(base + t))
        stat = compute_statistic(batch[:n], batch[n:])
        accepts += abs(stat.z) <= cutoff
    return accepts / trials


def empirical_sample_complexity(
    dim: int,
    epsilon: float,
    target: float,
    trials: int,
    seed: Seed,
    *,
    max_n: int = 1 << 20,
) -> int:
    """Smallest n (to within 5% relative) whose empirical completeness and
    soundness rates both reach ``target``.

    Completeness is measured on the standard normal null, soundness on the
    mean epsilon*e1 identity-covariance alternative, both with the
    sqrt(3 d)/n cutoff at each candidate n. Doubles n until both rates
    pass, then bisects.
    """
    dim = check_positive_int(dim, "dim")
    epsilon = check_positive(epsilon, "epsilon")
    trials = check_positive_int(trials, "trials")
    if not 0.5 < target < 1.0:
        raise ValueError(f"target must be in (0.5, 1), got {target}")

    null_spec = DistributionSpec.standard_normal(dim)
    alt_mean = np.zeros(dim)
    alt_mean[0] = epsilon
    alt_spec = DistributionSpec.gaussian(alt_mean)

    def passes(n: int) -> bool:
        # soundness binds at small n; evaluate it first and short-circuit
        reject = 1.0 - _accept_rate(alt_spec, n, trials, seed, stream=0)
        if reject < target:
            return False
        return _accept_rate(null_spec, n, trials, seed, stream=1) >= target

    lo, hi = 0, 1
    while not passes(hi):
        lo = hi
        hi *= 2
        if hi > max_n:
            reject = 1.0 - _accept_rate(alt_spec, max_n, trials, seed, stream=0)
            accept = _accept_rate(null_spec, max_n, trials, seed, stream=1)
            raise NotAchievableError(
                f"no n <= {max_n} reaches target {target} at dim={dim}, epsilon={epsilon} "
                f"(at n={max_n}: reject_rate={reject:.3f}, accept_rate={accept:.3f})"
            )
    while hi - lo > max(1, int(0.05 * hi)):
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class MomentAudit:
    mean_z: float
    var_z: float
    predicted_mean: float
    predicted_var: float


def moment_audit(spec: DistributionSpec, n: int, trials: int, seed: Seed) -> MomentAudit:
    """Empirical mean/variance of z against the closed-form predictions
    ||mu||^2 and ||Sigma||_F^2/n^2 + 2 mu^T Sigma mu / n.

    The variance formula is moment-level (it needs only the spec's mean and
    covariance, not Gaussianity) and reduces to d/n^2 for the standard
    normal null.
    """
    n = check_positive_int(n, "n")
    trials = check_positive_int(trials, "trials")
    if trials < 1000:
        raise ValueError(f"moment_audit needs trials >= 1000, got {trials}")
    zs = np.empty(trials)
    for t in range(trials):
        batch = sample(spec, 2 * n, seed.for_trial(t))
        zs[t] = compute_statistic(batch[:n], batch[n:]).z
    mu = spec.mean
    sigma = covariance_of(spec)
    predicted_mean = float(mu @ mu)
    predicted_var = float(np.sum(sigma * sigma) / n**2 + 2.0 * (mu @ sigma @ mu) / n)
    return MomentAudit(
        mean_z=float(zs.mean()),
        var_z=float(zs.var(ddof=1)),
        predicted_mean=predicted_mean,
        predicted_var=predicted_var,
    )


def small_ball_ratio(z_samples, alpha_grid=DEFAULT_ALPHA_GRID) -> float:
    """max over the alpha grid of P(|z| <= alpha * sqrt(E[z^2])) / sqrt(alpha),
    estimated from the given samples. The empirical counterpart of the
    quadratic anti-concentration constant, restricted to these samples."""
    z = np.asarray(z_samples, dtype=np.float64)
    if z.ndim != 1 or z.size < 2:
        raise ValueError("z_samples must be a 1-D array with at least 2 entries")
    l2 = math.sqrt(float(np.mean(z * z)))
    if l2 == 0.0:
        raise ValueError("z_samples are identically zero; small-ball ratio undefined")
    best = 0.0
    for alpha in alpha_grid:
        p = float(np.mean(np.abs(z) <= alpha * l2))
        best = max(best, p / math.sqrt(alpha))
    return best


def calibrate_cstar(dim: int, specs, trials: int, seed: Seed) -> float:
    """Empirical stand-in for the anti-concentration constant over a suite
    of adversarial alternative specs.

    For each spec, simulates z at the boundary-regime sample size
    (the rule evaluated at epsilon = ||mu|| with constant 1) and takes the
    worst small-ball ratio. Specs whose z is almost surely constant are
    skipped with a warning (the ratio is then undefined).
    """
    dim = check_positive_int(dim, "dim")
    trials = check_positive_int(trials, "trials")
    specs = tuple(specs)
    if not specs:
        raise ValueError("specs must be nonempty")
    best = None
    for i, spec in enumerate(specs):
        if spec.dim != dim:
            raise ValueError(f"spec {i} has dim={spec.dim}, expected {dim}")
        mu_norm = float(np.linalg.norm(spec.mean))
        if mu_norm == 0.0:
            raise ValueError(f"spec {i} has zero mean; calibration needs ||mu|| > 0")
        n = max(2, required_sample_size(mu_norm, dim, 1.0))
        zs = np.empty(trials)
        for t in range(trials):
            batch = sample(spec, 2 * n, seed.for_trial(i * trials + t))
            zs[t] = compute_statistic(batch[:n], batch[n:]).z
        if float(np.var(zs)) <= 1e-12 * float(np.mean(zs * zs)):
            warnings.warn(f"spec {i} produces an (almost) constant z; skipped", stacklevel=2)
            continue
        ratio = small_ball_ratio(zs)
        best = ratio if best is None else max(best, ratio)
    if best is None:
        raise ValueError("every spec was degenerate; nothing to calibrate")
    return best


def statistic_runtime_ns_per_sample_coord(
    n: int, dim: int, *, repeats: int = 5, seed: Seed = Seed(0)
) -> float:
    """Best-of-``repeats`` wall time of compute_statistic on an (n, dim)
    split, in nanoseconds per (sample x coordinate). Input generation is
    excluded from the timed region."""
    n = check_positive_int(n, "n")
    dim = check_positive_int(dim, "dim")
    repeats = check_positive_int(repeats, "repeats")
    batch = sample(DistributionSpec.standard_normal(dim), 2 * n, seed)
    half_x, half_y = batch[:n], batch[n:]
    best = math.inf
    for _ in range(repeats):
        started = time.perf_counter_ns()
        compute_statistic(half_x, half_y)
        best = min(best, time.perf_counter_ns() - started)
    return best / (2.0 * n * dim)
