"""Segmented quadratic-plus-linear regression of cumulative citation counts.

The model for rank ``x`` with parameters ``(b0, b1, b2, b3)`` is::

    f(x) = b0 + b1*x + b2*x**2                      if x <  z0
    f(x) = b0 + b1*z0 + b2*z0**2 + b3*(x - z0)      otherwise

where ``z0 = -b1 / (2*b2)`` is the vertex of the quadratic.  ``z0`` is the
sRM value: the estimated size of the set of most visible publications.

Fitting evaluates the sum of squared errors on a grid of starting values,
then refines the best few starts with a damped Gauss-Newton iteration on a
central-difference Jacobian.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateQuadratic,
    EmptyProfile,
    FitError,
    NoFeasibleSeed,
    SingularJacobian,
    TooFewPublications,
)
from .indicators import ScientistProfile

CLASSIC_GRID = (
    (35.0, 60.0),
    tuple(float(v) for v in range(20, 81, 10)),
    tuple(4.0 - 0.5 * i for i in range(17)),
    tuple(2.0 - 0.25 * i for i in range(17)),
)

SEED_GRIDS = ("adaptive", "classic", "explicit")

# Damping schedule for the Levenberg-style safeguard.
_LAMBDA_START = 1e-3
_LAMBDA_MIN = 1e-12
_LAMBDA_MAX = 1e16


@dataclass(frozen=True)
class CumulativeSeries:
    """Cumulative citation counts ``y`` at ranks ``x = 1..k``."""

    y: tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.y)
        if any(not math.isfinite(v) for v in values):
            raise ValueError("cumulative series must be finite")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError("cumulative series must be non-decreasing")
        object.__setattr__(self, "y", values)

    @property
    def k(self) -> int:
        return len(self.y)

    @property
    def x(self) -> np.ndarray:
        return np.arange(1, self.k + 1, dtype=float)

    def values(self) -> np.ndarray:
        return np.asarray(self.y, dtype=float)

    @property
    def points(self) -> list[tuple[int, float]]:
        return [(j, v) for j, v in enumerate(self.y, start=1)]


@dataclass(frozen=True)
class SrmParams:
    b0: float
    b1: float
    b2: float
    b3: float

    @property
    def z0(self) -> float:
        if self.b2 == 0:
            raise DegenerateQuadratic("b2 = 0: the quadratic has no vertex")
        return -self.b1 / (2.0 * self.b2)

    def as_array(self) -> np.ndarray:
        return np.array([self.b0, self.b1, self.b2, self.b3], dtype=float)

    @classmethod
    def from_array(cls, theta: Sequence[float]) -> "SrmParams":
        return cls(*(float(v) for v in theta))


@dataclass(frozen=True)
class FitConfig:
    tol: float = 1e-10
    step_tol: float = 1e-10
    max_iter: int = 200
    r2_threshold: float = 0.90
    min_publications: int = 15
    part_separation_ratio: float = 3.0
    seed_grid: str = "adaptive"
    # number of best grid points refined by Gauss-Newton
    n_starts: int = 16
    b0_seeds: tuple[float, ...] = ()
    b1_seeds: tuple[float, ...] = ()
    b2_seeds: tuple[float, ...] = ()
    b3_seeds: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.seed_grid not in SEED_GRIDS:
            raise ValueError(f"seed_grid must be one of {SEED_GRIDS}, got {self.seed_grid!r}")
        if self.seed_grid == "explicit" and not all(
            (self.b0_seeds, self.b1_seeds, self.b2_seeds, self.b3_seeds)
        ):
            raise ValueError("explicit seed_grid needs b0_seeds, b1_seeds, b2_seeds and b3_seeds")
        if self.tol <= 0 or self.step_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1 or self.n_starts < 1 or self.min_publications < 1:
            raise ValueError("max_iter, n_starts and min_publications must be >= 1")


PART_SEPARATION_NOTE = (
    "requirement (i) is operationalized as: fitted slope at rank 1 divided by "
    "|linear slope| >= part_separation_ratio, with a negative quadratic coefficient"
)


@dataclass(frozen=True)
class ApplicabilityReport:
    two_parts_distinguishable: bool
    converged: bool
    r_squared_above_threshold: bool
    breakpoint_in_range: bool
    enough_publications: bool
    reasons: tuple[str, ...] = ()
    slope_ratio: float | None = None
    r2_threshold: float = 0.90
    min_publications: int = 15
    part_separation_ratio: float = 3.0
    note: str = PART_SEPARATION_NOTE

    @property
    def flags(self) -> tuple[bool, bool, bool, bool, bool]:
        return (
            self.two_parts_distinguishable,
            self.converged,
            self.r_squared_above_threshold,
            self.breakpoint_in_range,
            self.enough_publications,
        )

    @property
    def overall(self) -> bool:
        return all(self.flags)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["overall"] = self.overall
        return d


@dataclass(frozen=True)
class SrmFit:
    params: SrmParams
    z0: float
    r_squared: float
    residual_variance: float
    sse: float
    converged: bool
    iterations: int
    seed_index: int
    applicability: ApplicabilityReport = field(compare=True)

    def predict(self, x) -> np.ndarray:
        return evaluate_model(self.params, x)

    def to_dict(self) -> dict:
        return {
            "params": asdict(self.params),
            "z0": self.z0,
            "r_squared": self.r_squared,
            "residual_variance": self.residual_variance,
            "sse": self.sse,
            "converged": self.converged,
            "iterations": self.iterations,
            "seed_index": self.seed_index,
            "applicability": self.applicability.to_dict(),
        }


def build_series(profile: ScientistProfile | Sequence[int]) -> CumulativeSeries:
    """Partial sums of the citation counts in descending order."""
    if not isinstance(profile, ScientistProfile):
        profile = ScientistProfile("", tuple(profile))
    if profile.n == 0:
        raise EmptyProfile(f"{profile.scientist_id or 'profile'} has no publications")
    return CumulativeSeries(tuple(itertools.accumulate(profile.citations)))


def _model(theta: np.ndarray, x: np.ndarray, quadratic: np.ndarray | None = None) -> np.ndarray:
    """Vectorized model; ``theta`` is ``(4,)`` or ``(m, 4)``.

    ``quadratic`` optionally pins which ranks use the quadratic branch instead
    of deciding it from each row's own ``z0``.
    """
    theta = np.asarray(theta, dtype=float)
    b0, b1, b2, b3 = (theta[..., i, None] for i in range(4))
    quad = b0 + b1 * x + b2 * x * x
    # b2 == 0 rows (possible in literal grids) yield nan and are infeasible anyway
    with np.errstate(divide="ignore", invalid="ignore"):
        z0 = -b1 / (2.0 * b2)
        lin = b0 + b1 * z0 + b2 * z0 * z0 + b3 * (x - z0)
    if quadratic is None:
        quadratic = x < z0
    return np.where(quadratic, quad, lin)


def evaluate_model(params: SrmParams, x):
    """Evaluate the segmented model at ``x`` (scalar or array).

    Raises ``DegenerateQuadratic`` when ``b2 == 0``.
    """
    params.z0  # raises on b2 == 0
    xs = np.asarray(x, dtype=float)
    out = _model(params.as_array(), np.atleast_1d(xs))
    out = out.reshape(np.shape(out)[-1:])
    if xs.ndim == 0:
        return float(out[0])
    return out


def _feasible(theta: np.ndarray, k: int) -> np.ndarray:
    theta = np.atleast_2d(theta)
    b1, b2 = theta[:, 1], theta[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        z0 = -b1 / (2.0 * b2)
    return (b2 < 0) & (z0 > 1) & (z0 < k) & np.all(np.isfinite(theta), axis=1)


def _sse(theta: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """SSE for each row of ``theta``; infeasible rows get ``inf``."""
    theta = np.atleast_2d(theta)
    resid = y - _model(theta, x)
    sse = np.einsum("ij,ij->i", resid, resid)
    return np.where(_feasible(theta, len(x)), sse, np.inf)


def seed_grid(y: CumulativeSeries | Sequence[float], config: FitConfig) -> np.ndarray:
    """Starting values as an ``(m, 4)`` array, in a fixed order."""
    if config.seed_grid == "classic":
        return np.array(list(itertools.product(*CLASSIC_GRID)), dtype=float)
    if config.seed_grid == "explicit":
        grids = (config.b0_seeds, config.b1_seeds, config.b2_seeds, config.b3_seeds)
        return np.array(list(itertools.product(*grids)), dtype=float)

    y = y.values() if isinstance(y, CumulativeSeries) else np.asarray(y, dtype=float)
    k = len(y)
    q = min(k, max(2, math.ceil(k / 4)))
    head_slope = y[q - 1] / q
    tail_slope = (y[-1] - y[k - q]) / max(q - 1, 1)
    b0_seeds = (0.0, y[0])
    b1_seeds = np.linspace(0.5, 2.0, 4) * head_slope
    # one candidate per rank interval in (2, k), thinned out for long series
    n_z = max(1, min(k - 2, 40))
    z_seeds = 2.0 + (k - 2.0) * (np.arange(n_z) + 0.5) / n_z
    b3_seeds = np.linspace(0.0, 1.0, 3) * tail_slope
    rows = []
    for b0 in b0_seeds:
        for b1 in b1_seeds:
            for z in z_seeds:
                for b3 in b3_seeds:
                    rows.append((b0, b1, -b1 / (2.0 * z), b3))
    return np.array(rows, dtype=float)


@dataclass
class _Refined:
    theta: np.ndarray
    sse: float
    iterations: int
    converged: bool


def _jacobian(theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Central-difference Jacobian of the model, shape ``(k, 4)``.

    The branch of every rank is frozen at ``theta`` so that a probe never
    straddles the break point when ``z0`` sits next to a rank.
    """
    steps = 1e-6 * np.maximum(1.0, np.abs(theta))
    probes = np.concatenate([theta + np.diag(steps), theta - np.diag(steps)])
    f = _model(probes, x, quadratic=x < -theta[1] / (2.0 * theta[2]))
    return ((f[:4] - f[4:]) / (2.0 * steps[:, None])).T


def _refine(theta: np.ndarray, x: np.ndarray, y: np.ndarray, sst: float, config: FitConfig) -> _Refined:
    """Damped Gauss-Newton from one feasible starting point."""
    theta = theta.astype(float)
    sse = float(_sse(theta, x, y)[0])
    exact = 1e-24 * max(sst, 1.0)
    lam = _LAMBDA_START
    if sse <= exact:
        return _Refined(theta, sse, 0, True)

    for it in range(1, config.max_iter + 1):
        resid = y - _model(theta, x)
        jac = _jacobian(theta, x)
        jtj = jac.T @ jac
        grad = jac.T @ resid
        scale = np.maximum(np.diag(jtj), 1e-12 * max(np.max(np.diag(jtj)), 1.0))
        accepted = False
        solved_any = False
        smallest_step = np.inf
        while lam <= _LAMBDA_MAX:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(scale), grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            if not np.all(np.isfinite(step)):
                lam *= 10.0
                continue
            solved_any = True
            step_norm = np.linalg.norm(step)
            smallest_step = min(smallest_step, step_norm)
            candidate = theta + step
            new_sse = float(_sse(candidate, x, y)[0])
            if new_sse < sse:
                accepted = True
                break
            lam *= 10.0

        if not solved_any:
            raise SingularJacobian("normal equations stayed singular under maximal damping")
        small_step = config.step_tol * (1.0 + np.linalg.norm(theta))
        if not accepted:
            # no decrease even for vanishing steps: stationary to working precision
            return _Refined(theta, sse, it, bool(smallest_step < small_step))

        rel_change = (sse - new_sse) / sse
        # a short step forced by heavy damping says nothing about optimality
        undamped = lam <= 1.0
        theta, sse = candidate, new_sse
        lam = max(lam / 10.0, _LAMBDA_MIN)
        if sse <= exact or (undamped and (rel_change < config.tol or step_norm < small_step)):
            return _Refined(theta, sse, it, True)

    return _Refined(theta, sse, config.max_iter, False)


def _solve_at_breakpoint(z0: float, x: np.ndarray, y: np.ndarray) -> np.ndarray | None:
    """Exact least squares for ``(b0, b2, b3)`` with the break point held at ``z0``.

    With ``z0`` fixed, ``b1 = -2*b2*z0`` and the model is linear in the rest.
    """
    quad = x < z0
    design = np.column_stack(
        [np.ones_like(x), np.where(quad, x * x - 2.0 * z0 * x, -z0 * z0), np.where(quad, 0.0, x - z0)]
    )
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    b0, b2, b3 = coef
    if not b2 < 0:
        return None
    return np.array([b0, -2.0 * b2 * z0, b2, b3])


def _polish(result: _Refined, x: np.ndarray, y: np.ndarray) -> _Refined:
    """Settle a refinement that stopped with ``z0`` on a data rank.

    The objective has a kink wherever ``z0`` crosses a rank; a minimum sitting
    exactly on it stalls the damped iteration, which can then no longer move
    the remaining coefficients.  Pinning ``z0`` to that rank leaves a linear
    problem.
    """
    z0 = -result.theta[1] / (2.0 * result.theta[2])
    rank = round(z0)
    if abs(z0 - rank) > 1e-6 * max(1.0, abs(z0)) or not 1 < rank < len(x):
        return result
    theta = _solve_at_breakpoint(float(rank), x, y)
    if theta is None:
        return result
    sse = float(_sse(theta, x, y)[0])
    if sse < result.sse:
        return _Refined(theta, sse, result.iterations, result.converged)
    return result


def fit(series: CumulativeSeries, config: FitConfig | None = None) -> SrmFit:
    """Least-squares fit of the segmented model to a cumulative series.

    Raises
    ------
    TooFewPublications
        ``series.k`` is below ``config.min_publications``.
    NoFeasibleSeed
        No grid point has ``b2 < 0`` with the vertex inside ``(1, k)``.
    SingularJacobian
        Every refinement hit singular normal equations.
    """
    return fit_values(series.y, config)


def fit_values(y: Sequence[float], config: FitConfig | None = None) -> SrmFit:
    """Same as :func:`fit` for raw observations at ranks ``1..k``.

    Unlike :class:`CumulativeSeries` the values need not be monotone, which
    is what perturbed (noisy) test data looks like.
    """
    config = config or FitConfig()
    y = np.asarray(y, dtype=float)
    k = len(y)
    if k < config.min_publications:
        raise TooFewPublications(f"k={k} publications, at least {config.min_publications} required")
    x = np.arange(1, k + 1, dtype=float)
    sst = float(np.sum((y - y.mean()) ** 2))

    grid = seed_grid(y, config)
    grid_sse = _sse(grid, x, y) if len(grid) else np.empty(0)
    feasible = np.flatnonzero(np.isfinite(grid_sse))
    if feasible.size == 0:
        raise NoFeasibleSeed("no starting value has b2 < 0 with 1 < z0 < k")
    order = feasible[np.argsort(grid_sse[feasible], kind="stable")]

    best: tuple[tuple[float, int, int], _Refined] | None = None
    singular = 0
    for seed_index in order[: config.n_starts]:
        try:
            result = _polish(_refine(grid[seed_index], x, y, sst, config), x, y)
        except SingularJacobian:
            singular += 1
            continue
        key = (result.sse, result.iterations, int(seed_index))
        if best is None or key < best[0]:
            best = (key, result)
    if best is None:
        raise SingularJacobian(f"all {singular} refinements had singular normal equations")

    (_, _, seed_index), result = best
    params = SrmParams.from_array(result.theta)
    sse = result.sse
    r_squared = max(0.0, 1.0 - sse / sst) if sst > 0 else 0.0
    provisional = SrmFit(
        params=params,
        z0=params.z0,
        r_squared=r_squared,
        residual_variance=sse / max(k - 4, 1),
        sse=sse,
        converged=result.converged,
        iterations=result.iterations,
        seed_index=seed_index,
        applicability=ApplicabilityReport(False, False, False, False, False),
    )
    report = _applicability(k, provisional, config)
    return replace(provisional, applicability=report)


REASONS = {
    "two_parts_distinguishable": "(i) parts not distinguishable",
    "converged": "(ii) not converged",
    "r_squared_above_threshold": "(iii) R2 below threshold",
    "breakpoint_in_range": "(iv) break point out of range",
    "enough_publications": "(v) too few publications",
}


def _report(config: FitConfig, slope_ratio: float | None = None, **flags: bool) -> ApplicabilityReport:
    reasons = tuple(REASONS[name] for name in REASONS if not flags[name])
    return ApplicabilityReport(
        **flags,
        reasons=reasons,
        slope_ratio=slope_ratio,
        r2_threshold=config.r2_threshold,
        min_publications=config.min_publications,
        part_separation_ratio=config.part_separation_ratio,
    )


def check_applicability(
    series: CumulativeSeries, fit: SrmFit, config: FitConfig | None = None
) -> ApplicabilityReport:
    return _applicability(series.k, fit, config or FitConfig())


def _applicability(k: int, fit: SrmFit, config: FitConfig) -> ApplicabilityReport:
    p = fit.params
    initial_slope = p.b1 + 2.0 * p.b2
    if p.b3 == 0:
        slope_ratio = math.inf if initial_slope > 0 else 0.0
    else:
        slope_ratio = initial_slope / abs(p.b3)
    return _report(
        config,
        slope_ratio=slope_ratio,
        two_parts_distinguishable=bool(p.b2 < 0 and slope_ratio >= config.part_separation_ratio),
        converged=bool(fit.converged),
        r_squared_above_threshold=bool(fit.r_squared > config.r2_threshold),
        breakpoint_in_range=bool(1 <= fit.z0 <= k),
        enough_publications=bool(k >= config.min_publications),
    )


@dataclass(frozen=True)
class SrmOutcome:
    """Fit (if one could be produced) plus the applicability verdict."""

    series: CumulativeSeries
    fit: SrmFit | None
    applicability: ApplicabilityReport
    error: str | None = None

    @property
    def srm_value(self) -> float | None:
        if self.fit is None or not self.applicability.overall:
            return None
        return self.fit.z0


def assess(series: CumulativeSeries, config: FitConfig | None = None) -> SrmOutcome:
    """Fit and judge applicability without raising on per-series failures.

    A failed fit is mapped onto the requirement it violates: too few
    publications to (v), no feasible seed to (i), singular equations to (ii).
    Requirements that could not be evaluated are reported as not met.
    """
    config = config or FitConfig()
    try:
        result = fit(series, config)
    except FitError as exc:
        cause = {
            TooFewPublications: "enough_publications",
            NoFeasibleSeed: "two_parts_distinguishable",
            SingularJacobian: "converged",
        }[type(exc)]
        flags = {name: False for name in REASONS}
        flags["enough_publications"] = series.k >= config.min_publications
        report = _report(config, **flags)
        report = replace(report, reasons=(REASONS[cause],))
        return SrmOutcome(series, None, report, error=str(exc))
    return SrmOutcome(series, result, result.applicability)
