"""Greedy reduced-model construction driven by an error estimator.

Each iteration grows the bases with moment-matching blocks at the current
expansion points, rebuilds the reduced models, sweeps the training set with
the chosen estimator, and moves the expansion points to the samples where
the estimate (or the relevant part of it) is worst:

* the main point follows the full estimate and grows the primal basis V
  (and, in the standard variant, the dual basis V_du);
* an alpha point grows the auxiliary basis behind the estimator's second
  part (dual-residual basis for Delta2, primal-residual basis for
  Delta1Pr/Delta2Pr/Delta3/Delta3Pr);
* a beta point grows the primal-residual-residual basis (Delta3Pr only);
* with ``symmetric_variant`` the dual basis gets its own gamma point
  instead of sharing the main point, the fix for (nearly) symmetric
  systems where shared points make the dual basis collapse onto the
  primal one and Delta1-type estimates vanish spuriously.

Auxiliary bases always contain the bases they serve: the same raw blocks
appended to V are appended to V_rpr and V_rrpr, and the raw dual blocks to
V_rdu, before their own points contribute. That keeps the span-containment
rules exact at every iteration.
"""

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    AllSamplesSingularError,
    SingularAtSampleError,
    SingularReducedSystemError,
)
from .estimators import EstimatorKind, EstimatorWorkspace, evaluate, true_error
from .moments import DEFAULT_MAX_BLOCK_COLUMNS, krylov_block, multimoment_block
from .projection import Basis
from .reports import EffectivityReport, EffectivityRow
from .system import LAPLACE

__all__ = [
    "GreedyConfig",
    "InitialPoints",
    "IterationRecord",
    "GreedyResult",
    "StopReason",
    "SelectedPoints",
    "run_greedy",
    "select_points",
    "validate",
]

_SYMMETRIC_KINDS = (
    EstimatorKind.DELTA_1,
    EstimatorKind.DELTA_2,
    EstimatorKind.DELTA_2PR,
)


@dataclass(frozen=True)
class InitialPoints:
    """Training-set indices seeding the expansion points (None = default)."""

    main: int = 0
    alpha: int | None = None  # default: last sample
    beta: int | None = None  # default: middle sample
    gamma: int | None = None  # default: middle sample


@dataclass
class GreedyConfig:
    kind: EstimatorKind
    training_set: list
    tolerance: float = 1e-3
    max_iterations: int = 30
    q: int | None = None
    symmetric_variant: bool = False
    initial_points: InitialPoints = field(default_factory=InitialPoints)
    record_true_errors: bool | None = None
    deflation_tol: float = 1e-10
    max_block_columns: int = DEFAULT_MAX_BLOCK_COLUMNS
    n_random: int = 20
    rng_seed: int = 0

    def __post_init__(self):
        if not isinstance(self.kind, EstimatorKind):
            self.kind = EstimatorKind.from_name(self.kind)
        self.training_set = [dict(p) for p in self.training_set]
        if not self.training_set:
            raise ValueError("training set must not be empty")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.symmetric_variant and self.kind not in _SYMMETRIC_KINDS:
            raise ValueError(
                "the separate-dual-point variant is only defined for "
                f"{[k.value for k in _SYMMETRIC_KINDS]}, not {self.kind.value}"
            )
        m = len(self.training_set)
        for label, index in (
            ("main", self.initial_points.main),
            ("alpha", self.initial_points.alpha),
            ("beta", self.initial_points.beta),
            ("gamma", self.initial_points.gamma),
        ):
            if index is not None and not 0 <= index < m:
                raise ValueError(f"initial {label} index {index} outside training set of size {m}")


@dataclass
class IterationRecord:
    iteration: int
    main_point: dict
    alpha_point: dict | None
    beta_point: dict | None
    gamma_point: dict | None
    max_estimate: float
    max_true_error: float | None
    rom_dimension: int


class StopReason(Enum):
    TOLERANCE_MET = "tolerance_met"
    MAX_ITERATIONS = "max_iterations"
    STAGNATION_ALL_POINTS_USED = "stagnation_all_points_used"


@dataclass
class GreedyResult:
    workspace: EstimatorWorkspace
    trace: list
    converged: bool
    stop_reason: StopReason
    skipped_samples: list = field(default_factory=list)


@dataclass(frozen=True)
class SelectedPoints:
    """Training-set indices chosen for the next iteration's expansions."""

    main: int
    alpha: int | None = None
    beta: int | None = None
    gamma: int | None = None


def _argmax(scores):
    """Index of the largest non-None score; ties break to the lowest index."""
    best, best_index = None, None
    for i, value in enumerate(scores):
        if value is None:
            continue
        if best is None or value > best:
            best, best_index = value, i
    return best_index


def select_points(kind, symmetric_variant, breakdowns):
    """Expansion-point indices from a sweep's per-sample breakdowns.

    ``breakdowns`` is aligned with the training set; entries may be None
    for samples skipped as singular. The main point maximizes the total
    estimate; the auxiliary points maximize the quantity their basis is
    meant to improve (the estimator's second part, a residual norm, or
    its first part).
    """
    if not isinstance(kind, EstimatorKind):
        kind = EstimatorKind.from_name(kind)
    totals = [b.total if b is not None else None for b in breakdowns]
    main = _argmax(totals)
    if main is None:
        raise AllSamplesSingularError("no usable sample in the training set")

    def across(getter):
        return _argmax([getter(b) if b is not None else None for b in breakdowns])

    alpha = beta = gamma = None
    if kind in (EstimatorKind.DELTA_2, EstimatorKind.DELTA_2PR):
        alpha = across(lambda b: b.part2)
    elif kind is EstimatorKind.DELTA_1PR:
        alpha = across(lambda b: b.aux.get("r_rpr_norm"))
    elif kind in (EstimatorKind.DELTA_3, EstimatorKind.DELTA_3PR):
        alpha = across(lambda b: b.part1)
    if kind is EstimatorKind.DELTA_3PR:
        beta = across(lambda b: b.part2)
    if symmetric_variant:
        if kind is EstimatorKind.DELTA_1:
            gamma = across(lambda b: b.aux.get("r_du_norm"))
        elif kind in (EstimatorKind.DELTA_2, EstimatorKind.DELTA_2PR):
            gamma = across(lambda b: b.part1)
    return SelectedPoints(main=main, alpha=alpha, beta=beta, gamma=gamma)


def _sweep_threads():
    raw = os.environ.get("ROMGRID_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


class _GreedyState:
    """Mutable bookkeeping for one run (bases, active samples, points)."""

    def __init__(self, sys, config):
        self.sys = sys
        self.config = config
        self.kind = config.kind
        self.samples = config.training_set
        self.active = [True] * len(self.samples)
        self.parametric = sys.is_parametric
        self.q = config.q if config.q is not None else (1 if self.parametric else 3)
        if self.parametric and self.q < 0:
            raise ValueError("parametric moment level must be >= 0")
        if not self.parametric and self.q < 1:
            raise ValueError("frequency-only moment level count must be >= 1")
        self.dual_sys = sys.dual() if self.kind.needs_dual else None

        n = sys.order
        self.V = Basis.empty(n, "V")
        self.V_du = Basis.empty(n, "V_du") if self.kind.needs_dual else None
        self.V_rdu = Basis.empty(n, "V_rdu") if self.kind.needs_dual_residual else None
        self.V_rpr = Basis.empty(n, "V_rpr") if self.kind.needs_primal_residual else None
        self.V_rrpr = (
            Basis.empty(n, "V_rrpr") if self.kind.needs_primal_residual_residual else None
        )

        init = config.initial_points
        last = len(self.samples) - 1
        middle = len(self.samples) // 2
        self.main_i = init.main
        self.alpha_i = init.alpha if init.alpha is not None else last
        self.beta_i = init.beta if init.beta is not None else middle
        self.gamma_i = init.gamma if init.gamma is not None else middle

    def _mark_singular(self, index, where):
        if self.active[index]:
            self.active[index] = False
            warnings.warn(
                f"skipping training sample {index} ({self.samples[index]!r}): "
                f"operator singular during {where}",
                RuntimeWarning,
                stacklevel=3,
            )
        if not any(self.active):
            raise AllSamplesSingularError(
                "every training sample renders the operator singular"
            )

    def _usable(self, index, where):
        """Return a usable sample index, replacing singular ones."""
        index = index if self.active[index] else self._fallback(index)
        while True:
            try:
                self.sys.operator_lu(self.samples[index])
                return index
            except SingularAtSampleError:
                self._mark_singular(index, where)
                index = self._fallback(index)

    def _fallback(self, index):
        m = len(self.samples)
        for step in range(1, m):
            for candidate in (index + step, index - step):
                if 0 <= candidate < m and self.active[candidate]:
                    return candidate
        raise AllSamplesSingularError("every training sample renders the operator singular")

    def _block(self, system, index):
        point = self.samples[index]
        if self.parametric:
            return multimoment_block(system, point, self.q, self.config.max_block_columns)
        return krylov_block(system, point[LAPLACE], self.q, self.config.max_block_columns)

    def grow(self):
        """Append this iteration's blocks; returns number of new columns."""
        cfg = self.config
        kind = self.kind
        tol = cfg.deflation_tol
        before = self._dimensions()

        self.main_i = self._usable(self.main_i, "primal expansion")
        raw_main = self._block(self.sys, self.main_i)
        self.V = self.V.appended(raw_main, tol)
        if self.V_rpr is not None:
            self.V_rpr = self.V_rpr.appended(raw_main, tol)
        if self.V_rrpr is not None:
            self.V_rrpr = self.V_rrpr.appended(raw_main, tol)

        if self.V_du is not None:
            dual_i = self.gamma_i if cfg.symmetric_variant else self.main_i
            dual_i = self._usable(dual_i, "dual expansion")
            if cfg.symmetric_variant:
                self.gamma_i = dual_i
            raw_dual = self._block(self.dual_sys, dual_i)
            self.V_du = self.V_du.appended(raw_dual, tol)
            if self.V_rdu is not None:
                self.V_rdu = self.V_rdu.appended(raw_dual, tol)

        if self.V_rdu is not None:
            self.alpha_i = self._usable(self.alpha_i, "dual-residual expansion")
            raw_alpha = self._block(self.dual_sys, self.alpha_i)
            self.V_rdu = self.V_rdu.appended(raw_alpha, tol)

        raw_alpha_primal = None
        if self.V_rpr is not None:
            self.alpha_i = self._usable(self.alpha_i, "primal-residual expansion")
            raw_alpha_primal = self._block(self.sys, self.alpha_i)
            self.V_rpr = self.V_rpr.appended(raw_alpha_primal, tol)

        if self.V_rrpr is not None:
            if raw_alpha_primal is not None:
                self.V_rrpr = self.V_rrpr.appended(raw_alpha_primal, tol)
            self.beta_i = self._usable(self.beta_i, "second-residual expansion")
            raw_beta = self._block(self.sys, self.beta_i)
            self.V_rrpr = self.V_rrpr.appended(raw_beta, tol)

        return self._dimensions() - before

    def _dimensions(self):
        return sum(
            basis.dim
            for basis in (self.V, self.V_du, self.V_rdu, self.V_rpr, self.V_rrpr)
            if basis is not None
        )

    def workspace(self):
        return EstimatorWorkspace.from_bases(
            self.sys,
            self.kind,
            self.V,
            V_du=self.V_du,
            V_rdu=self.V_rdu,
            V_rpr=self.V_rpr,
            V_rrpr=self.V_rrpr,
        )

    def sweep(self, ws):
        """Evaluate the estimator at every active sample (None where skipped).

        Full-order singularity deactivates a sample for good; a singular
        reduced operator only skips the sample for this iteration (reduced
        resonances move as the basis grows).
        """
        cfg = self.config
        _FULL, _REDUCED = "full-singular", "reduced-singular"

        def one(index):
            if not self.active[index]:
                return None
            try:
                return evaluate(
                    self.kind,
                    ws,
                    self.sys,
                    self.samples[index],
                    n_random=cfg.n_random,
                    rng_seed=cfg.rng_seed,
                )
            except SingularReducedSystemError:
                return _REDUCED
            except SingularAtSampleError:
                return _FULL

        threads = min(_sweep_threads(), len(self.samples))
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(one, range(len(self.samples))))
        else:
            results = [one(i) for i in range(len(self.samples))]
        breakdowns = []
        for index, outcome in enumerate(results):
            if isinstance(outcome, str):
                if outcome == _FULL:
                    self._mark_singular(index, "estimator sweep")
                else:
                    warnings.warn(
                        f"training sample {index}: reduced operator singular this "
                        f"iteration; sample skipped for the sweep",
                        RuntimeWarning,
                        stacklevel=2,
                    )
                breakdowns.append(None)
            else:
                breakdowns.append(outcome)
        if all(b is None for b in breakdowns):
            raise AllSamplesSingularError(
                "no training sample produced a usable estimate this iteration"
            )
        return breakdowns


def run_greedy(sys, config):
    """Run the estimator-driven greedy loop; see the module docstring.

    Stops when the worst estimate over the training set falls to the
    configured tolerance, when ``max_iterations`` is exhausted, or when an
    iteration deflates away entirely (no basis progress possible).
    """
    state = _GreedyState(sys, config)
    record_true = config.record_true_errors
    if record_true is None:
        record_true = sys.order <= 1000

    trace = []
    skipped = []
    converged = False
    stop_reason = StopReason.MAX_ITERATIONS
    ws = None
    for iteration in range(1, config.max_iterations + 1):
        added = state.grow()
        if added == 0 and trace:
            stop_reason = StopReason.STAGNATION_ALL_POINTS_USED
            break
        ws = state.workspace()
        breakdowns = state.sweep(ws)
        max_estimate = max(b.total for b in breakdowns if b is not None)
        max_true = None
        if record_true:
            true_values = []
            for i, b in enumerate(breakdowns):
                if b is None:
                    continue
                try:
                    true_values.append(true_error(sys, ws, state.samples[i]))
                except SingularAtSampleError:
                    state._mark_singular(i, "true-error recording")
            max_true = max(true_values) if true_values else None
        trace.append(
            IterationRecord(
                iteration=iteration,
                main_point=dict(state.samples[state.main_i]),
                alpha_point=dict(state.samples[state.alpha_i])
                if (state.V_rdu is not None or state.V_rpr is not None)
                else None,
                beta_point=dict(state.samples[state.beta_i])
                if state.V_rrpr is not None
                else None,
                gamma_point=dict(state.samples[state.gamma_i])
                if config.symmetric_variant
                else None,
                max_estimate=max_estimate,
                max_true_error=max_true,
                rom_dimension=state.V.dim,
            )
        )
        if max_estimate <= config.tolerance:
            converged = True
            stop_reason = StopReason.TOLERANCE_MET
            break
        chosen = select_points(config.kind, config.symmetric_variant, breakdowns)
        previous_main = state.main_i
        state.main_i = chosen.main
        if chosen.alpha is not None:
            state.alpha_i = chosen.alpha
        if chosen.beta is not None:
            state.beta_i = chosen.beta
        if chosen.gamma is not None:
            state.gamma_i = chosen.gamma
        if chosen.main == previous_main and added == 0:
            stop_reason = StopReason.STAGNATION_ALL_POINTS_USED
            break
    skipped = [i for i, ok in enumerate(state.active) if not ok]
    return GreedyResult(
        workspace=ws,
        trace=trace,
        converged=converged,
        stop_reason=stop_reason,
        skipped_samples=skipped,
    )


def validate(sys, result, validation_set, kind=None, n_random=20, rng_seed=0):
    """Measure estimate vs true error on an independent sample set.

    ``result`` may be a GreedyResult or a bare workspace. Returns an
    EffectivityReport with per-sample rows and min/max effectivities, both
    overall and restricted to samples whose true error exceeds the
    rounding-noise threshold 1e-11 (below it, ratios measure noise).
    """
    ws = getattr(result, "workspace", result)
    if kind is None:
        kind = ws.kind
    rows = []
    skipped = 0
    for point in validation_set:
        try:
            estimate = evaluate(kind, ws, sys, point, n_random=n_random, rng_seed=rng_seed).total
            exact = true_error(sys, ws, point)
        except SingularAtSampleError:
            skipped += 1
            continue
        effectivity = estimate / exact if exact > 0 else None
        rows.append(
            EffectivityRow(
                sample=dict(point),
                estimate=estimate,
                true_error=exact,
                effectivity=effectivity,
            )
        )
    return EffectivityReport.from_rows(rows, skipped_singular=skipped)
