"""Output error estimators for reduced transfer functions.

All estimators are built from the same ingredients: the reduced primal
solution's residual ``r_pr = B - Q x_pr_hat``, approximate dual solutions,
and approximate solutions of residual systems (linear systems whose
right-hand side is one of those residuals). None of them needs an inf-sup
or smallest-singular-value computation, and none needs a full-order
factorization; full-order solves appear only in the diagnostic routines
``true_error`` (optionally) and ``sensitivity_report``.

The exact error obeys ``H - H_hat = x_du^T r_pr`` with the full dual
solution ``Q^T x_du = C^T``; every estimator replaces ``x_du`` (or the
output functional applied to the error) by reduced surrogates:

===========  ==================================================
Delta1       ``|x_du_hat^T r_pr|``
Delta2       ``Delta1 + |x_rdu_hat^T r_pr|``
Delta2Pr     ``Delta1 + |r_du^T x_rpr_hat|``
Delta1Pr     ``|C x_rpr_hat|``
Delta3       ``Delta1Pr + |x_du_hat^T r_rpr|``
Delta3Pr     ``Delta1Pr + |C x_rrpr_hat|``
DeltaR       randomized sketch of Delta1 (seeded normal weights)
===========  ==================================================

where ``x_rdu_hat``, ``x_rpr_hat``, ``x_rrpr_hat`` solve reduced residual
systems with right-hand sides ``W^T r_du``, ``W^T r_pr`` and
``W^T r_rpr`` (``r_rpr = r_pr - Q x_rpr_hat``).

For systems with several inputs/outputs every bilinear form above is an
(n_outputs x n_inputs) matrix and estimates take the max over channels.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingWorkspaceRomError
from .projection import reduce_system

__all__ = [
    "EstimatorKind",
    "EstimatorWorkspace",
    "EstimateBreakdown",
    "SensitivityReport",
    "evaluate",
    "evaluate_mimo",
    "true_error",
    "delta_r",
    "sensitivity_report",
]

_EPS = np.finfo(np.float64).eps


class EstimatorKind(enum.Enum):
    """The seven estimator variants, keyed by their CLI names."""

    DELTA_R = "delta_r"
    DELTA_1 = "delta1"
    DELTA_1PR = "delta1pr"
    DELTA_2 = "delta2"
    DELTA_2PR = "delta2pr"
    DELTA_3 = "delta3"
    DELTA_3PR = "delta3pr"

    @classmethod
    def from_name(cls, name):
        for kind in cls:
            if kind.value == name:
                return kind
        raise ValueError(
            f"unknown estimator {name!r}; choose from "
            f"{[k.value for k in cls]}"
        )

    @property
    def needs_dual(self):
        return self in _NEEDS_DUAL

    @property
    def needs_dual_residual(self):
        return self is EstimatorKind.DELTA_2

    @property
    def needs_primal_residual(self):
        return self in _NEEDS_PRIMAL_RESIDUAL

    @property
    def needs_primal_residual_residual(self):
        return self is EstimatorKind.DELTA_3PR

    @property
    def two_part(self):
        return self in (
            EstimatorKind.DELTA_2,
            EstimatorKind.DELTA_2PR,
            EstimatorKind.DELTA_3,
            EstimatorKind.DELTA_3PR,
        )


_NEEDS_DUAL = frozenset(
    {
        EstimatorKind.DELTA_R,
        EstimatorKind.DELTA_1,
        EstimatorKind.DELTA_2,
        EstimatorKind.DELTA_2PR,
        EstimatorKind.DELTA_3,
    }
)
_NEEDS_PRIMAL_RESIDUAL = frozenset(
    {
        EstimatorKind.DELTA_1PR,
        EstimatorKind.DELTA_2PR,
        EstimatorKind.DELTA_3,
        EstimatorKind.DELTA_3PR,
    }
)


@dataclass
class EstimatorWorkspace:
    """The reduced models one estimator kind needs, bundled.

    ``rom_primal`` approximates the state equation; the optional members
    approximate the dual equation and the residual equations. Which are
    required depends on the kind and is checked at construction.
    """

    kind: EstimatorKind
    rom_primal: object
    rom_dual: object = None
    rom_dual_residual: object = None
    rom_primal_residual: object = None
    rom_primal_residual_residual: object = None

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", EstimatorKind.from_name(self.kind))
        missing = [name for name in self.required_roms(self.kind) if getattr(self, name) is None]
        if missing:
            raise MissingWorkspaceRomError(
                f"estimator {self.kind.value} requires {missing} in the workspace"
            )

    @staticmethod
    def required_roms(kind):
        required = []
        if kind.needs_dual:
            required.append("rom_dual")
        if kind.needs_dual_residual:
            required.append("rom_dual_residual")
        if kind.needs_primal_residual:
            required.append("rom_primal_residual")
        if kind.needs_primal_residual_residual:
            required.append("rom_primal_residual_residual")
        return required

    @classmethod
    def from_bases(
        cls,
        sys,
        kind,
        V,
        V_du=None,
        V_rdu=None,
        V_rpr=None,
        V_rrpr=None,
        W=None,
        W_du=None,
        W_rdu=None,
        W_rpr=None,
        W_rrpr=None,
        validate=True,
    ):
        """Project the system onto whichever bases are supplied.

        Dual-side models are reductions of the transposed system, so the
        same Galerkin/Petrov-Galerkin machinery serves both sides. Bases
        beyond the kind's requirements are projected too (diagnostics use
        them); missing required ones raise at construction.
        """
        dual = sys.dual() if (V_du is not None or V_rdu is not None) else None

        def maybe(system, trial, test):
            if trial is None:
                return None
            return reduce_system(system, trial, W=test, validate=validate)

        return cls(
            kind=kind,
            rom_primal=reduce_system(sys, V, W=W, validate=validate),
            rom_dual=maybe(dual, V_du, W_du),
            rom_dual_residual=maybe(dual, V_rdu, W_rdu),
            rom_primal_residual=maybe(sys, V_rpr, W_rpr),
            rom_primal_residual_residual=maybe(sys, V_rrpr, W_rrpr),
        )


@dataclass
class EstimateBreakdown:
    """One estimator evaluation at one sample point.

    ``total`` is the estimate; two-part kinds split it into ``part1`` and
    ``part2`` (``part2`` is 0 otherwise), and ``aux`` carries the residual
    norms the greedy point-selection rules consume. For single-output,
    single-input systems ``total == part1 + part2`` exactly; with several
    channels each field is the max over channels of its own quantity, so
    ``total <= part1 + part2``.
    """

    kind: EstimatorKind
    total: float
    part1: float
    part2: float = 0.0
    aux: dict = field(default_factory=dict)


@dataclass
class SensitivityReport:
    """Full-order diagnostic quantities for the error-envelope statements.

    Each ``epsilonX``/``deltaX_term`` pairs with the corresponding
    estimator to bracket the true error, e.g. ``Delta1 - epsilon1 <= err
    <= Delta1 + epsilon1``. All quantities need full-order solves, so this
    is a test-and-diagnosis tool, not an online estimator.

    ``epsilon3`` is ``|(x_du - x_du_hat)^T r_pr|`` and coincides with
    ``epsilon1`` by definition; the companion ``epsilon3_residual``
    replaces ``r_pr`` by ``r_rpr`` and is the slack that provably closes
    the upper envelope of Delta3.
    """

    epsilon1: float
    epsilon1_pr: float
    epsilon2: float
    epsilon2_pr: float
    epsilon3: float
    epsilon3_residual: float
    epsilon3_pr: float
    delta2_term: float
    delta2_pr_term: float
    delta3_term: float
    delta3_pr_term: float
    true_error: float


def _column_norm(block):
    # residual "norm" convention for blocks: worst column 2-norm
    if block.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(block, axis=0)))


def _max_abs(matrix):
    return float(np.max(np.abs(matrix)))


def _channel_parts(kind, workspace, sys, point, n_random=20, rng_seed=0, xi=None):
    """Magnitude matrices (n_outputs x n_inputs) of the estimator parts."""
    ws = workspace
    if not isinstance(kind, EstimatorKind):
        kind = EstimatorKind.from_name(kind)
    for name in EstimatorWorkspace.required_roms(kind):
        if getattr(ws, name) is None:
            raise MissingWorkspaceRomError(
                f"estimator {kind.value} requires {name} in the workspace"
            )
    Qp = sys.Q.assemble(point)
    Bp = sys.B.assemble(point)
    Cp = sys.C.assemble(point)
    aux = {}

    _, xhat_pr = ws.rom_primal.solve(point)
    r_pr = Bp - Qp @ xhat_pr
    aux["r_pr_norm"] = _column_norm(r_pr)

    delta1_mat = None
    r_du = None
    if kind.needs_dual:
        _, xhat_du = ws.rom_dual.solve(point)
        delta1_mat = xhat_du.T @ r_pr
        r_du = Cp.T - Qp.T @ xhat_du
        aux["r_du_norm"] = _column_norm(r_du)

    part2_mat = None
    if kind is EstimatorKind.DELTA_1:
        part1_mat = np.abs(delta1_mat)
    elif kind is EstimatorKind.DELTA_R:
        if xi is None:
            xi = np.random.default_rng(rng_seed).standard_normal(int(n_random))
        xi = np.asarray(xi, dtype=np.float64)
        accum = np.zeros(delta1_mat.shape, dtype=np.float64)
        for weight in xi:
            accum += np.abs(weight * delta1_mat) ** 2
        part1_mat = np.sqrt(accum) / xi.size
    elif kind is EstimatorKind.DELTA_2:
        _, xhat_rdu = ws.rom_dual_residual.solve(point, rhs=r_du)
        part1_mat = np.abs(delta1_mat)
        part2_mat = np.abs(xhat_rdu.T @ r_pr)
    elif kind is EstimatorKind.DELTA_2PR:
        _, xhat_rpr = ws.rom_primal_residual.solve(point, rhs=r_pr)
        part1_mat = np.abs(delta1_mat)
        part2_mat = np.abs(r_du.T @ xhat_rpr)
    elif kind in (EstimatorKind.DELTA_1PR, EstimatorKind.DELTA_3, EstimatorKind.DELTA_3PR):
        _, xhat_rpr = ws.rom_primal_residual.solve(point, rhs=r_pr)
        part1_mat = np.abs(Cp @ xhat_rpr)
        r_rpr = r_pr - Qp @ xhat_rpr
        aux["r_rpr_norm"] = _column_norm(r_rpr)
        if kind is EstimatorKind.DELTA_3:
            part2_mat = np.abs(xhat_du.T @ r_rpr)
        elif kind is EstimatorKind.DELTA_3PR:
            _, xhat_rrpr = ws.rom_primal_residual_residual.solve(point, rhs=r_rpr)
            part2_mat = np.abs(Cp @ xhat_rrpr)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unhandled estimator kind {kind!r}")
    return part1_mat, part2_mat, aux


def evaluate(kind, workspace, sys, point, n_random=20, rng_seed=0, xi=None):
    """Evaluate one estimator at one sample point.

    ``n_random``/``rng_seed``/``xi`` only affect the randomized kind: the
    weights are drawn once from the seed (or taken verbatim from ``xi``),
    so a sweep with a fixed seed uses the same weights at every sample.
    """
    part1_mat, part2_mat, aux = _channel_parts(
        kind, workspace, sys, point, n_random=n_random, rng_seed=rng_seed, xi=xi
    )
    total_mat = part1_mat if part2_mat is None else part1_mat + part2_mat
    if not isinstance(kind, EstimatorKind):
        kind = EstimatorKind.from_name(kind)
    return EstimateBreakdown(
        kind=kind,
        total=_max_abs(total_mat),
        part1=_max_abs(part1_mat),
        part2=0.0 if part2_mat is None else _max_abs(part2_mat),
        aux=aux,
    )


def evaluate_mimo(kind, workspace, sys, point, **kwargs):
    """Estimate for a multi-channel system: max over (output, input) pairs.

    Each channel is the scalar system (row of C, column of B) sharing the
    workspace bases; for single-channel systems this equals
    ``evaluate(...).total``.
    """
    return evaluate(kind, workspace, sys, point, **kwargs).total


def delta_r(workspace, sys, point, n_samples=20, rng_seed=0, xi=None):
    """Randomized estimate: seeded-normal sketch of the dual-weighted residual.

    ``(1/K) * sqrt(sum_i |xi_i * (x_du_hat^T r_pr)|^2)`` with K =
    ``n_samples`` standard-normal weights drawn once from ``rng_seed``
    (or injected via ``xi`` for diagnostics). Factors exactly into
    ``||xi||_2 / K`` times the Delta1 estimate.
    """
    return evaluate(
        EstimatorKind.DELTA_R,
        workspace,
        sys,
        point,
        n_random=n_samples,
        rng_seed=rng_seed,
        xi=xi,
    ).total


def true_error(sys, workspace, point, verify_identity=False):
    """Exact output error ``max_ij |H_ij - H_hat_ij|`` at one sample point.

    Needs a full-order factorization. With ``verify_identity`` the direct
    difference of transfer functions is cross-checked against the exact
    identity ``H - H_hat = x_du^T r_pr`` (full dual solution against the
    reduced primal residual); disagreement beyond rounding raises.
    """
    lu = sys.operator_lu(point)
    Bp = sys.B.assemble(point)
    Cp = sys.C.assemble(point)
    H = Cp @ lu.solve(Bp)
    H_hat = workspace.rom_primal.transfer_function(point)
    err_mat = H - H_hat
    direct = _max_abs(err_mat)
    if verify_identity:
        Qp = sys.Q.assemble(point)
        _, xhat_pr = workspace.rom_primal.solve(point)
        r_pr = Bp - Qp @ xhat_pr
        x_du = lu.solve(Cp.T, transpose=True)
        identity_mat = x_du.T @ r_pr
        deviation = _max_abs(err_mat - identity_mat)
        scale = max(_max_abs(H), _max_abs(H_hat))
        floor = 1e3 * sys.order * _EPS * scale
        allowed = 1e-10 * max(direct, _max_abs(identity_mat)) + floor
        if deviation > allowed:
            raise ArithmeticError(
                f"error identity violated: direct vs dual-weighted residual "
                f"differ by {deviation:.3e} (allowed {allowed:.3e})"
            )
    return direct


def sensitivity_report(sys, workspace, point):
    """All envelope diagnostics at one sample point (single-channel systems).

    Solves the full primal, dual, and residual systems once each (sharing
    one LU) and returns every epsilon/delta scalar alongside the true
    error. Requires a workspace carrying all four optional reduced models.
    """
    if sys.n_inputs != 1 or sys.n_outputs != 1:
        raise ValueError("sensitivity diagnostics are defined for single-channel systems")
    ws = workspace
    missing = [
        name
        for name in (
            "rom_dual",
            "rom_dual_residual",
            "rom_primal_residual",
            "rom_primal_residual_residual",
        )
        if getattr(ws, name) is None
    ]
    if missing:
        raise MissingWorkspaceRomError(f"sensitivity diagnostics require {missing}")

    lu = sys.operator_lu(point)
    Qp = sys.Q.assemble(point)
    Bp = sys.B.assemble(point)
    Cp = sys.C.assemble(point)

    x_pr = lu.solve(Bp)
    _, xhat_pr = ws.rom_primal.solve(point)
    r_pr = Bp - Qp @ xhat_pr

    x_du = lu.solve(Cp.T, transpose=True)
    _, xhat_du = ws.rom_dual.solve(point)
    r_du = Cp.T - Qp.T @ xhat_du

    x_rdu = lu.solve(r_du, transpose=True)
    _, xhat_rdu = ws.rom_dual_residual.solve(point, rhs=r_du)

    x_rpr = lu.solve(r_pr)
    _, xhat_rpr = ws.rom_primal_residual.solve(point, rhs=r_pr)
    r_rpr = r_pr - Qp @ xhat_rpr

    x_rrpr = lu.solve(r_rpr)
    _, xhat_rrpr = ws.rom_primal_residual_residual.solve(point, rhs=r_rpr)

    def scalar(matrix):
        return float(np.abs(matrix[0, 0]))

    du_gap = x_du - xhat_du
    rpr_gap = x_rpr - xhat_rpr
    return SensitivityReport(
        epsilon1=scalar(du_gap.T @ r_pr),
        epsilon1_pr=scalar(Cp @ rpr_gap),
        epsilon2=scalar((x_rdu - xhat_rdu).T @ r_pr),
        epsilon2_pr=scalar(r_du.T @ rpr_gap),
        epsilon3=scalar(du_gap.T @ r_pr),
        epsilon3_residual=scalar(du_gap.T @ r_rpr),
        epsilon3_pr=scalar(Cp @ (x_rrpr - xhat_rrpr)),
        delta2_term=scalar(xhat_rdu.T @ r_pr),
        delta2_pr_term=scalar(r_du.T @ xhat_rpr),
        delta3_term=scalar(xhat_du.T @ r_rpr),
        delta3_pr_term=scalar(Cp @ xhat_rrpr),
        true_error=scalar((Cp @ x_pr) - (Cp @ xhat_pr)),
    )
