"""Moment-matching basis blocks.

Two builders, both reusing a single LU of the operator at the expansion
point for every level:

* ``krylov_block`` -- frequency-only systems. With ``Q(s) = s E - A`` the
  levels are ``span{Q^{-1}B, (Q^{-1}E) Q^{-1}B, ...}``, which matches
  derivatives of the state with respect to s at the expansion point.
* ``multimoment_block`` -- parametric systems in affine form. Shifting every
  coefficient to the expansion point turns the state into a Neumann-type
  series whose level-k blocks are products of ``M_j = -Q(p)^{-1} Q_j``
  applied to ``R_0 = Q(p)^{-1} [pieces of B]``; the block stacks levels 0..q.

Dual-side blocks come from running the same builders on ``sys.dual()``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .system import LAPLACE

__all__ = [
    "ExpansionRequest",
    "krylov_block",
    "dual_krylov_block",
    "multimoment_block",
    "expansion_block",
]

#: Hard cap on the number of columns a single block may contribute.
DEFAULT_MAX_BLOCK_COLUMNS = 64


@dataclass(frozen=True)
class ExpansionRequest:
    """One basis-growth instruction: where, how deep, and which side."""

    point: dict
    order: int
    direction: str = "primal"  # "primal" or "dual"

    def __post_init__(self):
        if self.direction not in ("primal", "dual"):
            raise ValueError(f"direction must be primal or dual, got {self.direction!r}")
        if self.order < 0:
            raise ValueError(f"order must be nonnegative, got {self.order}")


def krylov_block(sys, s, q, max_columns=DEFAULT_MAX_BLOCK_COLUMNS):
    """Levels 0..q-1 of the shifted Krylov sequence at frequency ``s``.

    Requires a system whose only parameter is the Laplace variable. Level 0
    is ``Q(s)^{-1} B``; each next level multiplies by ``Q(s)^{-1} E`` where
    ``E`` is the s-derivative of the operator family (the descriptor matrix
    for first-order realizations). ``q >= 1`` counts levels, so the block has
    ``q * n_inputs`` columns before the cap.
    """
    if q < 1:
        raise ValueError(f"level count q must be >= 1, got {q}")
    point = {LAPLACE: complex(s)}
    lu = sys.operator_lu(point)
    e_matrix = sys.Q.diff(LAPLACE).assemble(point)
    level = lu.solve(sys.B.assemble(point))
    levels = [level]
    total = level.shape[1]
    for _ in range(1, q):
        if total >= max_columns:
            break
        level = lu.solve(e_matrix @ level)
        levels.append(level)
        total += level.shape[1]
    return np.hstack(levels)[:, :max_columns]


def dual_krylov_block(sys, s, q, max_columns=DEFAULT_MAX_BLOCK_COLUMNS):
    """Krylov levels of the transposed family; columns span dual states."""
    return krylov_block(sys.dual(), s, q, max_columns)


def multimoment_block(sys, point, q, max_columns=DEFAULT_MAX_BLOCK_COLUMNS):
    """Levels 0..q of the multi-parameter moment recursion at ``point``.

    Level 0 solves the operator against every constituent matrix of the
    input family (so affine inputs contribute one block per piece); level k
    applies every ``M_j = -Q(p)^{-1} Q_j`` to level k-1, one j per affine
    term of the operator. ``q >= 0`` is the highest level index; q=0 keeps
    only level 0. Column growth is geometric in the number of operator
    terms, so the cap truncates the highest level.
    """
    if q < 0:
        raise ValueError(f"highest level index q must be >= 0, got {q}")
    lu = sys.operator_lu(point)
    r0_pieces = sys.B.pieces()
    if not r0_pieces:
        raise DimensionMismatchError("input family has no nonzero pieces")
    level = lu.solve(np.hstack(r0_pieces))
    blocks = [level]
    total = level.shape[1]
    operator_terms = [matrix for _, matrix in sys.Q.terms]
    for _ in range(1, q + 1):
        if total >= max_columns or not operator_terms:
            break
        level = np.hstack([-lu.solve(t @ level) for t in operator_terms])
        room = max_columns - total
        level = level[:, :room]
        blocks.append(level)
        total += level.shape[1]
    return np.hstack(blocks)


def expansion_block(sys, request, q=None, max_columns=DEFAULT_MAX_BLOCK_COLUMNS):
    """Build the block a request describes, picking the builder by system kind.

    Frequency-only systems use the Krylov builder (order = level count);
    parametric systems use the multimoment builder (order = highest level).
    Dual requests run on the transposed family.
    """
    target = sys.dual() if request.direction == "dual" else sys
    order = request.order if q is None else q
    if target.is_parametric:
        return multimoment_block(target, request.point, order, max_columns)
    if order < 1:
        raise ValueError("frequency-only expansions need at least one level")
    return krylov_block(target, request.point[LAPLACE], order, max_columns)
