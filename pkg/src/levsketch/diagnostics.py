"""Structural-condition checks and accuracy-bound verdicts for a sketch.

Two measurable conditions on a realized sketch plan together guarantee an
epsilon-accurate solve:

* the sketched basis keeps its smallest squared singular value at least
  ``1/sqrt(2)``, and
* the cross term between the sketched basis and the sketched residual
  component is at most ``epsilon * residual_sq / 2``.

When both hold, the true residual of the sketched solution is within
``(1 + epsilon)`` of optimal and the solution error is bounded by
``epsilon * residual_sq / sigma_min(a)^2``.  These implications are what
the bench harness counts violations of.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameterError
from .linalg import (
    LstsqSolution,
    OrthonormalBasis,
    SpectralSummary,
    as_array,
    fro_norm_sq,
    spectral_extremes,
)
from .sketch import SketchPlan, apply_sketch
from .solver import SketchSolution

#: Threshold on the smallest squared singular value of the sketched basis.
SC1_THRESHOLD = 1.0 / math.sqrt(2.0)

# Slack policy: verdict booleans get a 1e-12 (structural) or 1e-10 (bound)
# relative allowance so float ties don't flip them, plus a noise floor
# relative to problem scale so consistent systems (residual ~ rounding
# noise) don't produce spurious violations.
_STRUCTURAL_SLACK = 1e-12
_BOUND_SLACK_REL = 1e-10
_NOISE_FLOOR_REL = 1e-18


@dataclass(frozen=True)
class StructuralReport:
    """Measured values and verdicts for the two structural conditions."""

    sc1_value: float
    sc1_holds: bool
    sc2_value: float
    sc2_holds: bool


@dataclass(frozen=True)
class BoundReport:
    """Verdicts for the residual, solution-error, and gamma bounds."""

    residual_bound_holds: bool
    solution_bound_value: float
    solution_bound_limit: float
    solution_bound_holds: bool
    gamma: float
    gamma_bound_limit: float
    gamma_bound_holds: bool

    def __post_init__(self) -> None:
        if not (0.0 < self.gamma <= 1.0 + 1e-12):
            raise InvalidParameterError(f"gamma must lie in (0, 1], got {self.gamma}")


def check_structural(
    plan: SketchPlan,
    basis: OrthonormalBasis,
    b_perp,
    epsilon: float,
    residual_sq: float,
) -> StructuralReport:
    """Evaluate both structural conditions for a realized plan.

    Parameters
    ----------
    plan : SketchPlan
    basis : OrthonormalBasis
        Orthonormal basis of the design matrix's column space.
    b_perp : DenseMatrix or array-like
        Residual component of the right-hand side (from the exact solve).
    epsilon : float
        Target accuracy in (0, 1).
    residual_sq : float
        Exact minimal residual ``||b_perp||_F^2``.
    """
    if not (0.0 < epsilon < 1.0):
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if residual_sq < 0.0:
        raise InvalidParameterError(f"residual_sq must be >= 0, got {residual_sq}")
    q = basis.q.array
    r = q.shape[1]
    sq = apply_sketch(plan, q).array
    if plan.n_samples < r:
        # Fewer samples than rank: the sketched basis has a kernel.
        sc1_value = 0.0
    else:
        sv = np.linalg.svd(sq, compute_uv=False)
        sc1_value = float(sv[-1]) ** 2
    sbp = apply_sketch(plan, b_perp).array
    sc2_value = fro_norm_sq(sq.T @ sbp)
    return StructuralReport(
        sc1_value=sc1_value,
        sc1_holds=sc1_value >= SC1_THRESHOLD - _STRUCTURAL_SLACK,
        sc2_value=sc2_value,
        sc2_holds=sc2_value <= epsilon * residual_sq / 2.0 + _STRUCTURAL_SLACK * residual_sq,
    )


def check_bounds(
    a,
    b,
    exact: LstsqSolution,
    sol: SketchSolution,
    epsilon: float,
    *,
    literal_epsilon_squared: bool = False,
    spectral: SpectralSummary | None = None,
) -> BoundReport:
    """Compare a sketched solution against the accuracy bounds.

    Checks three things: the true residual against ``(1 + epsilon)`` times
    the optimum, the solution error against ``epsilon * residual_sq /
    sigma_min(a)^2``, and the solution error against the
    right-hand-side-alignment form ``epsilon * kappa^2 * (1/gamma^2 - 1) *
    ||x_opt||_F^2`` where ``gamma = ||a @ x_opt||_F / ||b||_F``.

    Parameters
    ----------
    literal_epsilon_squared : bool
        Evaluate the alignment bound with ``epsilon**2`` instead of the
        default ``epsilon`` (the exponent consistent with the other two
        bounds); kept for comparison.
    spectral : SpectralSummary, optional
        Precomputed extremes of ``a``, to avoid one SVD per call in batch
        loops.
    """
    if not (0.0 < epsilon < 1.0):
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    arr = as_array(a)
    barr = as_array(b)
    xt = as_array(sol.x_tilde)
    xo = as_array(exact.x_opt)
    if spectral is None:
        spectral = spectral_extremes(arr)

    scale_sq = fro_norm_sq(barr)
    r2 = exact.residual_sq
    noise_floor = _NOISE_FLOOR_REL * scale_sq

    resid_sq = fro_norm_sq(arr @ xt - barr)
    residual_bound_holds = bool(
        resid_sq <= (1.0 + epsilon) * r2 + _BOUND_SLACK_REL * r2 + noise_floor
    )

    sigma_min_sq = spectral.sigma_min**2
    sol_value = fro_norm_sq(xo - xt)
    sol_limit = epsilon * r2 / sigma_min_sq if sigma_min_sq > 0 else float("inf")
    sol_floor = noise_floor / sigma_min_sq if sigma_min_sq > 0 else float("inf")
    solution_bound_holds = bool(
        sol_value <= sol_limit * (1.0 + _BOUND_SLACK_REL) + sol_floor
    )

    b_norm = math.sqrt(scale_sq)
    gamma = float(np.linalg.norm(arr @ xo) / b_norm) if b_norm > 0 else 1.0
    factor = epsilon**2 if literal_epsilon_squared else epsilon
    if gamma > 0:
        gamma_limit = factor * spectral.kappa**2 * (1.0 / gamma**2 - 1.0) * fro_norm_sq(xo)
        gamma_limit = max(gamma_limit, 0.0)  # gamma can round a hair past 1
    else:
        # b has no component in the column space: the alignment bound is
        # vacuous, and gamma is floored to keep the report constructible.
        gamma_limit = float("inf")
        gamma = math.ulp(0.0)
    gamma_bound_holds = bool(
        sol_value <= gamma_limit * (1.0 + _BOUND_SLACK_REL) + sol_floor
    )

    return BoundReport(
        residual_bound_holds=residual_bound_holds,
        solution_bound_value=sol_value,
        solution_bound_limit=sol_limit,
        solution_bound_holds=solution_bound_holds,
        gamma=min(gamma, 1.0 + 1e-13),
        gamma_bound_limit=gamma_limit,
        gamma_bound_holds=gamma_bound_holds,
    )
