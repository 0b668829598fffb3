"""Derivative-free local refinement of the variational angles.

Wraps scipy's COBYLA behind a traced interface: every evaluation is
recorded, the budget is the exact maximum number of objective calls, and
box bounds are enforced through a quadratic penalty so the objective
stays callable everywhere.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import ObjectiveEvaluationError

PENALTY_WEIGHT = 1e4


@dataclass
class OptTrace:
    """Evaluations in call order and the best point found.

    ``converged`` is True when the trust region shrank below tolerance;
    otherwise ``reason`` records why the run stopped.  Recorded values
    include the penalty term for out-of-bounds proposals.
    """

    evaluations: list
    best_point: np.ndarray
    best_value: float
    converged: bool
    reason: str


def minimize(objective, x0, bounds=None, budget=150, tol=1e-6, rhobeg=None):
    """Minimize ``objective`` from ``x0`` with at most ``budget`` evaluations.

    ``rhobeg`` (the initial trust-region radius) defaults to 0.5, shrunk
    to half the narrowest box span so the first probes stay near the box.
    Deterministic given identical inputs.  If the objective raises, the
    run aborts and ObjectiveEvaluationError carries the partial trace.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    x0 = np.asarray(x0, dtype=np.float64)
    if bounds is not None:
        bounds = np.asarray(bounds, dtype=np.float64)
        if bounds.shape != (x0.size, 2):
            raise ValueError(f"bounds must have shape ({x0.size}, 2)")
        low, high = bounds[:, 0], bounds[:, 1]
    if rhobeg is None:
        rhobeg = 0.5
        if bounds is not None:
            span = float(np.min(high - low))
            if span > 0:
                rhobeg = min(0.5, 0.5 * span)

    evaluations = []
    failure = []

    def wrapped(x):
        # After a failure, feed COBYLA a flat landscape until it stops;
        # raising here would unwind through the Fortran layer.
        if failure:
            return 0.0
        x = np.asarray(x, dtype=np.float64)
        try:
            value = float(objective(x))
        except Exception as exc:
            failure.append(exc)
            return 0.0
        if bounds is not None:
            excess = np.maximum(low - x, 0.0) + np.maximum(x - high, 0.0)
            value += PENALTY_WEIGHT * float(excess @ excess)
        evaluations.append((x.copy(), value))
        return value

    result = _scipy_minimize(
        wrapped,
        x0,
        method="COBYLA",
        tol=tol,
        options={"maxiter": budget, "rhobeg": rhobeg},
    )
    if failure:
        raise ObjectiveEvaluationError(
            f"objective failed after {len(evaluations)} evaluations: {failure[0]}",
            history=_trace(evaluations, converged=False, reason="objective failure"),
        ) from failure[0]

    converged = bool(result.status == 1)
    if converged:
        reason = "tolerance"
    elif result.status == 2:
        reason = "budget"
    else:
        reason = str(result.message)
    return _trace(evaluations, converged, reason)


def _trace(evaluations, converged, reason):
    if not evaluations:
        return OptTrace([], None, np.inf, converged, reason)
    values = [v for _, v in evaluations]
    k = int(np.argmin(values))
    return OptTrace(
        evaluations=list(evaluations),
        best_point=evaluations[k][0].copy(),
        best_value=values[k],
        converged=converged,
        reason=reason,
    )
