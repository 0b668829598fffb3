"""Gaussian-process surrogate with UCB acquisition and the sequential loop.

The surrogate is a zero-mean GP with an isotropic squared-exponential
kernel and fixed hyperparameters; the loop proposes each new point by
maximizing mean + kappa * std over the search box.  Everything is
deterministic in the caller's seed: quasi-random initial design,
multi-start pattern search for the acquisition, and the Philox
substreams behind both.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist
from scipy.stats import qmc

from .errors import ObjectiveEvaluationError
from .rng import STREAM_BAYESOPT, substream

# Jitter escalation stops here; a kernel matrix still non-PD with this
# much added noise indicates broken inputs rather than conditioning.
MAX_JITTER = 1e-2


@dataclass(frozen=True)
class SquaredExponentialKernel:
    """k(x, x') = signal_variance * exp(-||x - x'||^2 / (2 length_scale^2)).

    Defaults assume coordinates normalized to the unit box, which is how
    ``bayes_opt`` calls the GP internally.
    """

    signal_variance: float = 1.0
    length_scale: float = 0.5
    noise_variance: float = 1e-6

    def matrix(self, xa, xb):
        sq = cdist(np.atleast_2d(xa), np.atleast_2d(xb), "sqeuclidean")
        return self.signal_variance * np.exp(-0.5 * sq / self.length_scale**2)


@dataclass
class GpPosterior:
    points: np.ndarray
    observations: np.ndarray
    kernel: SquaredExponentialKernel
    noise_variance: float  # jitter actually used (>= kernel.noise_variance)
    _factor: tuple = field(repr=False, default=None)
    _alpha: np.ndarray = field(repr=False, default=None)


@dataclass
class BoHistory:
    """Evaluated points in order plus the incumbent maximum."""

    trials: list
    best_point: np.ndarray
    best_value: float


def gp_fit(points, observations, kernel=None):
    """Fit the GP posterior, caching the Cholesky solve of (K + s_n^2 I).

    If the factorization fails, the noise term is escalated tenfold up to
    ``MAX_JITTER`` before a numeric error is allowed to propagate.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    observations = np.asarray(observations, dtype=np.float64).reshape(-1)
    if points.shape[0] != observations.shape[0]:
        raise ValueError("points and observations must have equal length")
    if points.shape[0] < 1:
        raise ValueError("at least one observation is required")
    kernel = kernel if kernel is not None else SquaredExponentialKernel()
    if kernel.noise_variance <= 0:
        raise ValueError("noise_variance must be positive")

    base = kernel.matrix(points, points)
    eye = np.eye(points.shape[0])
    noise = kernel.noise_variance
    while True:
        try:
            factor = cho_factor(base + noise * eye, lower=True)
            break
        except np.linalg.LinAlgError:
            if noise >= MAX_JITTER:
                raise
            noise = min(noise * 10.0, MAX_JITTER)
    alpha = cho_solve(factor, observations)
    return GpPosterior(
        points=points,
        observations=observations,
        kernel=kernel,
        noise_variance=noise,
        _factor=factor,
        _alpha=alpha,
    )


def gp_predict(post, x):
    """Posterior predictive (mean, variance) at one point.

    Variance is clamped to zero when roundoff pushes it slightly below;
    anything under -1e-10 is treated as a numeric failure.
    """
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if x.shape[1] != post.points.shape[1]:
        raise ValueError(
            f"query has dimension {x.shape[1]}, posterior has {post.points.shape[1]}"
        )
    kstar = post.kernel.matrix(post.points, x)[:, 0]
    mean = float(kstar @ post._alpha)
    variance = float(post.kernel.signal_variance - kstar @ cho_solve(post._factor, kstar))
    if variance < 0.0:
        if variance < -1e-10:
            raise np.linalg.LinAlgError(
                f"negative predictive variance {variance}; factorization is unusable"
            )
        variance = 0.0
    return mean, variance


def ucb(mean, variance, kappa):
    """Upper confidence bound mean + kappa * sqrt(variance)."""
    if variance < 0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    if kappa < 0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    return float(mean + kappa * np.sqrt(variance))


def _compass_search(score, start, low, high, max_evals):
    span = high - low
    step = 0.25 * span
    floor = 1e-3 * span
    x = start.copy()
    best = score(x)
    evals = 1
    while evals < max_evals:
        improved = False
        for axis in range(x.size):
            if span[axis] == 0.0:
                continue
            for delta in (step[axis], -step[axis]):
                cand = x.copy()
                cand[axis] = min(max(x[axis] + delta, low[axis]), high[axis])
                if cand[axis] == x[axis]:
                    continue
                value = score(cand)
                evals += 1
                if value > best:
                    x, best = cand, value
                    improved = True
                if evals >= max_evals:
                    return x, best
        if not improved:
            step = step * 0.5
            if np.all(step <= floor):
                break
    return x, best


def maximize_acquisition(post, bounds, kappa, seed, n_starts=8):
    """Approximate argmax of the UCB acquisition over a box.

    Runs pattern (compass) search from ``n_starts`` uniform seeds plus
    every training point, and returns the best endpoint.  Deterministic
    in ``seed``.
    """
    bounds = np.asarray(bounds, dtype=np.float64)
    if bounds.ndim != 2 or bounds.shape[1] != 2 or np.any(bounds[:, 1] < bounds[:, 0]):
        raise ValueError("bounds must be a (d, 2) array with high >= low")
    low, high = bounds[:, 0], bounds[:, 1]

    def score(x):
        return ucb(*gp_predict(post, x), kappa)

    gen = substream(seed, STREAM_BAYESOPT)
    starts = low + gen.random((n_starts, low.size)) * (high - low)
    anchors = np.clip(post.points, low, high)
    best_x, best_val = None, -np.inf
    for start in np.vstack([starts, anchors]):
        x, value = _compass_search(score, start, low, high, max_evals=200 * low.size)
        if value > best_val:
            best_x, best_val = x, value
    return best_x


def bayes_opt(objective, bounds, t_rounds, kappa=2.0, n_init=5, seed=0, kernel=None, n_starts=8):
    """Sequential surrogate-based maximization of a black-box objective.

    ``n_init`` scrambled-Halton points are evaluated first, then
    ``t_rounds`` acquisition-driven proposals.  The objective is the
    quantity to MAXIMIZE; callers minimizing a cost pass its negation.
    Observations are internally normalized to the unit box / standardized
    before each GP fit so the fixed kernel scales stay meaningful; the
    recorded history is in original coordinates and raw values.

    Raises ObjectiveEvaluationError (with the partial history attached)
    if the objective fails.
    """
    if t_rounds < 1:
        raise ValueError(f"t_rounds must be >= 1, got {t_rounds}")
    if n_init < 1:
        raise ValueError(f"n_init must be >= 1, got {n_init}")
    bounds = np.asarray(bounds, dtype=np.float64)
    if bounds.ndim != 2 or bounds.shape[1] != 2 or np.any(bounds[:, 1] < bounds[:, 0]):
        raise ValueError("bounds must be a (d, 2) array with high >= low")
    kernel = kernel if kernel is not None else SquaredExponentialKernel()
    low, span = bounds[:, 0], bounds[:, 1] - bounds[:, 0]
    d = low.size

    gen = substream(seed, STREAM_BAYESOPT)
    halton = qmc.Halton(d=d, scramble=True, seed=int(gen.integers(2**63)))
    unit_points = [z for z in halton.random(n_init)]
    trials = []

    def evaluate(z):
        x = low + z * span
        try:
            value = float(objective(x))
        except Exception as exc:
            raise ObjectiveEvaluationError(
                f"objective failed at trial {len(trials) + 1}: {exc}",
                history=_finish(trials),
            ) from exc
        trials.append((x, value))

    for z in unit_points:
        evaluate(z)

    unit_box = np.column_stack([np.zeros(d), np.ones(d)])
    for _ in range(t_rounds):
        zs = np.array(unit_points)
        ys = np.array([v for _, v in trials])
        scale = float(ys.std())
        z_next = None
        if scale > 1e-12:
            post = gp_fit(zs, (ys - ys.mean()) / scale, kernel)
            z_next = maximize_acquisition(
                post, unit_box, kappa, seed=int(gen.integers(2**63)), n_starts=n_starts
            )
            if np.min(np.linalg.norm(zs - z_next, axis=1)) < 1e-8:
                z_next = None  # re-proposing a measured point carries no information
        if z_next is None:
            # No usable signal (constant data or a duplicate proposal):
            # fall back to the next quasi-random design point.
            z_next = halton.random(1)[0]
        unit_points.append(z_next)
        evaluate(z_next)
    return _finish(trials)


def _finish(trials):
    if not trials:
        return BoHistory(trials=[], best_point=None, best_value=-np.inf)
    values = [v for _, v in trials]
    k = int(np.argmax(values))
    return BoHistory(trials=list(trials), best_point=trials[k][0].copy(), best_value=values[k])
