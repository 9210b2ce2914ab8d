"""
Implements the multivariate Chernoff-Hoeffding bound for random vectors bounded in a simplex, the exponent function
minimized by the Chernoff method, its closed form minimizer and the KL divergence identity all specializations reduce
to. All arithmetic is done in the natural-log domain.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp, rel_entr

from simplex_hoeffding.exceptions import (
    DegenerateTarget,
    InvalidSimplexPoint,
    PreconditionOrderViolated,
    RequiresStrictInterior,
)

# tolerance on the coordinate sum of simplex points
SUM_TOL = 1e-9
# slack of the partial order precondition, strict unless a caller opts in
ORDER_TOL = 0.0
# tolerance used by numerical property checks
NUM_TOL = 1e-12
# largest x with exp(x) finite in double precision
_LOG_FLOAT_MAX = math.log(np.finfo(np.float64).max)


class TailDirection(str, Enum):
    """Lower is the event {mean <= z}, Upper the event {mean >= z}, both read coordinatewise."""
    LOWER = "lower"
    UPPER = "upper"

    @classmethod
    def parse(cls, value: Union[str, "TailDirection"]) -> "TailDirection":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"Unknown tail direction {value!r}, expected 'lower' or 'upper'.") from None


def _frozen_array(values: Sequence[float]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SimplexPoint:
    """
    Point with k nonnegative coordinates whose sum does not exceed one. Coordinates that are negative by less than
    SUM_TOL are clamped to zero.
    """
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(coords)):
            raise InvalidSimplexPoint(f"Simplex point has non-finite coordinates: {coords.tolist()}")
        if np.any(coords < -SUM_TOL):
            i = int(np.argmin(coords))
            raise InvalidSimplexPoint(f"Coordinate {i + 1} of simplex point is negative ({coords[i]!r}).")
        coords = np.maximum(coords, 0.0)
        total = math.fsum(coords)
        if total > 1 + SUM_TOL:
            raise InvalidSimplexPoint(f"Coordinates of simplex point sum to {total!r} > 1.")
        object.__setattr__(self, "coords", _frozen_array(coords))

    @property
    def k(self) -> int:
        return self.coords.shape[0]

    def __len__(self) -> int:
        return self.k


@dataclass(frozen=True)
class CompletedPoint:
    """
    Point with k+1 nonnegative coordinates summing to one. Index 0 holds the completion coordinate.
    """
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64).reshape(-1)
        if coords.shape[0] < 1 or not np.all(np.isfinite(coords)):
            raise InvalidSimplexPoint(f"Invalid completed point {coords.tolist()}")
        if np.any(coords < -SUM_TOL):
            i = int(np.argmin(coords))
            raise InvalidSimplexPoint(f"Coordinate {i} of completed point is negative ({coords[i]!r}).")
        coords = np.maximum(coords, 0.0)
        total = math.fsum(coords)
        if abs(total - 1) > SUM_TOL:
            raise InvalidSimplexPoint(f"Coordinates of completed point sum to {total!r}, expected 1.")
        object.__setattr__(self, "coords", _frozen_array(coords))

    @property
    def k(self) -> int:
        """Dimension of the point without its completion coordinate."""
        return self.coords.shape[0] - 1

    def head(self) -> SimplexPoint:
        """Drops the completion coordinate."""
        return SimplexPoint(self.coords[1:])


@dataclass(frozen=True)
class ExponentArgument:
    """Free Chernoff parameters t_1, ..., t_k."""
    t: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(t)):
            raise ValueError(f"Exponent argument must be finite, got {t.tolist()}")
        object.__setattr__(self, "t", _frozen_array(t))

    @property
    def k(self) -> int:
        return self.t.shape[0]


@dataclass(frozen=True)
class BoundResult:
    """
    Outcome of a bound computation.

    Parameters
    ----------
    log_bound : float
        n times the summed exponent terms, unclamped. -inf if the divergence is infinite.
    bound : float
        exp(log_bound) clamped to [0, 1].
    per_coordinate_exponent : np.ndarray
        The k+1 terms z_l ln(mu_l / z_l) over the completed vectors.
    n : int
        Number of samples.
    direction : TailDirection
    mu, z : CompletedPoint
        Completed mean and target the bound was computed for.
    divergence_infinite : bool
        True if some z_l > 0 meets mu_l = 0, in which case the bound is 0.
    """
    log_bound: float
    bound: float
    per_coordinate_exponent: np.ndarray
    n: int
    direction: TailDirection
    mu: CompletedPoint
    z: CompletedPoint
    divergence_infinite: bool = False
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def kl(self) -> float:
        return math.inf if self.divergence_infinite else -self.log_bound / self.n


PointLike = Union[SimplexPoint, Sequence[float], np.ndarray]


def as_simplex_point(point: PointLike) -> SimplexPoint:
    if isinstance(point, SimplexPoint):
        return point
    if isinstance(point, CompletedPoint):
        return point.head()
    return SimplexPoint(point)


def as_exponent_argument(t: Union[ExponentArgument, Sequence[float], np.ndarray]) -> ExponentArgument:
    return t if isinstance(t, ExponentArgument) else ExponentArgument(t)


def complete(point: PointLike) -> CompletedPoint:
    """
    Lifts a k-dimensional simplex point to k+1 coordinates by prepending 1 - sum(point).

    Parameters
    ----------
    point : SimplexPoint or array-like
        Point to complete. Array-likes are validated as SimplexPoint first.

    Returns
    -------
    CompletedPoint
        Completed point with the completion coordinate at index 0. A completion coordinate that is negative by
        less than SUM_TOL is clamped to zero.
    """
    point = as_simplex_point(point)
    head = 1.0 - math.fsum(point.coords)
    return CompletedPoint(np.concatenate(([max(head, 0.0)], point.coords)))


def _check_dimensions(mu: SimplexPoint, z: SimplexPoint) -> None:
    if mu.k == 0 or z.k == 0:
        raise DegenerateTarget("Mean and target need at least one coordinate.")
    if mu.k != z.k:
        raise DegenerateTarget(f"Mean has dimension {mu.k} but target has dimension {z.k}.")


def check_order(mu: SimplexPoint, z: SimplexPoint, direction: TailDirection, order_tol: float = ORDER_TOL) -> None:
    """
    Raises PreconditionOrderViolated for the first coordinate l = 1..k where z is not ordered against mu as
    `direction` requires.
    """
    check_order_arrays(mu.coords, z.coords, direction, order_tol)


def check_order_arrays(mu: np.ndarray, z: np.ndarray, direction: TailDirection, order_tol: float = ORDER_TOL) -> None:
    """Same as check_order on raw coordinate arrays (coordinates 1..k, index 0 of the array is coordinate 1)."""
    direction = TailDirection.parse(direction)
    mu = np.asarray(mu, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if direction is TailDirection.LOWER:
        violations = np.flatnonzero(z > mu + order_tol)
    else:
        violations = np.flatnonzero(z < mu - order_tol)
    if violations.size:
        i = int(violations[0])
        raise PreconditionOrderViolated(i + 1, direction.value, float(z[i]), float(mu[i]))


def _exponent_terms(z: CompletedPoint, mu: CompletedPoint) -> np.ndarray:
    # z ln(mu / z) with 0 ln(mu / 0) = 0 and -inf where mu = 0 < z
    return -rel_entr(z.coords, mu.coords)


def kl_divergence(z: CompletedPoint, mu: CompletedPoint) -> float:
    """
    KL divergence sum_l z_l ln(z_l / mu_l) in nats over two completed points, using 0 ln(0 / mu) = 0.

    Returns math.inf if some z_l > 0 meets mu_l = 0.
    """
    if not isinstance(z, CompletedPoint):
        z = CompletedPoint(z)
    if not isinstance(mu, CompletedPoint):
        mu = CompletedPoint(mu)
    if z.k != mu.k:
        raise DegenerateTarget(f"Cannot compare points of dimension {z.k} and {mu.k}.")
    terms = rel_entr(z.coords, mu.coords)
    if np.any(np.isinf(terms)):
        return math.inf
    return math.fsum(terms)


def theorem1_bound(mu: PointLike, z: PointLike, n: int, direction: Union[str, TailDirection],
                   order_tol: float = ORDER_TOL) -> BoundResult:
    """
    Bound on Pr{mean of n independent simplex-bounded vectors <= z} (Lower) or >= z (Upper), where mu is the mean
    vector of the samples:

        prod_{l=0}^{k} (mu_l / z_l)^(n z_l) = exp(-n KL(z || mu))

    Parameters
    ----------
    mu : SimplexPoint or array-like
        Mean vector (k coordinates, without completion coordinate).
    z : SimplexPoint or array-like
        Threshold vector (k coordinates).
    n : int
        Number of samples averaged.
    direction : TailDirection or str
        Lower requires z <= mu coordinatewise, Upper requires z >= mu.
    order_tol : float, optional
        Slack granted to the order precondition, 0 by default.

    Returns
    -------
    BoundResult
    """
    direction = TailDirection.parse(direction)
    n = check_sample_count(n)
    mu = as_simplex_point(mu)
    z = as_simplex_point(z)
    _check_dimensions(mu, z)
    check_order(mu, z, direction, order_tol)

    return completed_bound(complete(mu), complete(z), n, direction)


def completed_bound(mu_c: CompletedPoint, z_c: CompletedPoint, n: int, direction: TailDirection,
                    metadata: Optional[dict] = None) -> BoundResult:
    """exp(-n KL(z_c || mu_c)) for completed points whose order precondition has already been checked."""
    terms = _exponent_terms(z_c, mu_c)
    metadata = metadata or {}
    if np.any(np.isneginf(terms)):
        return BoundResult(log_bound=-math.inf, bound=0.0, per_coordinate_exponent=_frozen_array(terms), n=n,
                           direction=direction, mu=mu_c, z=z_c, divergence_infinite=True, metadata=metadata)

    # + 0.0 normalizes -0.0 at z = mu
    log_bound = n * math.fsum(terms) + 0.0
    bound = min(1.0, max(0.0, math.exp(log_bound)))
    return BoundResult(log_bound=log_bound, bound=bound, per_coordinate_exponent=_frozen_array(terms), n=n,
                       direction=direction, mu=mu_c, z=z_c, metadata=metadata)


def check_sample_count(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"Sample count must be a positive integer, got {n!r}")
    return int(n)


def mgf_envelope(t, mu: PointLike) -> float:
    """ln(mu_0 + sum_l mu_l exp(t_l)), evaluated as a weighted log-sum-exp."""
    t = as_exponent_argument(t)
    mu_c = complete(mu)
    if t.k != mu_c.k:
        raise DegenerateTarget(f"Exponent argument has dimension {t.k} but mean has dimension {mu_c.k}.")
    return float(logsumexp(np.concatenate(([0.0], t.t)), b=mu_c.coords))


def exponent_M(t, mu: PointLike, z: PointLike) -> float:
    """
    Per-sample log of the Chernoff bound,

        M(t) = -sum_l t_l z_l + ln(mu_0 + sum_l mu_l exp(t_l)).

    M(0) = 0 for every mu and z, and its minimum over t equals -KL(z || mu).
    """
    t = as_exponent_argument(t)
    z = as_simplex_point(z)
    if t.k != z.k:
        raise DegenerateTarget(f"Exponent argument has dimension {t.k} but target has dimension {z.k}.")
    return mgf_envelope(t, mu) - float(np.dot(t.t, z.coords))


def optimal_t(mu: PointLike, z: PointLike) -> ExponentArgument:
    """
    Stationary point of exponent_M, t_l = ln(z_l mu_0 / (z_0 mu_l)).

    Parameters
    ----------
    mu, z : SimplexPoint or array-like
        Mean and target. Every coordinate of both completed points must be strictly positive.

    Returns
    -------
    ExponentArgument

    Raises
    ------
    RequiresStrictInterior
        If some coordinate of the completed mean or target is 0.
    """
    mu = as_simplex_point(mu)
    z = as_simplex_point(z)
    _check_dimensions(mu, z)
    mu_c, z_c = complete(mu), complete(z)
    for name, point in (("mu", mu_c), ("z", z_c)):
        zeros = np.flatnonzero(point.coords <= 0)
        if zeros.size:
            raise RequiresStrictInterior(int(zeros[0]), f"optimal_t needs {name}_{int(zeros[0])} > 0.")
    log_mu, log_z = np.log(mu_c.coords), np.log(z_c.coords)
    return ExponentArgument((log_z[1:] + log_mu[0]) - (log_z[0] + log_mu[1:]))


def chernoff_log_bound(t, mu: PointLike, z: PointLike, n: int, direction: Union[str, TailDirection]) -> float:
    """
    n * M(t) for an admissible t, i.e. the log of the Chernoff bound before optimization. Lower tails admit only
    t <= 0 and upper tails only t >= 0.
    """
    direction = TailDirection.parse(direction)
    n = check_sample_count(n)
    t = as_exponent_argument(t)
    if direction is TailDirection.LOWER and np.any(t.t > 0):
        raise ValueError("Lower tail Chernoff bounds need t <= 0 in every coordinate.")
    if direction is TailDirection.UPPER and np.any(t.t < 0):
        raise ValueError("Upper tail Chernoff bounds need t >= 0 in every coordinate.")
    return n * exponent_M(t, mu, z)


def lemma1_gap(x: PointLike, t) -> float:
    """
    Difference (1 - sum x + sum x exp(t)) - prod exp(t x) of the two sides of the convexity inequality behind the
    bound. Nonnegative for every simplex point x and real t.
    """
    x_c = complete(x)
    t = as_exponent_argument(t)
    if t.k != x_c.k:
        raise DegenerateTarget(f"Exponent argument has dimension {t.k} but point has dimension {x_c.k}.")
    log_lhs = float(logsumexp(np.concatenate(([0.0], t.t)), b=x_c.coords))
    log_rhs = float(np.dot(t.t, x_c.coords[1:]))
    if log_lhs == log_rhs:
        return 0.0
    # exp(a) - exp(b) = sign * exp(max(a, b) + ln(1 - exp(-|a - b|)))
    sign = 1.0 if log_lhs > log_rhs else -1.0
    log_gap = max(log_lhs, log_rhs) + math.log(-math.expm1(-abs(log_lhs - log_rhs)))
    return sign * (math.inf if log_gap >= _LOG_FLOAT_MAX else math.exp(log_gap))


def hoeffding_binary_bound(mu: float, z: float, n: int) -> float:
    """Classical scalar bound (mu/z)^(nz) ((1-mu)/(1-z))^(n(1-z)) for 0 < z < 1 and 0 < mu < 1."""
    n = check_sample_count(n)
    if not (0 < z < 1 and 0 < mu < 1):
        raise RequiresStrictInterior(0, f"Scalar bound needs 0 < mu, z < 1, got mu={mu!r}, z={z!r}")
    log_bound = n * (z * math.log(mu / z) + (1 - z) * math.log((1 - mu) / (1 - z)))
    return min(1.0, math.exp(log_bound))
