"""
Multinomial and Dirichlet parameter models: their specializations of the simplex bound, log-pmf / log-density
evaluation and samplers driven by a RandomStream.

Both families are parameterized over all k+1 cells, index 0 being the completion cell.
"""

import math
import threading
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import gammaln, xlogy

from simplex_hoeffding.bounds import (
    ORDER_TOL,
    SUM_TOL,
    BoundResult,
    CompletedPoint,
    TailDirection,
    as_simplex_point,
    check_order_arrays,
    check_sample_count,
    complete,
    completed_bound,
    theorem1_bound,
)
from simplex_hoeffding.exceptions import CountMismatch, InvalidSimplexPoint, InvalidSpec
from simplex_hoeffding.oracles.streams import RandomStream


@dataclass(frozen=True)
class MultinomialSpec:
    """
    Multinomial model with n trials over k+1 cells.

    Parameters
    ----------
    n : int
        Number of trials.
    p : CompletedPoint or array-like
        Cell probabilities p_0, ..., p_k, all strictly positive and summing to one.
    """
    n: int
    p: CompletedPoint

    def __post_init__(self):
        try:
            n = check_sample_count(self.n)
        except (TypeError, ValueError) as e:
            raise InvalidSpec(str(e)) from None
        try:
            p = self.p if isinstance(self.p, CompletedPoint) else CompletedPoint(self.p)
        except InvalidSimplexPoint as e:
            raise InvalidSpec(f"Invalid cell probabilities: {e}") from None
        if p.k < 1:
            raise InvalidSpec("Multinomial model needs at least two cells.")
        if np.any(p.coords <= 0):
            raise InvalidSpec(f"Cell probabilities must be positive, got {p.coords.tolist()}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "p", p)

    @property
    def k(self) -> int:
        return self.p.k


@dataclass(frozen=True)
class DirichletSpec:
    """Dirichlet model with concentration parameters alpha_0, ..., alpha_k."""
    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=np.float64).reshape(-1)
        if alpha.shape[0] < 2:
            raise InvalidSpec("Dirichlet model needs at least two concentration parameters.")
        if not np.all(np.isfinite(alpha)) or np.any(alpha <= 0):
            raise InvalidSpec(f"Concentration parameters must be positive and finite, got {alpha.tolist()}")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @property
    def k(self) -> int:
        return self.alpha.shape[0] - 1


@dataclass(frozen=True)
class CountVector:
    """Nonnegative integer counts of k+1 cells."""
    counts: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.counts)
        counts = raw.astype(np.int64).reshape(-1)
        if not np.array_equal(counts, raw.reshape(-1)):
            raise CountMismatch(f"Counts must be integers, got {raw.tolist()}")
        if np.any(counts < 0):
            raise CountMismatch(f"Counts must be nonnegative, got {counts.tolist()}")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def k(self) -> int:
        return self.counts.shape[0] - 1


CountLike = Union[CountVector, Sequence[int], np.ndarray]


def as_count_vector(x: CountLike) -> CountVector:
    return x if isinstance(x, CountVector) else CountVector(x)


class LogFactorialTable:
    """
    Table of ln(m!) for m = 0..size-1, built from gammaln on first use and extended when larger m are requested.
    """

    def __init__(self, initial_size: int = 10**6) -> None:
        self.initial_size = initial_size
        self._table = np.zeros(0)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return self._table.shape[0]

    def _ensure(self, max_m: int) -> np.ndarray:
        table = self._table
        if max_m < table.shape[0]:
            return table
        with self._lock:
            if max_m >= self._table.shape[0]:
                size = max(self.initial_size, 2 * self._table.shape[0], max_m + 1)
                self._table = gammaln(np.arange(size, dtype=np.float64) + 1.0)
            return self._table

    def __call__(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=np.int64)
        table = self._ensure(int(m.max()) if m.size else 0)
        return table[m]


log_factorial = LogFactorialTable()


def multinomial_mean(spec: MultinomialSpec) -> np.ndarray:
    """Expected counts n p_i of all k+1 cells."""
    return spec.n * spec.p.coords


def dirichlet_mean(spec: DirichletSpec) -> CompletedPoint:
    return CompletedPoint(spec.alpha / math.fsum(spec.alpha))


def _check_counts(spec: MultinomialSpec, x: CountVector) -> None:
    if x.k != spec.k:
        raise CountMismatch(f"Count vector has {x.k + 1} cells but the model has {spec.k + 1}.")
    if x.n != spec.n:
        raise CountMismatch(f"Counts sum to {x.n} but the model has n = {spec.n} trials.")


def multinomial_log_pmf(spec: MultinomialSpec, x: CountLike) -> float:
    """
    ln Pr{X = x} = ln n! - sum_i ln x_i! + sum_i x_i ln p_i.

    Raises
    ------
    CountMismatch
        If the counts do not sum to spec.n or have the wrong number of cells.
    """
    x = as_count_vector(x)
    _check_counts(spec, x)
    return float(multinomial_log_pmf_batch(spec, x.counts[np.newaxis, :])[0])


def multinomial_log_pmf_batch(spec: MultinomialSpec, counts: np.ndarray) -> np.ndarray:
    """Vectorized log-pmf over the rows of an (m, k+1) count matrix. Rows are assumed to sum to spec.n."""
    counts = np.asarray(counts, dtype=np.int64)
    return (log_factorial(spec.n) - log_factorial(counts).sum(axis=-1)
            + xlogy(counts, spec.p.coords).sum(axis=-1))


def multinomial_bound(spec: MultinomialSpec, z: CountLike, direction: Union[str, TailDirection],
                      order_tol: float = ORDER_TOL) -> BoundResult:
    """
    Bound prod_{i=0}^{k} (mu_i / z_i)^(z_i) with mu_i = n p_i on Pr{X <= z} (Lower) or Pr{X >= z} (Upper), where
    X = (X_1, ..., X_k) are the counts of cells 1..k. Cells with z_i = 0 contribute a factor of 1.

    Parameters
    ----------
    spec : MultinomialSpec
    z : CountVector or array-like
        Threshold counts for all k+1 cells, summing to spec.n.
    direction : TailDirection or str
        The order precondition is checked on cells 1..k only.

    Returns
    -------
    BoundResult
        per_coordinate_exponent holds the per-trial terms (z_i / n) ln(mu_i / z_i).
    """
    direction = TailDirection.parse(direction)
    z = as_count_vector(z)
    _check_counts(spec, z)
    mu = multinomial_mean(spec)
    check_order_arrays(mu[1:], z.counts[1:], direction, order_tol)

    # same completed-point evaluation as theorem1_bound at mu = p, z = counts / n
    mu_c = complete(spec.p.coords[1:])
    z_c = complete(z.counts[1:] / spec.n)
    return completed_bound(mu_c, z_c, spec.n, direction, metadata={"counts": z.counts.tolist()})


def dirichlet_bound(spec: DirichletSpec, z, n: int, direction: Union[str, TailDirection],
                    order_tol: float = ORDER_TOL) -> BoundResult:
    """
    Bound [prod_i (mu_i / z_i)^(z_i)]^n on the mean of n independent Dirichlet vectors, mu_i = alpha_i / sum(alpha).
    Same computation as theorem1_bound at the Dirichlet mean.

    Raises
    ------
    InvalidSimplexPoint
        If z (completion coordinate included) is not strictly positive.
    """
    z = as_simplex_point(z)
    if np.any(complete(z).coords <= 0):
        raise InvalidSimplexPoint(f"Dirichlet bound needs a strictly positive target, got {z.coords.tolist()}")
    mean = dirichlet_mean(spec)
    result = theorem1_bound(mean.head(), z, n, direction, order_tol=order_tol)
    result.metadata.update({"alpha": spec.alpha.tolist(), "dirichlet_mean": mean.coords.tolist()})
    return result


def dirichlet_log_pdf(spec: DirichletSpec, x) -> float:
    """
    ln f(x; alpha) = sum_i (alpha_i - 1) ln x_i - ln B(alpha)
    with ln B(alpha) = sum_i ln Gamma(alpha_i) - ln Gamma(sum alpha).
    """
    x = np.asarray(x.coords if isinstance(x, CompletedPoint) else x, dtype=np.float64).reshape(-1)
    if x.shape[0] != spec.k + 1:
        raise InvalidSimplexPoint(f"Point has {x.shape[0]} coordinates but the model has {spec.k + 1}.")
    if np.any(x < 0) or abs(math.fsum(x) - 1) > SUM_TOL:
        return -math.inf
    terms = xlogy(spec.alpha - 1, x)
    # a zero coordinate with alpha_i > 1 zeroes the density even where another one diverges
    if np.any(np.isneginf(terms)):
        return -math.inf
    if np.any(np.isposinf(terms)):
        return math.inf
    log_norm = math.fsum(gammaln(spec.alpha)) - float(gammaln(math.fsum(spec.alpha)))
    return math.fsum(terms) - log_norm


def sample_multinomial(spec: MultinomialSpec, stream: RandomStream) -> CountVector:
    """n categorical draws accumulated into cell counts, deterministic given the stream state."""
    return CountVector(stream.generator.multinomial(spec.n, spec.p.coords))


def draw_dirichlet(alpha: np.ndarray, generator: np.random.Generator, size: int) -> np.ndarray:
    """
    (size, k+1) array of Dirichlet vectors from normalized gamma draws. Rows whose gamma draws all underflow (tiny
    alpha) are replaced by the vertex e_i with i drawn with probability alpha_i / sum(alpha), the small-alpha limit.
    """
    gammas = generator.standard_gamma(alpha, size=(size, alpha.shape[0]))
    totals = gammas.sum(axis=1, keepdims=True)
    underflow = totals[:, 0] == 0
    if np.any(underflow):
        cells = generator.choice(alpha.shape[0], size=int(underflow.sum()), p=alpha / alpha.sum())
        gammas[underflow] = np.eye(alpha.shape[0])[cells]
        totals[underflow] = 1.0
    return gammas / totals


def sample_dirichlet(spec: DirichletSpec, stream: RandomStream) -> CompletedPoint:
    return CompletedPoint(draw_dirichlet(spec.alpha, stream.generator, 1)[0])
