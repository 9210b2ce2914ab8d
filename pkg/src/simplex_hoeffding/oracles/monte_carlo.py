"""
Seeded Monte Carlo estimation of tail probabilities of the sample mean of simplex-bounded vectors.

Trials are cut into fixed-size blocks and block b draws from substream b of the master seed, so an estimate depends on
(model, n, z, direction, trials, seed) only and not on how many workers process the blocks.
"""

import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.stats import beta
from tqdm import tqdm

from simplex_hoeffding.bounds import CompletedPoint, SimplexPoint, TailDirection, as_simplex_point, complete
from simplex_hoeffding.distributions import DirichletSpec, dirichlet_mean, draw_dirichlet
from simplex_hoeffding.exceptions import InvalidModel
from simplex_hoeffding.oracles.streams import RandomStream, resolve_seed

BLOCK_SIZE = 1000
DEFAULT_CONFIDENCE = 0.99
MIN_TRIALS = 100


class SamplerHandle(ABC):
    """Distribution of a single simplex-bounded vector (coordinates 1..k)."""

    @property
    @abstractmethod
    def model_id(self) -> str:
        """Stable identifier of the model and its parameters."""

    @property
    @abstractmethod
    def k(self) -> int:
        pass

    @abstractmethod
    def mean(self) -> SimplexPoint:
        pass

    @abstractmethod
    def draw(self, generator: np.random.Generator, size: int) -> np.ndarray:
        """
        Draws `size` independent vectors.

        Returns
        -------
        np.ndarray
            Array of shape (size, k).
        """

    def draw_means(self, generator: np.random.Generator, n: int, size: int) -> np.ndarray:
        """Means of n independent vectors, repeated `size` times, shape (size, k)."""
        return self.draw(generator, size * n).reshape(size, n, self.k).mean(axis=1)


class DirichletSampler(SamplerHandle):
    def __init__(self, spec: DirichletSpec) -> None:
        self.spec = spec

    @property
    def model_id(self) -> str:
        return f"dirichlet({','.join(repr(float(a)) for a in self.spec.alpha)})"

    @property
    def k(self) -> int:
        return self.spec.k

    def mean(self) -> SimplexPoint:
        return dirichlet_mean(self.spec).head()

    def draw(self, generator: np.random.Generator, size: int) -> np.ndarray:
        return draw_dirichlet(self.spec.alpha, generator, size)[:, 1:]


class CategoricalSampler(SamplerHandle):
    """
    Vertex-valued vectors: cell i is hit with probability p_i and the vector is the unit vector e_i (zero vector for
    cell 0). This is a single-trial multinomial, and the mean of n draws is Multinomial(n, p) / n.
    """

    def __init__(self, p: Union[CompletedPoint, np.ndarray]) -> None:
        self.p = p if isinstance(p, CompletedPoint) else CompletedPoint(p)

    @property
    def model_id(self) -> str:
        return f"categorical({','.join(repr(float(p)) for p in self.p.coords)})"

    @property
    def k(self) -> int:
        return self.p.k

    def mean(self) -> SimplexPoint:
        return self.p.head()

    def draw(self, generator: np.random.Generator, size: int) -> np.ndarray:
        cells = generator.choice(self.k + 1, size=size, p=self.p.coords)
        return np.eye(self.k + 1)[cells][:, 1:]

    def draw_means(self, generator: np.random.Generator, n: int, size: int) -> np.ndarray:
        return generator.multinomial(n, self.p.coords, size=size)[:, 1:] / n


class PointMassSampler(SamplerHandle):
    """Degenerate distribution concentrated at a single point."""

    def __init__(self, point) -> None:
        self.point = as_simplex_point(point)

    @property
    def model_id(self) -> str:
        return f"point_mass({','.join(repr(float(x)) for x in self.point.coords)})"

    @property
    def k(self) -> int:
        return self.point.k

    def mean(self) -> SimplexPoint:
        return self.point

    def draw(self, generator: np.random.Generator, size: int) -> np.ndarray:
        return np.tile(self.point.coords, (size, 1))

    def draw_means(self, generator: np.random.Generator, n: int, size: int) -> np.ndarray:
        # averaging identical floats may not reproduce them exactly
        return self.draw(generator, size)


@dataclass(frozen=True)
class TailEstimate:
    """
    Monte Carlo estimate of a tail probability with its Clopper-Pearson interval.

    Parameters
    ----------
    p_hat : float
        hits / trials.
    ci_low, ci_high : float
        Two-sided interval at `confidence`.
    """
    p_hat: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int
    hits: int
    confidence: float = DEFAULT_CONFIDENCE
    model_id: str = ""
    # trials per substream; with the seed it fixes the draws
    block_size: int = BLOCK_SIZE


def clopper_pearson(hits: int, trials: int, confidence: float = DEFAULT_CONFIDENCE) -> tuple:
    """
    Exact two-sided binomial interval from beta quantiles. The lower end is 0 when there are no hits and the upper end
    is 1 when every trial hits.
    """
    if trials < 1 or not 0 <= hits <= trials:
        raise ValueError(f"Need 0 <= hits <= trials and trials >= 1, got hits={hits}, trials={trials}")
    if not 0 < confidence < 1:
        raise ValueError(f"Confidence must lie in (0, 1), got {confidence}")
    alpha = 1 - confidence
    p_hat = hits / trials
    low = 0.0 if hits == 0 else float(beta.ppf(alpha / 2, hits, trials - hits + 1))
    high = 1.0 if hits == trials else float(beta.ppf(1 - alpha / 2, hits + 1, trials - hits))
    return min(low, p_hat), max(high, p_hat)


def _event_hits(means: np.ndarray, z: np.ndarray, direction: TailDirection) -> int:
    if direction is TailDirection.LOWER:
        inside = np.all(means <= z, axis=1)
    else:
        inside = np.all(means >= z, axis=1)
    return int(np.count_nonzero(inside))


def mc_mean_tail(model: SamplerHandle, n: int, z, direction: Union[str, TailDirection], trials: int,
                 seed: Optional[int] = None, workers: int = 1, confidence: float = DEFAULT_CONFIDENCE,
                 block_size: int = BLOCK_SIZE, disable_pbar: bool = True) -> TailEstimate:
    """
    Estimates Pr{mean of n i.i.d. draws <= z} (Lower) or >= z (Upper), coordinatewise over 1..k.

    Parameters
    ----------
    model : SamplerHandle
        Distribution of a single vector.
    n : int
        Number of vectors averaged per trial.
    z : SimplexPoint or array-like
        Threshold (k coordinates).
    trials : int
        Number of trials, at least 100.
    seed : int, optional
        Master seed, 42 if not provided.
    workers : int
        Number of threads processing blocks. Does not affect the result.
    block_size : int
        Trials per substream block. Part of the reproducibility key together with the seed.

    Returns
    -------
    TailEstimate
    """
    if not isinstance(model, SamplerHandle):
        raise InvalidModel(f"Expected a SamplerHandle, got {type(model).__name__}")
    direction = TailDirection.parse(direction)
    z = as_simplex_point(z)
    if z.k != model.k:
        raise InvalidModel(f"Model produces {model.k}-dimensional vectors but the threshold has dimension {z.k}.")
    if int(n) != n or n < 1:
        raise ValueError(f"Sample count must be a positive integer, got {n!r}")
    if trials < MIN_TRIALS:
        raise ValueError(f"Monte Carlo estimates need at least {MIN_TRIALS} trials, got {trials}")
    seed = resolve_seed(seed)
    master = RandomStream(seed)
    n_blocks = math.ceil(trials / block_size)

    def _count_block(b: int) -> int:
        size = min(block_size, trials - b * block_size)
        means = model.draw_means(master.substream(b).generator, int(n), size)
        return _event_hits(means, z.coords, direction)

    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as executor:
        block_hits = list(tqdm(executor.map(_count_block, range(n_blocks)), total=n_blocks, disable=disable_pbar,
                               desc=f"MC {model.model_id}"))

    hits = sum(block_hits)
    ci_low, ci_high = clopper_pearson(hits, trials, confidence)
    return TailEstimate(p_hat=hits / trials, ci_low=ci_low, ci_high=ci_high, trials=int(trials), seed=seed, hits=hits,
                        confidence=confidence, model_id=model.model_id, block_size=int(block_size))


def sampler_for(family: str, params) -> SamplerHandle:
    """
    Builds a sampler from a family name: 'dirichlet' (alpha over k+1 cells), 'categorical' (p over k+1 cells) or
    'point_mass' (a k-dimensional point).
    """
    if family == "dirichlet":
        return DirichletSampler(params if isinstance(params, DirichletSpec) else DirichletSpec(params))
    if family in ("categorical", "multinomial", "vertex"):
        return CategoricalSampler(params)
    if family == "point_mass":
        return PointMassSampler(params)
    raise InvalidModel(f"Unknown model family {family!r}")


def vertex_sampler(mu) -> CategoricalSampler:
    """Vertex distribution with mean mu, the extremal distribution for the convexity step of the bound."""
    return CategoricalSampler(complete(mu))
