"""
Exact multinomial tail probabilities by enumerating the compositions of n into k+1 cells that lie in the tail event.
Tail events constrain cells 1..k only, cell 0 takes whatever is left.
"""

import logging
import math
from typing import Iterator, Tuple, Union

import numpy as np
from scipy.special import xlogy

from simplex_hoeffding.bounds import TailDirection
from simplex_hoeffding.distributions import CountVector, MultinomialSpec, log_factorial
from simplex_hoeffding.exceptions import BudgetExceeded, CountMismatch
from simplex_hoeffding.utils.utils import get_enumeration_budget


def lattice_size(n: int, k: int) -> int:
    """Number of compositions of n into k+1 nonnegative parts."""
    return math.comb(n + k, k)


def tail_thresholds(spec: MultinomialSpec, z) -> np.ndarray:
    """
    Thresholds for cells 1..k. Accepts a CountVector / k+1 cell counts (cell 0 is dropped) or k thresholds.
    """
    counts = z.counts if isinstance(z, CountVector) else np.asarray(z)
    raw = counts.reshape(-1)
    thresholds = raw.astype(np.int64)
    if not np.array_equal(thresholds, raw):
        raise CountMismatch(f"Thresholds must be integers, got {raw.tolist()}")
    if thresholds.shape[0] == spec.k + 1:
        thresholds = thresholds[1:]
    elif thresholds.shape[0] != spec.k:
        raise CountMismatch(f"Expected {spec.k} thresholds or {spec.k + 1} cell counts, got {thresholds.shape[0]}")
    return thresholds


def iter_event_compositions(n: int, thresholds: np.ndarray,
                            direction: TailDirection) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """
    Enumerates the compositions (x_0, ..., x_k) of n with x_i <= z_i (Lower) or x_i >= z_i (Upper) for i = 1..k in
    reverse lexicographic order of (x_1, ..., x_k).

    Yields
    ------
    prefix : np.ndarray
        Fixed counts (x_1, ..., x_{k-1}).
    last : np.ndarray
        All admissible values of x_k for that prefix; x_0 = n - sum(prefix) - last.
    """
    direction = TailDirection.parse(direction)
    k = thresholds.shape[0]
    # upper tail: cells i..k need at least this many trials in total
    still_needed = np.concatenate((np.cumsum(np.maximum(thresholds, 0)[::-1])[::-1], [0]))

    def _recurse(i: int, remaining: int, prefix: list):
        if direction is TailDirection.LOWER:
            low, high = 0, min(int(thresholds[i]), remaining)
        else:
            low, high = max(int(thresholds[i]), 0), remaining - int(still_needed[i + 1])
        if low > high:
            return
        if i == k - 1:
            yield np.array(prefix, dtype=np.int64), np.arange(high, low - 1, -1, dtype=np.int64)
            return
        for value in range(high, low - 1, -1):
            yield from _recurse(i + 1, remaining - value, prefix + [value])

    yield from _recurse(0, n, [])


def multinomial_exact_tail(spec: MultinomialSpec, z, direction: Union[str, TailDirection],
                           budget: int = None) -> float:
    """
    Pr{X_i <= z_i for i = 1..k} (Lower) or Pr{X_i >= z_i for i = 1..k} (Upper) for X ~ Multinomial(n, p).

    Parameters
    ----------
    spec : MultinomialSpec
    z : CountVector or array-like
        k+1 cell counts (cell 0 ignored) or k thresholds.
    direction : TailDirection or str
    budget : int, optional
        Largest admissible lattice size C(n + k, k). Defaults to the environment configured budget.

    Returns
    -------
    float
        Tail probability. Terms are evaluated in log space and summed exactly with math.fsum.

    Raises
    ------
    BudgetExceeded
        If the full lattice is larger than the budget.
    """
    direction = TailDirection.parse(direction)
    thresholds = tail_thresholds(spec, z)
    allowed = get_enumeration_budget(budget)
    required = lattice_size(spec.n, spec.k)
    if required > allowed:
        raise BudgetExceeded(required, allowed)
    logging.debug(f"Enumerating up to {required} compositions (budget {allowed}).")

    log_p = np.log(spec.p.coords)
    log_n_fact = float(log_factorial(spec.n))
    partial_sums = []
    for prefix, last in iter_event_compositions(spec.n, thresholds, direction):
        head = spec.n - int(prefix.sum())
        first = head - last
        log_terms = (log_n_fact - float(log_factorial(prefix).sum()) + float(xlogy(prefix, spec.p.coords[1:-1]).sum())
                     - log_factorial(last) - log_factorial(first) + last * log_p[-1] + first * log_p[0])
        partial_sums.append(math.fsum(np.exp(log_terms)))
    return min(1.0, math.fsum(partial_sums))
