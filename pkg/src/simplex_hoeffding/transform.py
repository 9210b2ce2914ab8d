"""
Translate-and-scale map from box-bounded vectors to simplex-bounded ones, so that bounds stated for the simplex apply
to arbitrary bounded data. Bounds are shared by all samples.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from simplex_hoeffding.bounds import BoundResult, SimplexPoint, TailDirection, as_simplex_point, theorem1_bound
from simplex_hoeffding.exceptions import DegenerateBox, OutOfBox


@dataclass(frozen=True)
class BoxBounds:
    """Closed box [lower_1, upper_1] x ... x [lower_k, upper_k] in data units."""
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.array(self.lower, dtype=np.float64).reshape(-1)
        upper = np.array(self.upper, dtype=np.float64).reshape(-1)
        if lower.shape != upper.shape:
            raise ValueError(f"Box has {lower.shape[0]} lower but {upper.shape[0]} upper bounds.")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("Box bounds must be finite.")
        inverted = np.flatnonzero(lower > upper)
        if inverted.size:
            i = int(inverted[0])
            raise ValueError(f"Box bound {i + 1} is inverted: lower={lower[i]!r} > upper={upper[i]!r}")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def k(self) -> int:
        return self.lower.shape[0]

    @property
    def scale(self) -> float:
        """Sum of the side lengths, the shared denominator of the map."""
        return math.fsum(self.upper - self.lower)


def _scale_of(bounds: BoxBounds) -> float:
    scale = bounds.scale
    if scale <= 0:
        raise DegenerateBox("Box has zero total side length, the simplex map is undefined.")
    return scale


def box_to_simplex(x: Union[Sequence[float], np.ndarray], bounds: BoxBounds) -> SimplexPoint:
    """
    Maps a point of the box to y_l = (x_l - lower_l) / S with S = sum_l (upper_l - lower_l).

    Raises
    ------
    OutOfBox
        If some coordinate lies outside [lower_l, upper_l]. The 1-based index is reported.
    DegenerateBox
        If S = 0.
    """
    scale = _scale_of(bounds)
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != bounds.k:
        raise OutOfBox(0, f"Point has dimension {x.shape[0]} but the box has dimension {bounds.k}.")
    outside = np.flatnonzero((x < bounds.lower) | (x > bounds.upper))
    if outside.size:
        i = int(outside[0])
        raise OutOfBox(i + 1, f"Coordinate {i + 1} = {x[i]!r} lies outside [{bounds.lower[i]!r}, {bounds.upper[i]!r}]")
    return SimplexPoint((x - bounds.lower) / scale)


def simplex_to_box_threshold(z, bounds: BoxBounds) -> np.ndarray:
    """Inverse of box_to_simplex, x_l = lower_l + z_l S, so thresholds can be stated in data units."""
    scale = _scale_of(bounds)
    z = as_simplex_point(z)
    if z.k != bounds.k:
        raise ValueError(f"Point has dimension {z.k} but the box has dimension {bounds.k}.")
    return bounds.lower + z.coords * scale


def box_bound(mu_box, z_box, bounds: BoxBounds, n: int, direction: Union[str, TailDirection],
              **kwargs) -> BoundResult:
    """
    Bound for the mean of n samples living in `bounds`, with the mean and threshold given in data units. The map is
    order preserving, so the order precondition carries over unchanged.
    """
    mu = box_to_simplex(mu_box, bounds)
    z = box_to_simplex(z_box, bounds)
    result = theorem1_bound(mu, z, n, direction, **kwargs)
    result.metadata.update({"box_lower": bounds.lower.tolist(), "box_upper": bounds.upper.tolist()})
    return result
