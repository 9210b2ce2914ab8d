"""
Sweep configurations: loading with OmegaConf, expansion of the parameter grid into audit cases and parallel
execution of the audit. Report rows keep the grid order whatever order they finish in.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from omegaconf import DictConfig, ListConfig, OmegaConf
from tqdm import tqdm

from simplex_hoeffding.bounds import TailDirection
from simplex_hoeffding.distributions import DirichletSpec, MultinomialSpec, dirichlet_mean
from simplex_hoeffding.exceptions import ConfigError, PreconditionOrderViolated, SimplexHoeffdingError
from simplex_hoeffding.oracles.audit import FAMILIES, AuditCase, AuditReport, compute_bound, evaluate_case
from simplex_hoeffding.oracles.exact import iter_event_compositions

SWEEP_DEFAULTS = {
    "name": "sweep",
    "family": "multinomial",
    "directions": ["lower", "upper"],
    # grid points violating the order precondition become SKIP rows instead of a config error
    "skip_on_violation": False,
    # oracle distribution of the general family: vertex or point_mass
    "model": "vertex",
    "grid": {},
    "oracle": {"trials": 100_000, "seed": 42, "budget": None, "workers": 1, "confidence": 0.99},
    "output": {"dir": None, "format": "both"},
}


def load_sweep_config(path: Union[str, Path]) -> DictConfig:
    """Loads a JSON (or YAML) sweep config and merges it over SWEEP_DEFAULTS."""
    try:
        user_config = OmegaConf.load(str(path))
    except Exception as e:
        raise ConfigError(f"Cannot read sweep config {path}: {e}") from None
    return make_sweep_config(user_config)


def make_sweep_config(user_config: Union[dict, DictConfig]) -> DictConfig:
    if not isinstance(user_config, DictConfig):
        user_config = OmegaConf.create(user_config)
    config = OmegaConf.merge(OmegaConf.create(SWEEP_DEFAULTS), user_config)
    if config.family not in FAMILIES:
        raise ConfigError(f"Unknown family {config.family!r}, expected one of {FAMILIES}")
    try:
        for direction in config.directions:
            TailDirection.parse(direction)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return config


def _as_list(value) -> list:
    if value is None:
        return []
    if isinstance(value, (ListConfig, DictConfig)):
        value = OmegaConf.to_container(value)
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _grid_values(grid: DictConfig, key: str) -> list:
    values = _as_list(grid.get(key))
    if key == "n":
        return [int(v) for v in values]
    return values


def _all_valid_counts(spec: MultinomialSpec, direction: TailDirection) -> List[list]:
    # integer z satisfies z <= n p (resp. >=) exactly when it satisfies the floor (resp. ceil) threshold
    mu = spec.n * spec.p.coords[1:]
    thresholds = np.floor(mu) if direction is TailDirection.LOWER else np.ceil(mu)
    counts = []
    for prefix, last in iter_event_compositions(spec.n, thresholds.astype(np.int64), direction):
        for value in last:
            tail = prefix.tolist() + [int(value)]
            counts.append([spec.n - sum(tail)] + tail)
    return counts


def _offset_targets(mean: np.ndarray, offsets: list, direction: TailDirection) -> List[list]:
    sign = -1.0 if direction is TailDirection.LOWER else 1.0
    targets = []
    for offset in offsets:
        z = mean + sign * float(offset)
        if np.all(z > 0) and z.sum() < 1:
            targets.append(z.tolist())
        else:
            logging.info(f"Offset {offset} moves the target out of the open simplex, dropping it.")
    return targets


def expand_grid(config: DictConfig) -> List[AuditCase]:
    """
    Expands the grid of a sweep config into audit cases, in the order n, model parameters, directions, targets.

    Multinomial grids take `n`, `p` and `z` (list of count vectors or "all" for every count vector meeting the order
    precondition). Dirichlet grids take `alpha`, `n` and `z` and / or `z_offsets`; general grids the same with `mu`.

    Raises
    ------
    ConfigError
        On malformed grids, or on a precondition violation when skip_on_violation is off.
    """
    grid = config.grid if config.grid is not None else OmegaConf.create({})
    oracle = config.oracle
    directions = [TailDirection.parse(d) for d in config.directions]
    param_key = {"multinomial": "p", "dirichlet": "alpha", "general": "mu"}[config.family]

    cases = []
    try:
        for n in _grid_values(grid, "n"):
            for params in _grid_values(grid, param_key):
                params = [float(x) for x in params]
                for direction in directions:
                    for z in _targets(config.family, grid, n, params, direction):
                        case = AuditCase(case_id=f"{config.name}-{len(cases):04d}", family=config.family,
                                         direction=direction, n=n, z=z, params=params, model=config.model,
                                         trials=int(oracle.trials), seed=int(oracle.seed), budget=oracle.budget,
                                         workers=int(oracle.workers), confidence=float(oracle.confidence))
                        _check_case(case, config.skip_on_violation)
                        cases.append(case)
    except ConfigError:
        raise
    except (SimplexHoeffdingError, ValueError, TypeError) as e:
        raise ConfigError(f"Malformed grid in sweep {config.name!r}: {e}") from None
    return cases


def _targets(family: str, grid: DictConfig, n: int, params: list, direction: TailDirection) -> List[list]:
    z_values = grid.get("z")
    if family == "multinomial":
        if z_values == "all":
            return _all_valid_counts(MultinomialSpec(n, params), direction)
        return [[int(v) for v in z] for z in _as_list(z_values)]
    targets = [[float(v) for v in z] for z in _as_list(z_values)]
    offsets = _as_list(grid.get("z_offsets"))
    if offsets:
        if family == "dirichlet":
            mean = dirichlet_mean(DirichletSpec(params)).coords[1:]
        else:
            mean = np.asarray(params, dtype=np.float64)
        targets += _offset_targets(mean, offsets, direction)
    return targets


def _check_case(case: AuditCase, skip_on_violation: bool) -> None:
    try:
        compute_bound(case)
    except PreconditionOrderViolated as e:
        if not skip_on_violation:
            raise ConfigError(f"Grid point {case.case_id} violates the order precondition ({e}) and "
                              f"skip_on_violation is off.") from None


def run_sweep(config: DictConfig, workers: Optional[int] = None, disable_pbar: bool = True) -> AuditReport:
    """
    Runs the audit over the expanded grid. Rows are evaluated by `workers` threads (config.oracle.workers by default)
    and reported in grid order.
    """
    cases = expand_grid(config)
    workers = int(config.oracle.workers if workers is None else workers)
    logging.info(f"Sweep {config.name}: {len(cases)} grid points, {workers} worker(s).")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        rows = list(tqdm(executor.map(evaluate_case, cases), total=len(cases), disable=disable_pbar,
                         desc=f"sweep {config.name}"))
    return AuditReport(rows)
