"""
Batch check that computed bounds dominate the true tail probability. Each case is evaluated against the exact
multinomial oracle where possible and against the Monte Carlo oracle otherwise.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np

from simplex_hoeffding.bounds import BoundResult, TailDirection, complete, theorem1_bound
from simplex_hoeffding.distributions import DirichletSpec, MultinomialSpec, dirichlet_bound, multinomial_bound
from simplex_hoeffding.exceptions import PreconditionOrderViolated, SimplexHoeffdingError
from simplex_hoeffding.oracles.exact import multinomial_exact_tail
from simplex_hoeffding.oracles.monte_carlo import (
    DEFAULT_CONFIDENCE,
    DirichletSampler,
    PointMassSampler,
    TailEstimate,
    mc_mean_tail,
    vertex_sampler,
)

FAMILIES = ("general", "multinomial", "dirichlet")
EXACT_TOL = 1e-12


@dataclass
class AuditCase:
    """
    One grid point of an audit.

    Parameters
    ----------
    case_id : str
    family : str
        'general' (mu given directly), 'multinomial' (p over k+1 cells, z as counts) or 'dirichlet' (alpha over
        k+1 cells).
    direction : TailDirection or str
    n : int
        Number of samples (trials for the multinomial family).
    z : list
        Threshold. k+1 cell counts or k thresholds for the multinomial family, k coordinates otherwise.
    params : list
        mu (general), p (multinomial) or alpha (dirichlet).
    model : str
        Distribution used by the oracle of the general family: 'vertex' or 'point_mass'.
    """
    case_id: str
    family: str
    direction: Union[str, TailDirection]
    n: int
    z: list
    params: list
    model: str = "vertex"
    trials: int = 100_000
    seed: int = 42
    budget: Optional[int] = None
    workers: int = 1
    confidence: float = DEFAULT_CONFIDENCE

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"Unknown family {self.family!r}, expected one of {FAMILIES}")
        self.direction = TailDirection.parse(self.direction)


@dataclass
class AuditRow:
    case_id: str
    family: str
    direction: str
    n: int
    params: list
    z: list
    bound: Optional[float] = None
    log_bound: Optional[float] = None
    oracle_kind: str = "none"
    oracle_value: Optional[float] = None
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    margin: Optional[float] = None
    verdict: str = "SKIP"
    note: str = ""


# column order of CSV reports
ROW_FIELDS = tuple(AuditRow.__dataclass_fields__)


@dataclass
class AuditReport:
    rows: List[AuditRow] = field(default_factory=list)

    def count(self, verdict: str) -> int:
        return sum(row.verdict == verdict for row in self.rows)

    @property
    def passed(self) -> bool:
        return self.count("FAIL") == 0

    def summary(self) -> dict:
        return {"total": len(self.rows), "pass": self.count("PASS"), "fail": self.count("FAIL"),
                "skip": self.count("SKIP")}

    def to_records(self) -> List[dict]:
        return [asdict(row) for row in self.rows]


def compute_bound(case: AuditCase) -> BoundResult:
    if case.family == "multinomial":
        spec = MultinomialSpec(case.n, case.params)
        return multinomial_bound(spec, full_counts(spec, case.z), case.direction)
    if case.family == "dirichlet":
        return dirichlet_bound(DirichletSpec(case.params), case.z, case.n, case.direction)
    return theorem1_bound(case.params, case.z, case.n, case.direction)


def full_counts(spec: MultinomialSpec, z: Sequence[int]) -> np.ndarray:
    """k thresholds are completed by cell 0 = n - sum; k+1 counts are returned unchanged."""
    z = np.asarray(z, dtype=np.int64)
    if z.shape[0] == spec.k:
        return np.concatenate(([spec.n - int(z.sum())], z))
    return z


def _vertex_count_thresholds(mu_z: Sequence[float], n: int, direction: TailDirection) -> np.ndarray:
    # mean of n vertex draws is counts / n, so {counts / n <= z} = {counts <= floor(n z)}
    scaled = [Fraction(float(value)) * n for value in mu_z]
    if direction is TailDirection.LOWER:
        return np.array([math.floor(value) for value in scaled], dtype=np.int64)
    return np.array([math.ceil(value) for value in scaled], dtype=np.int64)


def compute_oracle(case: AuditCase, disable_pbar: bool = True) -> Union[float, TailEstimate]:
    """
    Exact tail probability (float) for multinomial cases and vertex-model general cases, a Monte Carlo TailEstimate
    for Dirichlet and point-mass cases.
    """
    if case.family == "multinomial":
        spec = MultinomialSpec(case.n, case.params)
        return multinomial_exact_tail(spec, full_counts(spec, case.z), case.direction, budget=case.budget)
    if case.family == "general" and case.model == "vertex":
        p = complete(case.params)
        if np.all(p.coords > 0):
            spec = MultinomialSpec(case.n, p)
            thresholds = _vertex_count_thresholds(case.z, case.n, case.direction)
            return multinomial_exact_tail(spec, thresholds, case.direction, budget=case.budget)
    if case.family == "dirichlet":
        model = DirichletSampler(DirichletSpec(case.params))
    elif case.model == "point_mass":
        model = PointMassSampler(case.params)
    else:
        model = vertex_sampler(case.params)
    return mc_mean_tail(model, case.n, case.z, case.direction, case.trials, seed=case.seed, workers=case.workers,
                        confidence=case.confidence, disable_pbar=disable_pbar)


def judge(bound: float, oracle: Union[float, TailEstimate]) -> tuple:
    """Returns (verdict, margin). Exact oracles fail above bound + 1e-12, Monte Carlo ones when ci_low > bound."""
    if isinstance(oracle, TailEstimate):
        margin = bound - oracle.ci_low
        return ("FAIL" if oracle.ci_low > bound else "PASS"), margin
    margin = bound - oracle
    return ("FAIL" if oracle > bound + EXACT_TOL else "PASS"), margin


def evaluate_case(case: AuditCase, disable_pbar: bool = True) -> AuditRow:
    row = AuditRow(case_id=case.case_id, family=case.family, direction=case.direction.value, n=int(case.n),
                   params=[float(x) for x in case.params], z=list(np.asarray(case.z).tolist()))
    try:
        result = compute_bound(case)
    except PreconditionOrderViolated as e:
        logging.warning(f"Skipping case {case.case_id}: {e}")
        row.note = f"precondition: {e}"
        return row
    except (SimplexHoeffdingError, ValueError) as e:
        logging.warning(f"Skipping case {case.case_id}: {e}")
        row.note = f"{type(e).__name__}: {e}"
        return row
    row.bound, row.log_bound = result.bound, result.log_bound

    try:
        oracle = compute_oracle(case, disable_pbar=disable_pbar)
    except (SimplexHoeffdingError, ValueError) as e:
        logging.warning(f"Oracle failed for case {case.case_id}: {e}")
        row.note = f"{type(e).__name__}: {e}"
        return row

    if isinstance(oracle, TailEstimate):
        row.oracle_kind = "mc"
        row.oracle_value, row.ci_low, row.ci_high = oracle.p_hat, oracle.ci_low, oracle.ci_high
        row.trials, row.seed = oracle.trials, oracle.seed
    else:
        row.oracle_kind = "exact"
        row.oracle_value = oracle
    row.verdict, row.margin = judge(result.bound, oracle)
    if row.verdict == "FAIL":
        logging.error(f"Bound {result.bound!r} does not dominate the {row.oracle_kind} oracle in case {case.case_id}")
    return row


def domination_audit(cases: Sequence[AuditCase], disable_pbar: bool = True) -> AuditReport:
    """
    Evaluates every case; errors of individual cases become SKIP rows and never abort the batch. Row order follows
    the case order.
    """
    return AuditReport([evaluate_case(case, disable_pbar=disable_pbar) for case in cases])
