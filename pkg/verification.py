"""
Randomized verification suites for the moment inequalities. Every trial draws from its own generator, seeded from the
run seed and the trial index, so a suite gives the same records in the same order for any worker count.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

import moment
from quadrature import QuadratureConfig
from ts_errors import DegenerateRegionError
from ts_util import parallel_map

SUITES = ("moment-theorem", "moment-lemma", "vertex-count", "lemma2", "omega-convexity")
LEMMA2_RADII = (0.5, 1.0, 2.0)
LEMMA2_PAIRS_PER_TRIAL = 10
CONVEXITY_PROFILES = ("constant", "exp", "gaussian:1", "linear:2")
CONVEXITY_SAMPLES = 50
MAX_SITES = 12

logger = logging.getLogger(__name__)


class TrialRecord(NamedTuple):
    suite: str
    trial: int
    seed: int
    inputs: dict
    lhs: Optional[float]
    rhs: Optional[float]
    margin: Optional[float]
    ok: bool

    def to_dict(self) -> dict:
        return self._asdict()


@dataclass
class SuiteSummary:
    suite: str
    total: int
    passed: int
    failures: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    @property
    def message(self) -> str:
        return f"Passed {self.passed} of {self.total}"

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "total": self.total,
            "passed": self.passed,
            "failures": list(self.failures),
            "ok": self.ok,
            "message": self.message,
        }


def trial_seeds(seed: int, suite: str, n: int) -> List[int]:
    """Independent per-trial seeds for one suite, spawned from the run seed."""
    sequence = np.random.SeedSequence([int(seed), SUITES.index(suite)])
    return [int(s) for s in sequence.generate_state(n, dtype=np.uint32)]


def _polygon_inputs(C) -> dict:
    return {"vertices": C.to_list(), "area": C.area}


def _moment_theorem_trial(trial: int, rng: np.random.Generator, cfg: QuadratureConfig):
    C = moment.random_convex_polygon(rng, 6)
    n = int(rng.integers(1, MAX_SITES + 1))
    sites = moment.random_points_in(C, rng, n)
    result = moment.moment_theorem_check(C, sites, moment.make_distance_profile("exp"), cfg)
    inputs = dict(_polygon_inputs(C), sites=sites.tolist(), profile="exp")
    return inputs, result.lhs, result.rhs, result.margin, result.ok


def _moment_lemma_trial(trial: int, rng: np.random.Generator, cfg: QuadratureConfig):
    C = moment.random_convex_polygon(rng, int(rng.integers(3, MAX_SITES + 1)))
    C = C.translated(rng.uniform(-2.0, 2.0, 2))
    result = moment.moment_lemma_check(C, moment.make_distance_profile("exp"), cfg)
    inputs = dict(_polygon_inputs(C), profile="exp")
    return inputs, result.lhs, result.rhs, result.margin, result.ok


def _vertex_count_trial(trial: int, rng: np.random.Generator, cfg: QuadratureConfig):
    C = moment.random_convex_polygon(rng, 6)
    n = int(rng.integers(1, MAX_SITES + 1))
    sites = moment.random_points_in(C, rng, n)
    result = moment.vertex_count_check(moment.clipped_voronoi(C, sites))
    inputs = dict(_polygon_inputs(C), sites=sites.tolist())
    return inputs, float(result.N), float(result.bound), float(result.bound - result.N), result.ok


def _point_in_disc(rng: np.random.Generator, r: float) -> np.ndarray:
    rho = r * math.sqrt(rng.uniform())
    theta = rng.uniform(0, 2 * math.pi)
    return np.array([rho * math.cos(theta), rho * math.sin(theta)])


def _lemma2_trial(trial: int, rng: np.random.Generator, cfg: QuadratureConfig):
    d = moment.Disc(LEMMA2_RADII[trial % len(LEMMA2_RADII)])
    f = moment.make_distance_profile("exp")
    while True:
        a_pt, b_pt = _point_in_disc(rng, d.radius), _point_in_disc(rng, d.radius)
        try:
            result = moment.lemma2_check(d, a_pt, b_pt, f, cfg)
        except DegenerateRegionError:
            continue
        break
    inputs = {"radius": d.radius, "a": a_pt.tolist(), "b": b_pt.tolist(), "area": result.area, "profile": f.label}
    return inputs, result.lhs, result.rhs, result.lhs - result.rhs, result.ok


def _omega_convexity_trial(trial: int, rng: np.random.Generator, cfg: QuadratureConfig):
    radius = LEMMA2_RADII[trial // len(CONVEXITY_PROFILES)]
    f = moment.parse_distance_profile(CONVEXITY_PROFILES[trial % len(CONVEXITY_PROFILES)])
    report = moment.omega_convexity_check(moment.Disc(radius), f, CONVEXITY_SAMPLES, cfg)
    inputs = {"radius": radius, "profile": f.label, "n_samples": CONVEXITY_SAMPLES}
    lhs = report.min_second_difference
    return inputs, lhs, -moment.CONVEXITY_TOL, lhs + moment.CONVEXITY_TOL, report.ok


_TRIALS = {
    "moment-theorem": _moment_theorem_trial,
    "moment-lemma": _moment_lemma_trial,
    "vertex-count": _vertex_count_trial,
    "lemma2": _lemma2_trial,
    "omega-convexity": _omega_convexity_trial,
}


def _run_trial(task: Tuple[int, int], suite: str, cfg: QuadratureConfig) -> TrialRecord:
    trial, seed = task
    try:
        inputs, lhs, rhs, margin, ok = _TRIALS[suite](trial, np.random.default_rng(seed), cfg)
    except Exception as e:
        logger.exception(f"Trial {trial} of suite '{suite}' (seed {seed}) raised an error")
        return TrialRecord(suite, trial, seed, {"error": f"{type(e).__name__}: {e}"}, None, None, None, False)
    return TrialRecord(suite, trial, seed, inputs, float(lhs), float(rhs), float(margin), bool(ok))


class SuiteRunner:
    """A class for running the randomized moment-inequality suites and summarizing their records"""
    def __init__(self, seed: int, cfg: QuadratureConfig = None, workers: int = None, logger=None):
        """
        Prepare a run.

        :param seed: The run seed every per-trial seed is spawned from
        :param cfg: (optional) The quadrature configuration for every trial
        :param workers: (optional) Requested worker processes, capped by TORUS_SPECTRA_THREADS
        :param logger: (optional) An instance of the logging.Logger class
        """
        self.seed = seed
        self.cfg = cfg or QuadratureConfig()
        self.workers = workers
        self.logger = logger or logging.getLogger(__name__)

    @staticmethod
    def trial_count(suite: str, trials: int) -> int:
        """The number of trials a suite runs when the run asks for ``trials``."""
        if suite == "lemma2":
            return LEMMA2_PAIRS_PER_TRIAL * trials
        if suite == "omega-convexity":
            return len(LEMMA2_RADII) * len(CONVEXITY_PROFILES)
        return trials

    def run_suite(self, suite: str, trials: int) -> Tuple[List[TrialRecord], SuiteSummary]:
        """
        Run one suite.

        :param suite: One of SUITES
        :param trials: The requested number of trials
        :return: The trial records in trial order and the suite summary
        """
        if suite not in _TRIALS:
            raise ValueError(f"Unknown suite '{suite}'")
        n = self.trial_count(suite, trials)
        self.logger.info(f"Running suite '{suite}' with {n} trial(s)...")
        tasks = list(enumerate(trial_seeds(self.seed, suite, n)))
        records = parallel_map(partial(_run_trial, suite=suite, cfg=self.cfg), tasks, self.workers)
        failures = [r.trial for r in records if not r.ok]
        summary = SuiteSummary(suite, n, n - len(failures), failures)
        if failures:
            self.logger.error(f"Suite '{suite}' failed trial(s) {failures}")
        self.logger.info(f"Finished suite '{suite}': {summary.message}")
        return records, summary

    def execute(self, trials: int, suites=SUITES) -> Tuple[List[TrialRecord], Dict[str, SuiteSummary]]:
        """
        Run several suites in order.

        :param trials: The requested number of trials per suite
        :param suites: (optional) The suites to run
        :return: All trial records and a summary per suite
        """
        records = []
        summaries = {}
        for suite in suites:
            suite_records, summary = self.run_suite(suite, trials)
            records.extend(suite_records)
            summaries[suite] = summary
        return records, summaries
