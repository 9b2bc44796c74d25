"""PAC experiment on the 2n-point star support with the zero target.

Training samples are ``n`` uniform draws from ``{1..2n}``; the learner sees
the set of distinct points.  Every trial's draws are a pure function of
``(seed, trial_index)`` so chunks can be evaluated in any order or process.
Errors are exact fractions with denominator ``2n``.
"""

from __future__ import annotations

import csv
import json
import math
import os
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
import numpy as np

from .adversarial import (
    AdversarialParams,
    AdversarialRule,
    RandomFlipRule,
    as_fraction,
    find_accepted_seed,
    is_heavy,
    is_in_w1,
)
from .concept_class import BitVector, build_bounded_ones_class
from .errors import CapacityError, ConfigError
from .mixing import TAG_DRAW, keyed_mix, keyed_mix_np, unit_float, unit_float_np
from .oig import ClosureRule, FlowRule, exact_error, realize_hypothesis

RULES = ("closure", "flow", "random_flip", "adversarial")
EXACT_MAX_N = 6


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    d: int = 1
    delta: Fraction = Fraction(1, 10)
    rule: str = "adversarial"
    trials: int = 1000
    seed: int = 0
    thresholds: tuple[Fraction, ...] | None = None
    # per-k construction seeds; None runs the rejection search
    construction_seeds: tuple[tuple[int, int], ...] | None = None
    verify_mode: str = "auto"
    verify_samples: int = 1000
    max_attempts: int = 64

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if self.n < 1:
            raise ConfigError("--n must be >= 1")
        if self.d < 1 or self.d > 2 * self.n:
            raise ConfigError(f"--d must lie in 1..2n, got {self.d}")
        if not 0 < self.delta < 1:
            raise ConfigError(f"--delta must lie in (0, 1), got {self.delta}")
        if self.rule not in RULES:
            raise ConfigError(f"--rule must be one of {', '.join(RULES)}, got {self.rule!r}")
        if self.trials < 1:
            raise ConfigError("--trials must be >= 1")
        if self.thresholds is None:
            object.__setattr__(self, "thresholds", (self.lemma_threshold,))
        else:
            ts = tuple(sorted(as_fraction(t) for t in self.thresholds))
            if any(not 0 < t <= 1 for t in ts):
                raise ConfigError("thresholds must lie in (0, 1]")
            object.__setattr__(self, "thresholds", ts)
        if self.verify_mode not in ("auto", "exhaustive", "sampled"):
            raise ConfigError(f"unknown verify mode {self.verify_mode!r}")

    @property
    def m(self) -> int:
        return 2 * self.n

    @property
    def lemma_threshold(self) -> Fraction:
        """``d / (16 delta n)``: the error every heavy training set reaches."""
        return Fraction(self.d) / (16 * self.delta * self.n)

    def params(self) -> AdversarialParams:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return AdversarialParams(self.n, self.d, self.delta, self.seed)

    def echo(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "delta": str(self.delta),
            "rule": self.rule,
            "trials": self.trials,
            "seed": self.seed,
            "thresholds": [str(t) for t in self.thresholds],
        }


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    draws: tuple[int, ...]
    k: int
    error: Fraction
    in_w1: bool | None = None


@dataclass
class Prepared:
    """A configured rule plus the construction seeds it was built with."""

    config: ExperimentConfig
    rule: object
    construction: dict[int, dict] = field(default_factory=dict)

    @property
    def seeds(self) -> dict[int, int]:
        return {k: c["seed"] for k, c in self.construction.items()}


def _verify_mode(config: ExperimentConfig) -> str:
    if config.verify_mode != "auto":
        return config.verify_mode
    return "exhaustive" if config.n <= EXACT_MAX_N else "sampled"


@lru_cache(maxsize=32)
def prepare(config: ExperimentConfig) -> Prepared:
    """Build the host class and rule; for the adversarial rule, accept one seed per ``k``."""
    host = build_bounded_ones_class(config.m, config.d)
    if config.rule == "closure":
        return Prepared(config, ClosureRule(host))
    if config.rule == "flow":
        return Prepared(config, FlowRule(host))
    if config.rule == "random_flip":
        return Prepared(config, RandomFlipRule(host, config.seed))

    params = config.params()
    construction: dict[int, dict] = {}
    if config.construction_seeds is not None:
        for k, seed in config.construction_seeds:
            construction[k] = {"seed": seed, "accepted": None, "heavy_fraction": None}
    else:
        mode = _verify_mode(config)
        for k in range(1, config.n + 1):
            search = find_accepted_seed(params, k, config.max_attempts, mode, config.verify_samples)
            if search.accepted_seed is not None:
                seed, report, ok = search.accepted_seed, search.accepted_report, True
            else:
                seed, report = max(search.reports.items(), key=lambda kv: (kv[1].heavy_fraction, -kv[0]))
                ok = False
            construction[k] = {"seed": seed, "accepted": ok, "heavy_fraction": report.heavy_fraction}
    rule = AdversarialRule(host, params, {k: c["seed"] for k, c in construction.items()})
    return Prepared(config, rule, construction)


def draw_sample(config: ExperimentConfig, trial_index: int) -> tuple[int, ...]:
    m = config.m
    return tuple(
        int(unit_float(keyed_mix(config.seed, TAG_DRAW, trial_index, j)) * m) + 1 for j in range(config.n)
    )


def draw_samples(config: ExperimentConfig, start: int, stop: int) -> np.ndarray:
    """Draws for trials ``start..stop-1`` as a ``(trials, n)`` array; row ``i`` equals :func:`draw_sample`."""
    idx = np.arange(start, stop, dtype=np.uint64)[:, None]
    j = np.arange(config.n, dtype=np.uint64)[None, :]
    u = unit_float_np(keyed_mix_np(config.seed, TAG_DRAW, idx, j))
    return (u * config.m).astype(np.int64) + 1


def _evaluate(prepared: Prepared, positions: np.ndarray) -> tuple[int, bool | None]:
    """Number of mistakes and W_1 membership for one training set given as sorted positions."""
    rule = prepared.rule
    if isinstance(rule, AdversarialRule):
        hood = rule.neighborhood_positions(positions)
        k = len(positions)
        view = rule.view(k)
        in_v1 = bool(view.in_top[int(positions.sum()) % (rule.params.m + 1)])
        return len(hood), in_v1 and is_heavy(len(hood), rule.params)
    if isinstance(rule, RandomFlipRule):
        return len(rule.mistakes_positions(positions)), None
    s = BitVector.from_positions(prepared.config.m, positions.tolist())
    return len(_cached_mistakes(rule, s)), None


@lru_cache(maxsize=1 << 16)
def _cached_mistakes(rule, s: BitVector) -> frozenset[int]:
    return rule.mistakes(s)


def run_trial(config: ExperimentConfig, trial_index: int, prepared: Prepared | None = None) -> TrialRecord:
    prepared = prepared or prepare(config)
    draws = draw_sample(config, trial_index)
    positions = np.array(sorted(set(draws)), dtype=np.int64)
    mistakes, in_w1 = _evaluate(prepared, positions)
    return TrialRecord(trial_index, draws, len(positions), Fraction(mistakes, config.m), in_w1)


@dataclass
class Summary:
    """Aggregate of a set of trials. Merging is associative and order independent."""

    config: ExperimentConfig
    histogram: Counter = field(default_factory=Counter)  # mistakes -> trial count
    w1_count: int = 0
    construction: dict = field(default_factory=dict)
    records: list[TrialRecord] | None = None

    @property
    def trials(self) -> int:
        return sum(self.histogram.values())

    def merge(self, other: Summary) -> Summary:
        records = None
        if self.records is not None and other.records is not None:
            records = sorted(self.records + other.records, key=lambda r: r.trial)
        return Summary(
            self.config,
            self.histogram + other.histogram,
            self.w1_count + other.w1_count,
            self.construction or other.construction,
            records,
        )

    def _errors(self) -> list[tuple[Fraction, int]]:
        m = self.config.m
        return sorted((Fraction(k, m), c) for k, c in self.histogram.items())

    @property
    def mean(self) -> float:
        return float(self.exact_mean)

    @property
    def exact_mean(self) -> Fraction:
        return Fraction(sum(k * c for k, c in self.histogram.items()), self.trials * self.config.m)

    @property
    def se(self) -> float:
        t = self.trials
        if t < 2:
            return 0.0
        m = self.config.m
        mean = self.mean
        ss = sum(c * (k / m - mean) ** 2 for k, c in self.histogram.items())
        return math.sqrt(ss / (t - 1)) / math.sqrt(t)

    def tail(self, threshold) -> float:
        """Fraction of trials with error >= threshold, compared exactly."""
        t = as_fraction(threshold)
        return sum(c for e, c in self._errors() if e >= t) / self.trials

    def exceed(self, threshold) -> float:
        """Fraction of trials with error strictly above threshold."""
        t = Fraction(threshold) if isinstance(threshold, float) else as_fraction(threshold)
        return sum(c for e, c in self._errors() if e > t) / self.trials

    @property
    def tails(self) -> dict[Fraction, float]:
        return {t: self.tail(t) for t in self.config.thresholds}

    @property
    def pr_w1(self) -> float | None:
        if self.config.rule != "adversarial":
            return None
        return self.w1_count / self.trials

    def quantile(self, q) -> Fraction:
        """Smallest error ``e`` with empirical ``Pr[err <= e] >= q``, compared exactly."""
        need = as_fraction(q) * self.trials
        acc = 0
        errors = self._errors()
        for e, c in errors:
            acc += c
            if acc >= need:
                return e
        return errors[-1][0]

    def to_dict(self) -> dict:
        out = {
            "config": self.config.echo(),
            "trials": self.trials,
            "mean": self.mean,
            "mean_exact": str(self.exact_mean),
            "standard_error": self.se,
            "histogram": {str(Fraction(k, self.config.m)): c for k, c in sorted(self.histogram.items())},
            "quantile_1_minus_delta": str(self.quantile(1 - self.config.delta)),
        }
        if self.config.thresholds:
            out["tails"] = {str(t): f for t, f in self.tails.items()}
        if self.config.rule == "adversarial":
            out["pr_w1"] = self.pr_w1
            out["construction"] = {str(k): v for k, v in sorted(self.construction.items())}
        return out


def _run_chunk(config: ExperimentConfig, start: int, stop: int, keep_records: bool) -> Summary:
    prepared = prepare(config)
    draws = draw_samples(config, start, stop)
    hist: Counter = Counter()
    w1 = 0
    records = [] if keep_records else None
    m = config.m
    for offset, row in enumerate(draws):
        positions = np.unique(row)
        mistakes, in_w1 = _evaluate(prepared, positions)
        hist[mistakes] += 1
        w1 += bool(in_w1)
        if records is not None:
            records.append(
                TrialRecord(start + offset, tuple(int(x) for x in row), len(positions), Fraction(mistakes, m), in_w1)
            )
    return Summary(config, hist, w1, prepared.construction, records)


def monte_carlo(
    config: ExperimentConfig,
    jobs: int = 1,
    keep_records: bool = True,
    chunk_size: int = 5000,
) -> Summary:
    """Run ``config.trials`` trials, optionally across ``jobs`` processes."""
    prepared = prepare(config)
    if config.rule == "adversarial" and config.construction_seeds is None:
        # workers reuse the accepted seeds instead of repeating the search
        work_config = replace(config, construction_seeds=tuple(sorted(prepared.seeds.items())))
    else:
        work_config = config
    bounds = [(a, min(a + chunk_size, config.trials)) for a in range(0, config.trials, chunk_size)]
    if jobs > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, *zip(*[(work_config, a, b, keep_records) for a, b in bounds])))
    else:
        parts = [_run_chunk(work_config, a, b, keep_records) for a, b in bounds]
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    total.config = config
    total.construction = prepared.construction
    return total


@dataclass
class ExactLaw:
    """Exact distribution of the error over training samples, from enumeration."""

    config: ExperimentConfig
    error_law: dict[Fraction, Fraction]
    size_law: dict[int, Fraction]
    pr_w1: Fraction | None
    w1_violations: int
    construction: dict

    @property
    def mean(self) -> Fraction:
        return sum((e * p for e, p in self.error_law.items()), Fraction(0))

    @property
    def variance(self) -> Fraction:
        mu = self.mean
        return sum(((e - mu) ** 2 * p for e, p in self.error_law.items()), Fraction(0))

    def tail(self, threshold) -> Fraction:
        t = as_fraction(threshold)
        return sum((p for e, p in self.error_law.items() if e >= t), Fraction(0))

    def to_dict(self) -> dict:
        out = {
            "config": self.config.echo(),
            "error_law": {str(e): str(p) for e, p in sorted(self.error_law.items())},
            "size_law": {str(k): str(p) for k, p in sorted(self.size_law.items())},
            "mean": str(self.mean),
        }
        if self.pr_w1 is not None:
            out["pr_w1"] = str(self.pr_w1)
            out["w1_violations"] = self.w1_violations
            out["construction"] = {str(k): v for k, v in sorted(self.construction.items())}
        return out


def onto_count(n: int, k: int) -> int:
    """Number of length-``n`` sequences over a ``k``-set that use every element."""
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1))


def exact_distribution(config: ExperimentConfig) -> ExactLaw:
    """Enumerate every possible training set, weight it by its exact probability and run the rule on it.

    Predictions go through the generic one-inclusion path, independent of
    the vectorized routines used by :func:`monte_carlo`.
    """
    n, m = config.n, config.m
    if n > EXACT_MAX_N:
        raise CapacityError(f"exact distribution enumerates all sets; n={n} exceeds {EXACT_MAX_N}")
    prepared = prepare(config)
    rule = prepared.rule
    host = rule.host
    total = m**n
    zero = BitVector.zeros(m)
    law: Counter = Counter()
    size_law: dict[int, Fraction] = {}
    pr_w1 = Fraction(0)
    violations = 0
    for k in range(1, n + 1):
        p_set = Fraction(onto_count(n, k), total)
        size_law[k] = p_set * math.comb(m, k)
        for combo in combinations(range(1, m + 1), k):
            s = BitVector.from_positions(m, combo)
            err = exact_error(realize_hypothesis(rule, s, host), zero)
            law[err] += p_set
            if isinstance(rule, AdversarialRule) and is_in_w1(s, rule.view(k)):
                pr_w1 += p_set
                if err < config.lemma_threshold:
                    violations += 1
    if sum(law.values()) != 1 or sum(size_law.values()) != 1:
        raise AssertionError("exact probabilities do not sum to one")
    return ExactLaw(
        config,
        dict(law),
        size_law,
        pr_w1 if isinstance(rule, AdversarialRule) else None,
        violations,
        prepared.construction,
    )


CSV_COLUMNS = ("trial", "k", "error_num", "error_den", "in_w1")


def emit(summary: Summary, path: str | os.PathLike, fmt: str = "csv") -> None:
    """Write per-trial rows (``csv``) or the summary (``json``)."""
    try:
        if fmt == "csv":
            if summary.records is None:
                raise ConfigError("summary was built without per-trial records; run with keep_records=True")
            m = summary.config.m
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for r in summary.records:
                    flag = "" if r.in_w1 is None else int(r.in_w1)
                    writer.writerow((r.trial, r.k, r.error.numerator * (m // r.error.denominator), m, flag))
        elif fmt == "json":
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(summary.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
        else:
            raise ConfigError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
