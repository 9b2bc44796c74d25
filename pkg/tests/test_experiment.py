import csv
import itertools
import json
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from oiglab import BitVector
from oiglab.adversarial import extension_neighborhood
from oiglab.errors import CapacityError, ConfigError
from oiglab.experiment import (
    CSV_COLUMNS,
    ExperimentConfig,
    Summary,
    draw_sample,
    draw_samples,
    emit,
    exact_distribution,
    monte_carlo,
    onto_count,
    prepare,
    run_trial,
)
from oiglab.experiment import _run_chunk
from oiglab.oig import exact_error, realize_hypothesis

from oracles import set_size_law, set_size_law_closed


def cfg(**kw):
    base = dict(n=4, d=1, delta=Fraction(3, 10), rule="adversarial", trials=2000, seed=0)
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_default_threshold_is_lemma_level(self):
        c = ExperimentConfig(n=50, delta=0.1)
        assert c.thresholds == (Fraction(1, 80),)
        assert c.m == 100

    @pytest.mark.parametrize(
        "kw, flag",
        [
            (dict(n=0), "--n"),
            (dict(d=0), "--d"),
            (dict(delta=1.5), "--delta"),
            (dict(rule="erm"), "--rule"),
            (dict(trials=0), "--trials"),
        ],
    )
    def test_errors_name_the_flag(self, kw, flag):
        with pytest.raises(ConfigError, match=flag):
            cfg(**kw)

    def test_thresholds_validated_and_sorted(self):
        assert cfg(thresholds=(0.5, Fraction(1, 8))).thresholds == (Fraction(1, 8), Fraction(1, 2))
        with pytest.raises(ConfigError):
            cfg(thresholds=(0,))

    def test_echo_carries_seed(self):
        assert cfg(seed=17).echo()["seed"] == 17


class TestDraws:
    def test_vectorized_matches_scalar(self):
        c = cfg(n=7)
        block = draw_samples(c, 100, 150)
        assert [tuple(row) for row in block.tolist()] == [draw_sample(c, t) for t in range(100, 150)]

    def test_uniform_over_domain(self):
        c = cfg(n=5)
        counts = np.bincount(draw_samples(c, 0, 20_000).ravel(), minlength=11)[1:]
        expected = 20_000 * 5 / 10
        # chi-square with 9 dof; 27.9 is the 0.999 quantile
        assert ((counts - expected) ** 2 / expected).sum() < 27.9

    def test_seed_changes_stream(self):
        assert draw_sample(cfg(seed=1), 0) != draw_sample(cfg(seed=2), 0)


class TestTrials:
    def test_deterministic(self):
        c = cfg()
        assert run_trial(c, 12) == run_trial(c, 12)

    def test_record_shape(self):
        r = run_trial(cfg(), 3)
        assert len(r.draws) == 4 and r.k == len(set(r.draws))
        assert r.error.denominator in (1, 2, 4, 8) and 0 <= r.error <= 1

    def test_closure_never_errs(self):
        c = cfg(n=10, rule="closure")
        assert all(run_trial(c, t).error == 0 for t in range(50))

    @pytest.mark.parametrize("rule", ["adversarial", "random_flip", "flow"])
    def test_fast_path_matches_prediction(self, rule):
        c = cfg(rule=rule)
        prepared = prepare(c)
        for t in range(60):
            rec = run_trial(c, t)
            s = BitVector.from_positions(c.m, set(rec.draws))
            h = realize_hypothesis(prepared.rule, s, prepared.rule.host)
            assert rec.error == exact_error(h, BitVector.zeros(c.m))
            if rule == "adversarial":
                hood = extension_neighborhood(s, prepared.rule.view(rec.k))
                assert rec.error == Fraction(len(hood), c.m)

    def test_w1_trials_reach_lemma_error(self):
        c = cfg(n=6, delta=Fraction(1, 5), trials=3000)
        summary = monte_carlo(c)
        flagged = [r for r in summary.records if r.in_w1]
        assert flagged
        assert all(r.error >= c.lemma_threshold for r in flagged)


class TestSummary:
    def test_parallel_equals_serial(self):
        c = cfg(trials=3000)
        a = monte_carlo(c, jobs=1, chunk_size=700)
        b = monte_carlo(c, jobs=2, chunk_size=700)
        assert a.histogram == b.histogram and a.w1_count == b.w1_count
        assert a.records == b.records

    def test_merge_is_order_independent(self):
        c = cfg(trials=2400)
        reference = monte_carlo(c, chunk_size=600)
        chunks = [_run_chunk(c, a, a + 400, True) for a in range(0, 2400, 400)]
        for order in (list(range(6)), [5, 3, 1, 0, 2, 4]):
            shuffled = [chunks[i] for i in order]
            total = shuffled[0]
            for part in shuffled[1:]:
                total = total.merge(part)
            assert total.histogram == reference.histogram
            assert total.records == reference.records
        left = chunks[0].merge(chunks[1]).merge(chunks[2])
        right = chunks[0].merge(chunks[1].merge(chunks[2]))
        assert left.histogram == right.histogram and left.w1_count == right.w1_count

    def test_statistics(self):
        c = cfg(n=2, thresholds=(Fraction(1, 4), Fraction(1, 2)))
        s = Summary(c, histogram=Counter({0: 6, 1: 3, 2: 1}))
        assert s.trials == 10
        assert s.exact_mean == Fraction(5, 40)
        errs = [0] * 6 + [0.25] * 3 + [0.5]
        assert s.se == pytest.approx(np.std(errs, ddof=1) / math.sqrt(10))
        assert s.tail(Fraction(1, 4)) == 0.4 and s.exceed(Fraction(1, 4)) == 0.1
        assert s.quantile(Fraction(6, 10)) == 0 and s.quantile(Fraction(7, 10)) == Fraction(1, 4)
        assert s.quantile(1) == Fraction(1, 2)
        tails = list(s.tails.values())
        assert tails == sorted(tails, reverse=True)
        for t, f in s.tails.items():
            assert s.mean >= t * f

    def test_closure_summary(self):
        s = monte_carlo(cfg(n=50, rule="closure", trials=10_000), keep_records=False)
        assert s.mean == 0 and all(f == 0 for f in s.tails.values())
        assert s.records is None


class TestExact:
    def test_onto_count(self):
        for n in range(1, 6):
            for k in range(1, n + 1):
                brute = sum(1 for seq in itertools.product(range(k), repeat=n) if len(set(seq)) == k)
                assert onto_count(n, k) == brute

    def test_size_law_small(self):
        law = exact_distribution(cfg(n=2, rule="closure"))
        assert law.size_law == {1: Fraction(1, 4), 2: Fraction(3, 4)}

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_size_law_matches_enumeration(self, n):
        assert exact_distribution(cfg(n=n, rule="closure")).size_law == set_size_law(n)

    def test_size_law_matches_stirling_route(self):
        assert exact_distribution(cfg(n=6, rule="closure")).size_law == set_size_law_closed(6)

    def test_closure_is_point_mass(self):
        law = exact_distribution(cfg(n=3, rule="closure"))
        assert law.error_law == {Fraction(0): Fraction(1)}
        assert law.pr_w1 is None

    def test_adversarial_law(self):
        law = exact_distribution(cfg(n=4))
        assert sum(law.error_law.values()) == 1
        assert law.w1_violations == 0
        assert law.tail(law.config.lemma_threshold) >= law.pr_w1

    def test_capacity(self):
        with pytest.raises(CapacityError):
            exact_distribution(cfg(n=7))

    def test_sampler_agrees(self):
        c = cfg(n=3, rule="random_flip", trials=20_000)
        law = exact_distribution(c)
        s = monte_carlo(c, keep_records=False)
        assert abs(s.mean - float(law.mean)) <= 3 * s.se


class TestEmit:
    def test_csv(self, tmp_path):
        c = cfg(trials=321)
        s = monte_carlo(c)
        path = tmp_path / "t.csv"
        emit(s, path, "csv")
        rows = list(csv.reader(path.open(encoding="utf-8")))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert len(rows) - 1 == c.trials
        assert all(row[3] == str(c.m) for row in rows[1:])
        first = s.records[0]
        assert Fraction(int(rows[1][2]), int(rows[1][3])) == first.error

    def test_byte_stable(self, tmp_path):
        c = cfg(trials=500)
        for fmt in ("csv", "json"):
            a, b = tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"
            emit(monte_carlo(c), a, fmt)
            emit(monte_carlo(c, jobs=2, chunk_size=100), b, fmt)
            assert a.read_bytes() == b.read_bytes()

    def test_json_omits_tails_without_thresholds(self, tmp_path):
        path = tmp_path / "s.json"
        emit(monte_carlo(cfg(trials=50, thresholds=())), path, "json")
        data = json.loads(path.read_text(encoding="utf-8"))
        assert "tails" not in data
        assert data["config"]["seed"] == 0 and "construction" in data

    def test_json_has_tails(self, tmp_path):
        path = tmp_path / "s.json"
        emit(monte_carlo(cfg(trials=50)), path, "json")
        assert list(json.loads(path.read_text(encoding="utf-8"))["tails"]) == ["5/96"]

    def test_bad_path_names_it(self, tmp_path):
        target = tmp_path / "missing" / "x.csv"
        with pytest.raises(OSError, match="missing"):
            emit(monte_carlo(cfg(trials=5)), target, "csv")

    def test_csv_needs_records(self, tmp_path):
        with pytest.raises(ConfigError):
            emit(monte_carlo(cfg(trials=5), keep_records=False), tmp_path / "x.csv", "csv")


def test_record_order_survives_shuffled_chunks():
    c = cfg(trials=1000)
    s = monte_carlo(c, chunk_size=137)
    assert [r.trial for r in s.records] == list(range(1000))
