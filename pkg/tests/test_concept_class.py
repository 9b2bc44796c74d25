import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oiglab import BitVector, ProjectedClass, StarSystem, build_bounded_ones_class, build_indicator_class
from oiglab.concept_class import format_class, hamming_distance, is_star_system, load_class_file, parse_class, project, vc_dimension
from oiglab.errors import InputError, ParseError

from oracles import vc_dim


def bv(s):
    return BitVector.from_str(s)


def cls_of(*rows):
    return ProjectedClass(len(rows[0]), [bv(r) for r in rows])


def strings(cls):
    return sorted(h.string for h in cls)


class TestBitVector:
    def test_positions_are_one_based_leftmost_first(self):
        v = bv("0110")
        assert v.positions() == (2, 3)
        assert v[1] == 0 and v[2] == 1
        assert str(v) == "0110"

    def test_round_trips(self):
        assert BitVector.from_bits([1, 0, 1]) == bv("101")
        assert BitVector.from_positions(4, [4]) == BitVector.indicator(4, 4) == bv("0001")

    @pytest.mark.parametrize("bad", ["", "012", "1 0"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(InputError):
            bv(bad)

    def test_numpy_positions_give_plain_int_mask(self):
        import numpy as np

        v = BitVector.from_positions(5, np.array([1, 4]))
        assert type(v.mask) is int and v == bv("10010")

    def test_restrict(self):
        assert bv("1011").restrict((1, 2, 4)) == bv("101")


@pytest.mark.parametrize(
    "f, g, expected",
    [("0000", "0000", 0), ("000", "010", 1), ("1100", "0011", 4)],
)
def test_hamming_distance(f, g, expected):
    assert hamming_distance(bv(f), bv(g)) == expected


def test_hamming_distance_length_mismatch():
    with pytest.raises(InputError):
        hamming_distance(bv("00"), bv("000"))


class TestProject:
    def test_full_domain_is_identity(self):
        ind = build_indicator_class(4)
        assert project(ind, bv("1111")) == ind

    def test_indicator_of_dropped_point_collapses(self):
        assert strings(project(build_indicator_class(4), bv("1110"))) == ["000", "001", "010", "100"]

    def test_two_restrictions(self):
        assert strings(project(cls_of("000", "111"), bv("010"))) == ["0", "1"]

    def test_empty_subset(self):
        with pytest.raises(InputError):
            project(build_indicator_class(3), bv("000"))

    @given(st.integers(1, 9), st.data())
    def test_indicator_projection_has_k_plus_one(self, m, data):
        mask = data.draw(st.integers(1, (1 << m) - 2)) if m > 1 else 1
        s = BitVector(m, mask)
        k = s.ones_count()
        expected = k + 1 if k < m else m + 1
        assert len(project(build_indicator_class(m), s)) == expected


class TestVcDimension:
    def test_examples(self):
        assert vc_dimension(build_indicator_class(6)) == 1
        assert vc_dimension(cls_of(*[format(i, "03b") for i in range(8)])) == 3
        assert vc_dimension(cls_of("000")) == 0
        assert vc_dimension(build_indicator_class(8)) == 1
        assert vc_dimension(build_bounded_ones_class(6, 2)) == 2

    @pytest.mark.parametrize("m", range(1, 9))
    def test_bounded_ones_has_dimension_d(self, m):
        for d in range(1, m + 1):
            if math.comb(m, d) <= 70:
                assert vc_dimension(build_bounded_ones_class(m, d)) == d

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 5), st.data())
    def test_matches_brute_force_and_is_monotone_under_projection(self, m, data):
        masks = data.draw(st.sets(st.integers(0, (1 << m) - 1), min_size=1, max_size=12))
        cls = ProjectedClass(m, [BitVector(m, x) for x in masks])
        d = vc_dimension(cls)
        assert d == vc_dim([h.string for h in cls])
        sub = BitVector(m, data.draw(st.integers(1, (1 << m) - 1)))
        proj = project(cls, sub)
        assert len(proj) <= len(cls)
        assert vc_dimension(proj) <= d


class TestBuilders:
    def test_indicator(self):
        assert strings(build_indicator_class(2)) == ["00", "01", "10"]
        assert len(build_indicator_class(4)) == 5

    def test_bounded_ones(self):
        assert build_bounded_ones_class(3, 1) == build_indicator_class(3)
        assert len(build_bounded_ones_class(4, 2)) == 11
        with pytest.raises(InputError):
            build_bounded_ones_class(3, 4)

    def test_canonical_order(self):
        hs = list(build_bounded_ones_class(4, 2))
        assert hs == sorted(hs)


class TestStar:
    def test_indicator_class_is_star(self):
        assert is_star_system(build_indicator_class(4), StarSystem.canonical(4))

    def test_two_point_petal_is_not(self):
        star = StarSystem(3, bv("000"), (bv("110"), bv("010"), bv("001")))
        assert not is_star_system(cls_of("000", "110", "010", "001"), star)


class TestParsing:
    def test_minimal_file(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("3 2\n000\n111", encoding="utf-8")
        cls = load_class_file(path)
        assert cls.domain_size == 3 and strings(cls) == ["000", "111"]

    def test_comments_and_blank_lines(self):
        assert len(parse_class("# star\n\n2 3\n00\n# petals\n10\n01\n")) == 3

    @pytest.mark.parametrize(
        "text, line",
        [
            ("3 2\n000\n11\n", 3),
            ("3 2\n000\n000\n", 3),
            ("3 x\n000\n", 1),
            ("2 2\n00\n1a\n", 3),
            ("2 1\n00\n11\n", 3),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(ParseError) as info:
            parse_class(text)
        assert info.value.line == line
        assert f"line {line}" in str(info.value)

    def test_count_mismatch(self):
        with pytest.raises(ParseError):
            parse_class("2 3\n00\n01\n")

    def test_format_round_trip(self):
        cls = build_bounded_ones_class(4, 2)
        assert parse_class(format_class(cls)) == cls
