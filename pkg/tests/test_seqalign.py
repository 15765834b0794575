import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapealign.errors import ShapeAlignError, UsageError
from shapealign.seqalign import (
    ALPHABET,
    AlignParams,
    SubstitutionMatrix,
    align_score,
    format_rational,
    raw_score,
    score_matrix,
    score_matrix_tsv,
    substitution_score,
    symbol_codes,
    traceback,
)

from oracles import brute_force_align_score

DEFAULT = SubstitutionMatrix.default()


def random_symbols(rng: random.Random, max_len: int) -> str:
    return "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, max_len)))


class TestSubstitutionMatrix:
    def test_published_examples(self):
        assert substitution_score("A", "A", DEFAULT) == 2
        assert substitution_score("A", "B", DEFAULT) == 1
        assert substitution_score("A", "C", DEFAULT) == Fraction(1, 2)
        assert substitution_score("M", "S", DEFAULT) == 1
        assert substitution_score("A", "S", DEFAULT) == -2
        assert substitution_score("F", "A", DEFAULT) == Fraction(1, 5)
        assert substitution_score("S", "L", DEFAULT) == Fraction(1, 2)
        assert substitution_score("S", "E", DEFAULT) == -2  # symmetrized entry

    def test_symmetric_with_match_diagonal(self):
        for i, a in enumerate(ALPHABET):
            for b in ALPHABET[i:]:
                assert DEFAULT.score(a, b) == DEFAULT.score(b, a)
            assert DEFAULT.score(a, a) == 2

    def test_unknown_symbol(self):
        with pytest.raises(ShapeAlignError):
            DEFAULT.score("A", "X")

    def test_text_roundtrip(self):
        text = DEFAULT.to_text()
        assert SubstitutionMatrix.from_text(text) == DEFAULT

    def test_rejects_asymmetric_table(self):
        rows = [list(r) for r in DEFAULT.scores]
        rows[6][4] = Fraction(1, 2)  # the uncorrected S-E anomaly
        with pytest.raises(UsageError):
            SubstitutionMatrix(scores=tuple(tuple(r) for r in rows))

    def test_rejects_bad_diagonal(self):
        rows = [list(r) for r in DEFAULT.scores]
        rows[0][0] = Fraction(3)
        with pytest.raises(UsageError):
            SubstitutionMatrix(scores=tuple(tuple(r) for r in rows))

    def test_rejects_bad_header(self):
        text = DEFAULT.to_text().replace("\tA\t", "\tZ\t", 1)
        with pytest.raises(UsageError):
            SubstitutionMatrix.from_text(text)


class TestAlignParams:
    def test_gap_must_be_negative(self):
        with pytest.raises(UsageError):
            AlignParams(gap=Fraction(0))
        with pytest.raises(UsageError):
            AlignParams(gap=Fraction(1, 2))

    def test_gap_coerced_to_fraction(self):
        assert AlignParams(gap=-2).gap == Fraction(-2)


class TestScoreMatrix:
    def test_paper_vector(self):
        m = score_matrix("BLMALSCMM", "AMLALM")
        assert m.final == 7

    def test_self_alignment_three_matches(self):
        m = score_matrix("ALM", "ALM")
        assert m.final == 6

    def test_single_cell(self):
        m = score_matrix("A", "A")
        assert m.value(1, 1) == 2

    def test_zero_borders(self):
        m = score_matrix("BLM", "AM")
        assert all(m.value(0, j) == 0 for j in range(m.n_cols))
        assert all(m.value(i, 0) == 0 for i in range(m.n_rows))

    def test_empty_strings_give_border_only(self):
        m = score_matrix("", "ALM")
        assert m.n_cols == 1 and m.n_rows == 4
        assert m.final == 0

    def test_recurrence_holds_everywhere(self):
        rng = random.Random(3)
        s1, s2 = random_symbols(rng, 12) or "A", random_symbols(rng, 12) or "M"
        m = score_matrix(s1, s2)
        gap = Fraction(-2)
        for i in range(1, m.n_rows):
            for j in range(1, m.n_cols):
                expected = max(
                    m.value(i - 1, j - 1) + DEFAULT.score(s2[i - 1], s1[j - 1]),
                    m.value(i - 1, j) + gap,
                    m.value(i, j - 1) + gap,
                )
                assert m.value(i, j) == expected

    def test_unknown_symbol_rejected(self):
        with pytest.raises(ShapeAlignError):
            score_matrix("AXA", "A")

    def test_tsv_layout(self):
        m = score_matrix("AB", "A")
        text = score_matrix_tsv(m, "AB", "A")
        lines = text.splitlines()
        assert lines[0] == "\t\tA\tB"
        assert lines[1] == "\t0\t0\t0"
        assert lines[2].startswith("A\t0")

    def test_tsv_exact_mode_prints_rationals(self):
        m = score_matrix("AC", "C")
        text = score_matrix_tsv(m, "AC", "C", exact=True)
        assert "1/2" in text


class TestTraceback:
    def test_identical_strings_all_diagonal(self):
        s = "BLMALS"
        res = align_score(s, s)
        assert res.path == ("diagonal",) * len(s)
        assert res.aligned == (s, s)
        assert res.score == 2 * len(s)
        assert res.normalized == 1

    def test_short_overhang_case(self):
        # "AB" vs "A": B-A substitution (1) beats A-A plus a charged gap (0)
        # because the leading overhang along the zero border is free.
        res = align_score("AB", "A")
        assert res.score == 1
        assert res.aligned == ("AB", "-A")
        assert res.path == ("diagonal",)

    def test_gaps_removed_reproduce_inputs(self):
        rng = random.Random(11)
        for _ in range(50):
            s1, s2 = random_symbols(rng, 10), random_symbols(rng, 10)
            res = align_score(s1, s2)
            a1, a2 = res.aligned
            assert len(a1) == len(a2)
            assert a1.replace("-", "") == s1
            assert a2.replace("-", "") == s2

    def test_path_replay_reproduces_score(self):
        rng = random.Random(12)
        gap = Fraction(-2)
        for _ in range(50):
            s1, s2 = random_symbols(rng, 10), random_symbols(rng, 10)
            res = align_score(s1, s2)
            i, j = len(s2), len(s1)
            total = Fraction(0)
            for move in res.path:
                if move == "diagonal":
                    total += DEFAULT.score(s2[i - 1], s1[j - 1])
                    i, j = i - 1, j - 1
                elif move == "up":
                    total += gap
                    i -= 1
                else:
                    total += gap
                    j -= 1
            assert i == 0 or j == 0
            assert total == res.score
            assert len(res.path) <= len(s1) + len(s2)

    def test_mismatched_matrix_rejected(self):
        m = score_matrix("AB", "A")
        with pytest.raises(ShapeAlignError):
            traceback(m, "ABC", "A")


class TestAlignScore:
    def test_paper_vector(self):
        assert align_score("BLMALSCMM", "AMLALM").score == 7
        assert raw_score("BLMALSCMM", "AMLALM") == 7

    def test_empty_query(self):
        res = align_score("", "ALM")
        assert res.score == 0
        assert res.normalized == 0
        assert res.aligned == ("---", "ALM")

    def test_matches_brute_force_oracle(self):
        rng = random.Random(99)
        for _ in range(120):
            s1, s2 = random_symbols(rng, 6), random_symbols(rng, 6)
            assert raw_score(s1, s2) == brute_force_align_score(s1, s2)

    def test_symmetry(self):
        rng = random.Random(5)
        for _ in range(60):
            s1, s2 = random_symbols(rng, 8), random_symbols(rng, 8)
            assert raw_score(s1, s2) == raw_score(s2, s1)

    @settings(max_examples=150, deadline=None)
    @given(
        st.text(alphabet=ALPHABET, max_size=7),
        st.text(alphabet=ALPHABET, max_size=7),
    )
    def test_self_maximality(self, s, t):
        if len(s) == len(t):
            assert raw_score(s, t) <= raw_score(s, s) == 2 * len(s)

    def test_bitwise_determinism(self):
        rng = random.Random(40)
        s1, s2 = random_symbols(rng, 30), random_symbols(rng, 30)
        first = score_matrix(s1, s2)
        second = score_matrix(s1, s2)
        assert np.array_equal(np.asarray(first.scaled), np.asarray(second.scaled))
        assert align_score(s1, s2) == align_score(s1, s2)

    def test_big_denominator_matrix_uses_exact_path(self):
        # scale factor far beyond int64: forces the python-int fill
        rows = []
        primes = [10**9 + 7, 10**9 + 9, 10**9 + 21, 10**9 + 33]
        for i in range(9):
            row = []
            for j in range(9):
                if i == j:
                    row.append(Fraction(2))
                elif (i < 6) != (j < 6):
                    row.append(Fraction(-2))
                else:
                    row.append(Fraction(1, primes[min(abs(i - j) - 1, 3)]))
            rows.append(tuple(row))
        params = AlignParams(gap=Fraction(-2), matrix=SubstitutionMatrix(scores=tuple(rows)))
        rng = random.Random(17)
        for _ in range(10):
            s1, s2 = random_symbols(rng, 5), random_symbols(rng, 5)
            assert raw_score(s1, s2, params) == brute_force_align_score(s1, s2, params)
        m = score_matrix("ABS", "BA", params)
        assert isinstance(m.scaled, list)  # python-int grid, not int64


class TestFormatting:
    def test_integer_prints_bare(self):
        assert format_rational(Fraction(7), exact=False) == "7"
        assert format_rational(Fraction(7), exact=True) == "7"

    def test_nonterminating_fraction(self):
        assert format_rational(Fraction(1, 3), exact=True) == "1/3"
        assert format_rational(Fraction(1, 3), exact=False) == repr(1 / 3)

    def test_symbol_codes_validate(self):
        assert symbol_codes("ABSML").tolist() == [0, 1, 6, 7, 8]
        with pytest.raises(ShapeAlignError):
            symbol_codes("abc")
