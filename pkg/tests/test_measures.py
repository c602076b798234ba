import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import jensenshannon as scipy_jsd

from lscd import (
    AlignedPair,
    ChangeRanking,
    DegenerateDistributionError,
    FormatError,
    ParameterError,
    TokenizedCorpus,
    UndefinedDistanceError,
    VectorSpace,
    cosine_distance,
    frequency_difference,
    jensen_shannon_distance,
    rank_targets,
)


class TestCosineDistance:
    def test_identity_is_exact_zero(self):
        v = np.array([0.3, -0.7, 2.0])
        assert cosine_distance(v, v) == 0.0
        assert cosine_distance(v, v.copy()) == 0.0

    def test_orthogonal_is_one(self):
        assert cosine_distance([1.0, 0.0], [0.0, 3.0]) == pytest.approx(1.0, abs=1e-15)

    def test_reference_value(self):
        assert cosine_distance([1.0, 0.0], [1.0, 1.0]) == pytest.approx(
            1.0 - 1.0 / math.sqrt(2.0), abs=1e-12
        )

    def test_zero_vector_error(self):
        with pytest.raises(UndefinedDistanceError):
            cosine_distance([0.0, 0.0], [1.0, 0.0])

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            cosine_distance([1.0], [1.0, 2.0])

    @given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
    @settings(max_examples=60, deadline=None)
    def test_positive_scale_invariance(self, seed, scale):
        rng = np.random.default_rng(seed)
        u, v = rng.normal(size=6), rng.normal(size=6)
        assert abs(cosine_distance(scale * u, v) - cosine_distance(u, v)) < 1e-12


class TestJensenShannon:
    def test_identical_distributions_exact_zero(self):
        p = np.array([0.2, 0.3, 0.5])
        assert jensen_shannon_distance(p, p) == 0.0

    def test_disjoint_supports_is_one(self):
        assert jensen_shannon_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_reference_value(self):
        # p=(1,0), q=(.5,.5): JSD = .5*(log2(4/3) + .5*log2(2/3) + .5)
        got = jensen_shannon_distance([1.0, 0.0], [0.5, 0.5])
        expect = math.sqrt(
            0.5 * (math.log2(4 / 3) + 0.5 * math.log2(2 / 3) + 0.5)
        )
        assert got == pytest.approx(expect, abs=1e-12)
        assert got == pytest.approx(0.5579, abs=5e-5)

    @pytest.mark.parametrize("strategy", ["clip", "shift", "abs"])
    def test_matches_scipy_oracle_after_preprocessing(self, strategy):
        rng = np.random.default_rng(5)
        for _ in range(50):
            u = rng.normal(size=8)
            v = rng.normal(size=8)
            if strategy == "clip":
                pu, pv = np.maximum(u, 0), np.maximum(v, 0)
            elif strategy == "shift":
                pu, pv = u - min(0, u.min()), v - min(0, v.min())
            else:
                pu, pv = np.abs(u), np.abs(v)
            if pu.sum() == 0 or pv.sum() == 0:
                continue
            want = float(scipy_jsd(pu, pv, base=2))
            got = jensen_shannon_distance(u, v, strategy)
            assert got == pytest.approx(want, abs=1e-12)

    def test_negative_strategies_differ(self):
        u = np.array([1.0, -1.0, 0.5])
        v = np.array([-0.5, 1.0, 1.0])
        results = {
            s: jensen_shannon_distance(u, v, s) for s in ("clip", "shift", "abs")
        }
        assert len(set(round(x, 12) for x in results.values())) > 1

    def test_degenerate_after_clip(self):
        with pytest.raises(DegenerateDistributionError):
            jensen_shannon_distance([-1.0, -2.0], [1.0, 1.0], "clip")

    def test_unknown_strategy(self):
        with pytest.raises(ParameterError):
            jensen_shannon_distance([1.0], [1.0], "wrap")


class TestFrequencyDifference:
    def corpus(self, tokens, label="t1", years=(1700, 1799)):
        return TokenizedCorpus(label, years, [(years[0], tokens)])

    def test_equal_frequency_zero(self):
        a = self.corpus(["w", "x", "x", "y"])
        b = self.corpus(["w", "p", "q", "r"])
        assert frequency_difference(a, b, "w") == 0.0

    def test_ratio_e_gives_one(self):
        # choose counts so the smoothed ratio is exactly e
        a = self.corpus(["w"] * 200 + ["x"] * 799)
        f_a = (200 + 0.5) / (999 + 0.5)
        count_b = f_a / math.e * (999 + 0.5) - 0.5
        b = self.corpus(["w"] * round(count_b) + ["x"] * (999 - round(count_b)))
        got = frequency_difference(a, b, "w")
        assert got == pytest.approx(1.0, abs=2e-2)

    def test_absent_from_both_equal_sizes_zero(self):
        a = self.corpus(["x"] * 10)
        b = self.corpus(["y"] * 10)
        assert frequency_difference(a, b, "ghost") == 0.0

    def test_symmetric(self):
        a = self.corpus(["w"] * 3 + ["x"] * 7)
        b = self.corpus(["w"] * 1 + ["x"] * 5)
        assert frequency_difference(a, b, "w") == frequency_difference(b, a, "w")

    def test_empty_corpus_rejected(self):
        a = TokenizedCorpus("t1", (1700, 1799), [])
        b = self.corpus(["x"])
        with pytest.raises(ParameterError):
            frequency_difference(a, b, "x")


def make_pair(rows_a, rows_b):
    words = sorted(rows_a)
    a = VectorSpace({w: i for i, w in enumerate(words)},
                    np.array([rows_a[w] for w in words], float), "sgns")
    b_words = sorted(rows_b)
    b = VectorSpace({w: i for i, w in enumerate(b_words)},
                    np.array([rows_b[w] for w in b_words], float), "sgns")
    shared = tuple(sorted(set(words) & set(b_words)))
    return AlignedPair(a, b, shared, "OP")


class TestRankTargets:
    def test_identical_vectors_score_zero_lexicographic(self):
        rows = {"b": [1.0, 0.0], "a": [0.0, 1.0], "c": [1.0, 1.0]}
        pair = make_pair(rows, rows)
        ranking = rank_targets(["b", "a", "c"], measure="cd", pair=pair)
        assert [w for w, _ in ranking.entries] == ["a", "b", "c"]
        assert all(score == 0.0 for _, score in ranking.entries)

    def test_ordering_matches_per_word_oracle(self):
        rows_a = {"x": [1.0, 0.0], "y": [1.0, 0.0], "z": [1.0, 0.0]}
        rows_b = {"x": [1.0, 0.1], "y": [0.0, 1.0], "z": [1.0, 1.0]}
        pair = make_pair(rows_a, rows_b)
        ranking = rank_targets(["x", "y", "z"], measure="cd", pair=pair)
        oracle = {
            w: cosine_distance(rows_a[w], rows_b[w]) for w in ("x", "y", "z")
        }
        want = sorted(oracle, key=lambda w: (-oracle[w], w))
        assert list(ranking.words()) == want
        for word, score in ranking.entries:
            assert score == pytest.approx(oracle[word], abs=1e-15)

    def test_missing_target_flagged_at_ceiling(self, caplog):
        rows_a = {"x": [1.0, 0.0], "y": [1.0, 0.0], "gone": [1.0, 1.0]}
        rows_b = {"x": [0.0, 1.0], "y": [1.0, 0.1]}
        pair = make_pair(rows_a, rows_b)
        with caplog.at_level("WARNING"):
            ranking = rank_targets(["x", "y", "gone"], measure="cd", pair=pair)
        assert ranking.flagged == frozenset({"gone"})
        scores = ranking.scores()
        assert scores["gone"] == max(scores.values())
        assert any("gone" in r.message for r in caplog.records)

    def test_empty_targets_rejected(self):
        pair = make_pair({"x": [1.0]}, {"x": [1.0]})
        with pytest.raises(ParameterError):
            rank_targets([], measure="cd", pair=pair)

    def test_duplicate_targets_rejected(self):
        pair = make_pair({"x": [1.0]}, {"x": [1.0]})
        with pytest.raises(ParameterError):
            rank_targets(["x", "x"], measure="cd", pair=pair)

    def test_order_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(14)
        scores = {f"w{i}": float(rng.uniform(0, 2)) for i in range(10)}
        plain = ChangeRanking.from_scores(scores, "CD")
        squeezed = ChangeRanking.from_scores(
            {w: math.atan(s) for w, s in scores.items()}, "CD"
        )
        assert plain.words() == squeezed.words()

    def test_fd_measure_route(self):
        a = TokenizedCorpus("t1", (1700, 1799), [(1750, ["w"] * 8 + ["x"] * 2)])
        b = TokenizedCorpus("t2", (1800, 1899), [(1850, ["w"] * 2 + ["x"] * 8)])
        ranking = rank_targets(["w", "x"], measure="fd", corpus_a=a, corpus_b=b)
        assert ranking.measure_tag == "FD"
        assert set(ranking.words()) == {"w", "x"}

    def test_knn_measure_route(self):
        rng = np.random.default_rng(15)
        words = [f"w{i}" for i in range(8)]
        a = VectorSpace({w: i for i, w in enumerate(words)}, rng.normal(size=(8, 4)), "sgns")
        b = VectorSpace({w: i for i, w in enumerate(words)}, rng.normal(size=(8, 4)), "sgns")
        ranking = rank_targets(["w0", "w1"], measure="knn-cd", space_a=a, space_b=b, knn_k=3)
        assert ranking.measure_tag == "KNN-CD"
        assert len(ranking.entries) == 2


class TestRankingFiles:
    def test_tsv_round_trip(self, tmp_path):
        ranking = ChangeRanking.from_scores({"b": 0.25, "a": 1.5}, "CD")
        path = tmp_path / "ranking.tsv"
        ranking.save(path)
        text = path.read_text(encoding="utf-8")
        assert text == "a\t1.500000\nb\t0.250000\n"
        loaded = ChangeRanking.load(path)
        assert loaded.words() == ("a", "b")

    def test_duplicate_word_rejected_on_load(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("a\t1.0\na\t0.5\n", encoding="utf-8")
        with pytest.raises(FormatError):
            ChangeRanking.load(path)

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("a\thigh\n", encoding="utf-8")
        with pytest.raises(FormatError):
            ChangeRanking.load(path)

    def test_unsorted_entries_rejected(self):
        with pytest.raises(ParameterError):
            ChangeRanking((("a", 0.1), ("b", 0.9)), "CD")
