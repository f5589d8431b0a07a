"""Coverage sets, revisitation times, and the browsing walk."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from broccoli.compat import (
    EXTERNAL_PREV,
    AnalysisRow,
    ClickstreamGraph,
    CoverageConfig,
    WalkConfig,
    analyze_books,
    analyze_clickstream,
    corpus_revisitation,
    coverage_lemma_set,
    format_csv,
    lemma_revisitation,
    lemma_stream,
    load_clickstream_graph,
    load_page_lengths,
    nearest_rank,
    simulate_sessions,
)

DAYS_PER_TOKEN = 1.0 / 200.0 / (3.0 * 60.0)  # default speed and hours


class TestNearestRank:
    def test_examples(self):
        assert nearest_rank([1, 1, 1, 1, 100], 90) == 100
        assert nearest_rank([5], 90) == 5
        assert nearest_rank([3, 1, 2], 100) == 3

    def test_rejects_empty_and_bad_percentile(self):
        with pytest.raises(ValueError):
            nearest_rank([], 90)
        with pytest.raises(ValueError):
            nearest_rank([1], 0)
        with pytest.raises(ValueError):
            nearest_rank([1], 101)

    @given(
        st.lists(st.integers(-1000, 1000), min_size=1, max_size=50),
        st.integers(1, 100),
    )
    def test_matches_rank_share_oracle(self, values, p):
        # smallest value whose rank share reaches p percent
        ordered = sorted(values)
        n = len(ordered)
        expected = next(
            ordered[r - 1] for r in range(1, n + 1) if Fraction(100 * r, n) >= p
        )
        assert nearest_rank(values, p) == expected


class TestCoverageLemmaSet:
    def test_half_coverage(self):
        assert coverage_lemma_set("a a a b b c".split(), 0.5) == ["a"]

    def test_partial_coverage(self):
        assert coverage_lemma_set("a a a b b c".split(), 0.8) == ["a", "b"]

    def test_frequency_tie_breaks_lexicographically(self):
        assert coverage_lemma_set("a a b b c".split(), 0.4) == ["a"]
        assert coverage_lemma_set("b b a a c".split(), 0.4) == ["a"]

    def test_alpha_one_takes_everything(self):
        assert coverage_lemma_set("c b a".split(), 1.0) == ["a", "b", "c"]

    def test_rejects_empty_corpus_and_bad_alpha(self):
        with pytest.raises(ValueError):
            coverage_lemma_set([], 0.5)
        with pytest.raises(ValueError):
            coverage_lemma_set(["a"], 0.0)
        with pytest.raises(ValueError):
            coverage_lemma_set(["a"], 1.1)

    @given(
        st.lists(st.sampled_from("abcde"), min_size=1, max_size=60),
        st.integers(1, 10),
        st.integers(1, 10),
    )
    def test_monotone_in_alpha(self, corpus, n1, n2):
        lo, hi = sorted([n1, n2])
        smaller = coverage_lemma_set(corpus, lo / 10)
        larger = coverage_lemma_set(corpus, hi / 10)
        assert set(smaller) <= set(larger)


class TestLemmaRevisitation:
    def test_alternating_pair(self):
        corpus = "a b a b a b".split()
        days = lemma_revisitation(corpus, "a", CoverageConfig(alpha=0.9))
        assert days == pytest.approx(2 * DAYS_PER_TOKEN)
        assert days == pytest.approx(5.56e-5, rel=1e-3)

    def test_single_occurrence_is_undefined(self):
        assert lemma_revisitation("a b c".split(), "a", CoverageConfig(0.9)) is None
        assert lemma_revisitation("a b c".split(), "z", CoverageConfig(0.9)) is None

    def test_percentile_picks_the_large_gap(self):
        # occurrences at 0,1,2,3,4,104: gaps 1,1,1,1,100
        corpus = ["x"] * 5 + [f"f{i}" for i in range(99)] + ["x"]
        assert corpus[104] == "x" and len(corpus) == 105
        days = lemma_revisitation(corpus, "x", CoverageConfig(alpha=0.9))
        assert days == pytest.approx(100 * DAYS_PER_TOKEN)

    def test_linear_in_speed_and_hours(self):
        corpus = ("a b " * 40).split()
        base = lemma_revisitation(corpus, "a", CoverageConfig(0.9, 200.0, 3.0))
        half_speed = lemma_revisitation(corpus, "a", CoverageConfig(0.9, 100.0, 3.0))
        half_hours = lemma_revisitation(corpus, "a", CoverageConfig(0.9, 200.0, 1.5))
        assert half_speed == 2 * base
        assert half_hours == 2 * base


class TestCorpusRevisitation:
    def test_identical_gaps_give_that_gap(self):
        corpus = "a b c a b c a b c".split()
        result = corpus_revisitation(corpus, CoverageConfig(alpha=1.0))
        assert result.days == pytest.approx(3 * DAYS_PER_TOKEN)
        assert result.vocab_size == 3
        assert result.excluded == 0
        assert result.token_count == 9

    def test_small_alpha_reduces_to_top_lemma(self):
        corpus = "a x a y a z".split()
        result = corpus_revisitation(corpus, CoverageConfig(alpha=0.5))
        assert result.vocab_size == 1
        assert result.days == lemma_revisitation(corpus, "a", CoverageConfig(0.5))

    def test_singletons_in_coverage_set_are_counted(self):
        result = corpus_revisitation("a a b".split(), CoverageConfig(alpha=1.0))
        assert result.vocab_size == 2
        assert result.excluded == 1
        assert result.days == pytest.approx(DAYS_PER_TOKEN)

    def test_empty_corpus(self):
        result = corpus_revisitation([], CoverageConfig(alpha=0.9))
        assert result == pytest.approx(result)  # dataclass equality below
        assert result.days is None
        assert result.vocab_size == 0
        assert result.token_count == 0

    @given(
        st.lists(st.sampled_from("abcde"), min_size=1, max_size=40),
        st.integers(1, 10),
    )
    def test_matches_per_lemma_recomputation(self, corpus, n):
        cfg = CoverageConfig(alpha=n / 10)
        result = corpus_revisitation(corpus, cfg)
        per_lemma = [
            lemma_revisitation(corpus, lemma, cfg)
            for lemma in coverage_lemma_set(corpus, cfg.alpha)
        ]
        defined = [d for d in per_lemma if d is not None]
        assert result.excluded == per_lemma.count(None)
        if defined:
            assert result.days == nearest_rank(defined, cfg.percentile)
        else:
            assert result.days is None


class TestLemmaStream:
    def test_words_only_lowercased_lemmas(self):
        stream = lemma_stream("The cats ran quickly. 42 dogs!")
        assert stream == ["the", "cat", "run", "quickly", "dog"]

    def test_empty_text(self):
        assert lemma_stream("... 123 ...") == []


def two_page_graph():
    return ClickstreamGraph(
        pages={"A": 100, "B": 50},
        transitions={("A", "B"): 5},
        visits={"A": 10, "B": 0},
        no_click={"A": 0.0, "B": 1.0},
    )


class TestClickstreamGraph:
    def test_validates_no_click_range(self):
        with pytest.raises(ValueError, match="no_click"):
            ClickstreamGraph({"A": 1}, {}, {"A": 1}, {"A": 1.5})

    def test_terminal_page_must_stop(self):
        with pytest.raises(ValueError, match="outgoing"):
            ClickstreamGraph({"A": 1}, {}, {"A": 1}, {"A": 0.5})

    def test_unknown_transition_page(self):
        with pytest.raises(ValueError, match="unknown page"):
            ClickstreamGraph({"A": 1}, {("A", "B"): 2}, {"A": 1}, {"A": 0.0})

    def test_missing_no_click_entry(self):
        with pytest.raises(ValueError, match="no-click"):
            ClickstreamGraph({"A": 1}, {}, {"A": 1}, {})


class TestLoaders:
    def test_page_lengths(self, tmp_path):
        path = tmp_path / "lengths.tsv"
        path.write_text("# pages\nA\t3\nB\t2\n\nC\t4\n", encoding="utf-8")
        assert load_page_lengths(path) == {"A": 3, "B": 2, "C": 4}

    def test_duplicate_length_warns_last_wins(self, tmp_path):
        path = tmp_path / "lengths.tsv"
        path.write_text("A\t3\nA\t5\n", encoding="utf-8")
        with pytest.warns(UserWarning, match="duplicate"):
            assert load_page_lengths(path) == {"A": 5}

    def test_bad_rows_rejected(self, tmp_path):
        path = tmp_path / "lengths.tsv"
        path.write_text("A\tthree\n", encoding="utf-8")
        with pytest.raises(ValueError, match="lengths.tsv:1"):
            load_page_lengths(path)
        path.write_text("A\t-1\n", encoding="utf-8")
        with pytest.raises(ValueError, match="negative"):
            load_page_lengths(path)

    def test_graph_from_tsv(self, tmp_path):
        lengths = {"A": 3, "B": 2, "C": 4}
        path = tmp_path / "graph.tsv"
        path.write_text(
            f"{EXTERNAL_PREV}\tA\t10\n"
            "A\tB\t6\n"
            "A\tC\t2\n"
            "B\tA\t1\n"
            f"{EXTERNAL_PREV}\tB\t1\n",
            encoding="utf-8",
        )
        graph = load_clickstream_graph(path, lengths)
        assert graph.visits == {"A": 11, "B": 7, "C": 2}
        assert graph.transitions == {("A", "B"): 6, ("A", "C"): 2, ("B", "A"): 1}
        assert graph.no_click["A"] == pytest.approx(1 - 8 / 11)
        assert graph.no_click["B"] == pytest.approx(6 / 7)
        assert graph.no_click["C"] == 1.0

    def test_graph_page_missing_from_lengths(self, tmp_path):
        path = tmp_path / "graph.tsv"
        path.write_text("A\tB\t2\n", encoding="utf-8")
        with pytest.raises(ValueError, match="lengths"):
            load_clickstream_graph(path, {"A": 1})

    def test_explicit_no_click_override(self, tmp_path):
        path = tmp_path / "graph.tsv"
        path.write_text(f"{EXTERNAL_PREV}\tA\t5\nA\tB\t5\n", encoding="utf-8")
        graph = load_clickstream_graph(
            path, {"A": 1, "B": 1}, no_click={"A": 0.25, "B": 1.0}
        )
        assert graph.no_click == {"A": 0.25, "B": 1.0}

    def test_overclicked_page_clamps_to_zero(self, tmp_path):
        # more clicks out than recorded visits in
        path = tmp_path / "graph.tsv"
        path.write_text(f"{EXTERNAL_PREV}\tA\t1\nA\tB\t9\nB\tA\t1\n", encoding="utf-8")
        graph = load_clickstream_graph(path, {"A": 1, "B": 1})
        assert graph.no_click["A"] == 0.0


class TestWalkConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            WalkConfig(session_tokens=0)
        with pytest.raises(ValueError):
            WalkConfig(session_tokens=10, total_tokens=5)
        with pytest.raises(ValueError):
            WalkConfig(session_tokens=1, restart_stall_limit=0)


class TestSimulateSessions:
    def test_hand_traced_two_page_walk(self):
        cfg = WalkConfig(session_tokens=250, total_tokens=250, seed=7)
        result = simulate_sessions(two_page_graph(), cfg)
        assert result.pages == ("A", "B", "B", "B")
        assert len(result.tokens) == 250
        assert result.tokens[:2] == ("A/0", "A/1")
        assert result.tokens[-1] == "B/49"
        assert result.sessions == 1
        assert result.stalls == 0

    def test_single_page_covers_session(self):
        graph = ClickstreamGraph({"P": 300}, {}, {"P": 4}, {"P": 1.0})
        cfg = WalkConfig(session_tokens=250, total_tokens=300, seed=0)
        result = simulate_sessions(graph, cfg)
        assert result.pages == ("P",)
        assert len(result.tokens) == 300

    def test_start_page_emitted_once_per_session(self):
        # stop at B always; restarts must not re-emit A's text
        result = simulate_sessions(
            two_page_graph(), WalkConfig(session_tokens=250, total_tokens=250, seed=3)
        )
        assert result.pages.count("A") == 1

    def test_stall_abandons_session(self):
        graph = ClickstreamGraph({"P": 5}, {}, {"P": 4}, {"P": 1.0})
        cfg = WalkConfig(
            session_tokens=50, total_tokens=50, seed=0, restart_stall_limit=3
        )
        result = simulate_sessions(graph, cfg)
        assert result.stalls >= 1
        assert result.pages == ("P",) * len(result.pages)

    def test_seed_determinism(self):
        lengths = {"A": 3, "B": 2, "C": 1}
        graph = ClickstreamGraph(
            pages=lengths,
            transitions={("A", "B"): 2, ("A", "C"): 1, ("B", "C"): 1, ("C", "A"): 1},
            visits={"A": 5, "B": 3, "C": 2},
            no_click={"A": 0.2, "B": 0.3, "C": 0.5},
        )
        cfg = WalkConfig(session_tokens=20, total_tokens=400, seed=11)
        first = simulate_sessions(graph, cfg)
        second = simulate_sessions(graph, cfg)
        assert first == second
        other = simulate_sessions(
            graph, WalkConfig(session_tokens=20, total_tokens=400, seed=12)
        )
        assert other.pages != first.pages

    def test_edge_frequencies_match_counts(self):
        # X chooses Y three times as often as Z; Y and Z bounce back
        graph = ClickstreamGraph(
            pages={"X": 1, "Y": 1, "Z": 1},
            transitions={("X", "Y"): 3, ("X", "Z"): 1, ("Y", "X"): 1, ("Z", "X"): 1},
            visits={"X": 1, "Y": 0, "Z": 0},
            no_click={"X": 0.0, "Y": 0.0, "Z": 0.0},
        )
        n = 20_001
        cfg = WalkConfig(session_tokens=n, total_tokens=n, seed=5)
        result = simulate_sessions(graph, cfg)
        from_x = [
            result.pages[i + 1]
            for i in range(len(result.pages) - 1)
            if result.pages[i] == "X"
        ]
        share_y = from_x.count("Y") / len(from_x)
        assert len(from_x) > 5000
        assert abs(share_y - 0.75) < 0.05

    def test_no_token_mass_rejected(self):
        graph = ClickstreamGraph({"P": 0}, {}, {"P": 1}, {"P": 1.0})
        with pytest.raises(ValueError, match="tokens"):
            simulate_sessions(graph, WalkConfig(session_tokens=1, total_tokens=1))

    def test_barren_cycle_abandoned(self, monkeypatch):
        import broccoli.compat as compat

        monkeypatch.setattr(compat, "_MAX_BARREN_STEPS", 50)
        graph = ClickstreamGraph(
            pages={"P": 0, "Q": 0, "R": 5},
            transitions={("P", "Q"): 1, ("Q", "P"): 1},
            visits={"P": 1},
            no_click={"P": 0.0, "Q": 0.0, "R": 1.0},
        )
        cfg = WalkConfig(
            session_tokens=10, total_tokens=10, seed=0, restart_stall_limit=2
        )
        with pytest.raises(RuntimeError, match="progress"):
            simulate_sessions(graph, cfg)

    def test_page_tokens_override(self):
        graph = two_page_graph()
        tokens = {"A": ["cat"] * 100, "B": ["dog"] * 50}
        cfg = WalkConfig(session_tokens=250, total_tokens=250, seed=7)
        result = simulate_sessions(graph, cfg, page_tokens=tokens)
        assert set(result.tokens) == {"cat", "dog"}
        assert result.tokens.count("cat") == 100


def zipf_text(n_tokens=5000, vocab=150, seed=42):
    rng = random.Random(seed)
    words = []
    for i in range(vocab):
        name = []
        value = i
        for _ in range(3):
            name.append(chr(ord("a") + value % 26))
            value //= 26
        words.append("".join(name))
    weights = [1.0 / (rank + 1) for rank in range(vocab)]
    return " ".join(rng.choices(words, weights, k=n_tokens))


class TestAnalyze:
    def test_books_alpha_sweep_rows(self, tmp_path):
        book = tmp_path / "book.txt"
        book.write_text(zipf_text(), encoding="utf-8")
        rows, errors = analyze_books([book], alphas=[0.5, 0.7, 0.9])
        assert errors == []
        assert [row.alpha for row in rows] == [0.5, 0.7, 0.9]
        days = [row.revisitation_days for row in rows]
        assert days == sorted(days)  # rarer lemmas only add longer gaps
        assert all(row.session_tokens is None for row in rows)
        assert all(row.corpus == "book.txt" for row in rows)

    def test_unreadable_file_reported_not_fatal(self, tmp_path):
        book = tmp_path / "book.txt"
        book.write_text("a a a b", encoding="utf-8")
        rows, errors = analyze_books([book, tmp_path / "gone.txt"], alphas=[0.5])
        assert len(rows) == 1
        assert len(errors) == 1
        assert "gone.txt" in errors[0]

    def test_clickstream_rows(self):
        rows = analyze_clickstream(
            two_page_graph(),
            "wiki",
            alphas=[0.9],
            walk_cfg=WalkConfig(session_tokens=250, total_tokens=1000, seed=1),
        )
        (row,) = rows
        assert row.corpus == "wiki"
        assert row.session_tokens == 250
        assert row.token_count >= 1000

    def test_csv_format(self):
        rows = [
            AnalysisRow("book.txt", 0.9, None, 0.5, 120, 30000, 2),
            AnalysisRow("wiki", 0.7, 5000, None, 40, 2000000, 0),
        ]
        text = format_csv(rows)
        lines = text.splitlines()
        assert lines[0] == "corpus,alpha,N,revisitation_days,vocab_size,tokens,excluded"
        assert lines[1] == "book.txt,0.9,,0.5,120,30000,2"
        assert lines[2] == "wiki,0.7,5000,,40,2000000,0"
