import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdisc.cooc import (
    CoocIndex,
    PairIndex,
    ScoredCandidate,
    Source,
    build_cooc_index,
    build_pair_index,
    candidates_from_cooc,
    candidates_from_pairs,
    head_word_heuristic,
    load_cooc_index,
    merge_cooc_indexes,
    save_cooc_index,
)
from hyperdisc.corpus_io import (
    CandidateVocabulary,
    Query,
    QueryKind,
    ReadStats,
    read_header,
)


def brute_force_cooc(lines: list[list[str]], queries: set[str]) -> dict:
    """Independent counter: per line, if q occurs anywhere, every token
    instance other than q itself adds one."""
    counts = {q: {} for q in queries}
    for tokens in lines:
        for q in queries:
            if q not in tokens:
                continue
            for token in tokens:
                if token != q:
                    counts[q][token] = counts[q].get(token, 0) + 1
    return counts


def write_lines(path, lines):
    path.write_text("".join(" ".join(tokens) + "\n" for tokens in lines))


def test_cooc_example(tmp_path):
    path = tmp_path / "n.txt"
    write_lines(path, [["cat", "animal", "pet"], ["cat", "animal"]])
    index = build_cooc_index(path, ["cat"])
    assert index.counts == {"cat": {"animal": 2, "pet": 1}}


def test_query_absent_registers_empty_row(tmp_path):
    path = tmp_path / "n.txt"
    write_lines(path, [["dog", "bone"]])
    index = build_cooc_index(path, ["cat"])
    assert index.counts == {"cat": {}}


def test_self_pairs_excluded_and_multiplicity(tmp_path):
    path = tmp_path / "n.txt"
    write_lines(path, [["cat", "cat", "dog"]])
    index = build_cooc_index(path, ["cat"])
    assert index.counts["cat"] == {"dog": 1}
    write_lines(path, [["cat", "dog", "dog"]])
    index = build_cooc_index(path, ["cat"])
    assert index.counts["cat"] == {"dog": 2}


token_lists = st.lists(
    st.sampled_from(["cat", "dog", "pet", "animal", "tree", "rock"]),
    min_size=1,
    max_size=8,
)


@settings(deadline=None)
@given(st.lists(token_lists, max_size=30), st.sets(st.sampled_from(["cat", "dog", "tree"])))
def test_matches_brute_force(tmp_path_factory, lines, queries):
    path = tmp_path_factory.mktemp("cooc") / "n.txt"
    write_lines(path, lines)
    index = build_cooc_index(path, queries)
    assert index.counts == brute_force_cooc(lines, queries)


def test_order_independence(tmp_path):
    rng = np.random.default_rng(0)
    vocab = [f"w{i}" for i in range(12)]
    lines = [
        list(rng.choice(vocab, size=rng.integers(2, 7))) for _ in range(100)
    ]
    path_a = tmp_path / "a.txt"
    path_b = tmp_path / "b.txt"
    write_lines(path_a, lines)
    write_lines(path_b, [lines[i] for i in rng.permutation(len(lines))])
    queries = {"w0", "w3", "w7"}
    assert build_cooc_index(path_a, queries).counts == build_cooc_index(path_b, queries).counts


def test_shard_merge_homomorphism(tmp_path):
    rng = np.random.default_rng(1)
    vocab = [f"w{i}" for i in range(10)]
    lines = [list(rng.choice(vocab, size=5)) for _ in range(90)]
    queries = {"w0", "w1"}
    whole = tmp_path / "whole.txt"
    write_lines(whole, lines)
    parts = []
    for shard_id in range(3):
        shard_path = tmp_path / f"s{shard_id}.txt"
        write_lines(shard_path, lines[shard_id * 30 : (shard_id + 1) * 30])
        parts.append(build_cooc_index(shard_path, queries))
    merged = merge_cooc_indexes(parts)
    assert merged.counts == build_cooc_index(whole, queries).counts


def test_parallel_build_equals_serial(tmp_path):
    rng = np.random.default_rng(2)
    vocab = [f"w{i}" for i in range(10)]
    lines = [list(rng.choice(vocab, size=4)) for _ in range(200)]
    path = tmp_path / "n.txt"
    write_lines(path, lines)
    queries = {"w0", "w5"}
    assert (
        build_cooc_index(path, queries, workers=1).counts
        == build_cooc_index(path, queries, workers=3).counts
    )


class TestCandidatesFromCooc:
    def index(self, row):
        return CoocIndex({"q": row})

    def test_strictly_above_threshold(self):
        got = candidates_from_cooc(self.index({"a": 6, "b": 5, "c": 7}), "q", None)
        assert [(c.term, c.score) for c in got] == [("c", 7.0), ("a", 6.0)]
        assert all(c.source is Source.COOC for c in got)

    def test_all_at_or_below_threshold(self):
        assert candidates_from_cooc(self.index({"a": 5, "b": 1}), "q", None) == []

    def test_lexicographic_tie_break(self):
        got = candidates_from_cooc(self.index({"y": 6, "x": 6}), "q", None)
        assert [c.term for c in got] == ["x", "y"]

    def test_unknown_query(self):
        assert candidates_from_cooc(self.index({}), "missing", None) == []

    def test_vocab_filter_uses_external_form(self):
        vocab = CandidateVocabulary(frozenset({"oil plant"}))
        got = candidates_from_cooc(
            self.index({"oil_plant": 9, "weed": 8}), "q", vocab
        )
        assert [c.term for c in got] == ["oil plant"]

    def test_truncates_to_k(self):
        row = {f"t{i:02d}": 10 + i for i in range(30)}
        got = candidates_from_cooc(self.index(row), "q", None)
        assert len(got) == 15
        scores = [c.score for c in got]
        assert scores == sorted(scores, reverse=True)
        assert len({c.term for c in got}) == 15


counts_rows = st.dictionaries(
    st.sampled_from([f"c{i}" for i in range(40)]),
    st.integers(min_value=1, max_value=20),
    max_size=30,
)


@given(counts_rows, st.integers(min_value=0, max_value=8))
def test_ranked_list_properties(row, threshold):
    vocab = CandidateVocabulary(frozenset(f"c{i}" for i in range(0, 40, 2)))
    got = candidates_from_cooc(CoocIndex({"q": row}), "q", vocab, threshold)
    assert len(got) <= 15
    scores = [c.score for c in got]
    assert scores == sorted(scores, reverse=True)
    terms = [c.term for c in got]
    assert len(terms) == len(set(terms))
    assert all(t in vocab for t in terms)
    assert all(row[t] > threshold for t in terms)
    got_pairs = candidates_from_pairs(PairIndex({"q": row}, Source.ISA), "q", vocab)
    assert len(got_pairs) <= 15
    assert all(c.term in vocab for c in got_pairs)


def test_pair_index_hearst_counts(tmp_path):
    path = tmp_path / "h.tsv"
    path.write_text("fruit\tapple,pear\nfruit\tapple,pear\n")
    index = build_pair_index(path, Source.HEARST)
    assert index.counts == {"apple": {"fruit": 2}, "pear": {"fruit": 2}}


def test_pair_index_empty(tmp_path):
    path = tmp_path / "h.tsv"
    path.write_text("")
    assert build_pair_index(path, Source.HEARST).counts == {}


def test_pair_index_isa(tmp_path):
    path = tmp_path / "i.tsv"
    path.write_text("fennel\tplant\n")
    index = build_pair_index(path, Source.ISA)
    assert index.counts == {"fennel": {"plant": 1}}
    assert index.kind is Source.ISA


def test_pair_index_malformed_lines_counted(tmp_path):
    path = tmp_path / "h.tsv"
    path.write_text("good\ta,b\nno-tab-line\n\ttrailing\nx\t\n")
    stats = ReadStats()
    index = build_pair_index(path, Source.HEARST, stats)
    assert index.counts == {"a": {"good": 1}, "b": {"good": 1}}
    assert stats.malformed_lines == 3


def test_pair_index_rejects_other_kinds(tmp_path):
    path = tmp_path / "h.tsv"
    path.write_text("")
    with pytest.raises(ValueError):
        build_pair_index(path, Source.COOC)


class TestCandidatesFromPairs:
    def test_tie_and_truncate(self):
        index = PairIndex({"q": {"plant": 3, "herb": 3, "weed": 1}}, Source.ISA)
        got = candidates_from_pairs(index, "q", None, k=2)
        assert [c.term for c in got] == ["herb", "plant"]
        assert all(c.source is Source.ISA for c in got)

    def test_unknown_query(self):
        assert candidates_from_pairs(PairIndex({}, Source.ISA), "q", None) == []

    def test_single_pair_listed(self):
        index = PairIndex({"q": {"plant": 1}}, Source.ISA)
        got = candidates_from_pairs(index, "q", None)
        assert [(c.term, c.score) for c in got] == [("plant", 1.0)]


def test_head_word_for_multiword_concept():
    got = head_word_heuristic(Query("oil plant", QueryKind.CONCEPT))
    assert got == ScoredCandidate("plant", 0.5, Source.ISA)


def test_head_word_skips_unigram_concept():
    assert head_word_heuristic(Query("lemongrass", QueryKind.CONCEPT)) is None


def test_head_word_skips_entities():
    assert head_word_heuristic(Query("new york times", QueryKind.ENTITY)) is None


def test_snapshot_round_trip(tmp_path):
    index = CoocIndex({"b": {"x": 2, "a": 1}, "a": {"z": 7}, "empty": {}})
    path = tmp_path / "idx.tsv"
    save_cooc_index(path, index, header={"config-hash": "cafe"})
    text = path.read_text()
    assert text.startswith("#cooc-index v1\n#config-hash cafe\n")
    body = [line for line in text.splitlines() if not line.startswith("#")]
    assert body == sorted(body)
    loaded = load_cooc_index(path)
    assert loaded.counts == {"a": {"z": 7}, "b": {"x": 2, "a": 1}}
    assert read_header(path)["config-hash"] == "cafe"


def test_load_rejects_wrong_magic(tmp_path):
    path = tmp_path / "idx.tsv"
    path.write_text("#something v2\na\tb\t1\n")
    with pytest.raises(ValueError, match="cooc-index"):
        load_cooc_index(path)
