"""Corpus reading, tree validation, and embedding plumbing."""

import numpy as np
import pytest

from collodb.errors import ParseError, ValidationError
from collodb.ingest import (
    EmbeddingStore,
    cosine,
    fallback_embed,
    load_embeddings,
    parse_conllu,
    tree_to_conllu,
    trees_to_conllu,
)

from conftest import FIXTURES, conllu_text, make_tree

ROWS = [
    (1, "the", "the", "DET", 2, "det"),
    (2, "cat", "cat", "NOUN", 3, "nsubj"),
    (3, "slept", "sleep", "VERB", 0, "root"),
]


def test_parse_basic_fields():
    tree = make_tree(ROWS, sent_id="x9", text="the cat slept")
    assert tree.sent_id == "x9"
    assert tree.text == "the cat slept"
    assert [t.form for t in tree.tokens] == ["the", "cat", "slept"]
    assert tree.token(3).lemma == "sleep"
    assert tree.token(3).word == "sleep"
    assert tree.root.id == 3
    assert [c.id for c in tree.children(3)] == [2]
    assert tree.governor(2).id == 3
    assert tree.governor(3) is None


def test_word_falls_back_to_form_when_lemma_missing():
    rows = [(1, "ran", "_", "VERB", 0, "root")]
    tree = make_tree(rows)
    assert tree.token(1).lemma == ""
    assert tree.token(1).word == "ran"


def test_deprel_lowercased():
    rows = [(1, "ran", "run", "VERB", 0, "ROOT")]
    assert make_tree(rows).token(1).deprel == "root"


def test_multiword_and_empty_node_lines_skipped():
    text = (
        "# sent_id = m1\n"
        "1-2\tdella\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "1\tdi\tdi\tADP\t_\t_\t2\tcase\t_\t_\n"
        "1.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "2\tcasa\tcasa\tNOUN\t_\t_\t0\troot\t_\t_\n"
    )
    tree = parse_conllu(text, is_text=True)[0]
    assert [t.id for t in tree.tokens] == [1, 2]


def test_round_trip_is_identity():
    trees = parse_conllu(str(FIXTURES / "corpus.conllu"))
    rendered = trees_to_conllu(trees)
    again = parse_conllu(rendered, is_text=True)
    assert trees_to_conllu(again) == rendered
    assert [t.sent_id for t in again] == [t.sent_id for t in trees]
    assert parse_conllu(tree_to_conllu(trees[0]), is_text=True)[0] == trees[0]


def test_missing_blank_line_between_sentences():
    text = conllu_text("a", ROWS).rstrip("\n") + "\n# sent_id = b\n" + conllu_text("b", ROWS)
    with pytest.raises(ParseError, match="blank line"):
        parse_conllu(text, is_text=True)


def test_bad_trees_rejected():
    cases = [
        [(1, "a", "a", "X", 0, "root"), (3, "b", "b", "X", 1, "dep")],  # gap in ids
        [(1, "a", "a", "X", 0, "root"), (2, "b", "b", "X", 0, "root")],  # two roots
        [(1, "a", "a", "X", 1, "dep")],  # self-headed, no root
        [(1, "a", "a", "X", 5, "dep")],  # head out of range
        [
            (1, "a", "a", "X", 0, "root"),
            (2, "b", "b", "X", 3, "dep"),
            (3, "c", "c", "X", 2, "dep"),  # 2<->3 cycle, unreachable from root
        ],
    ]
    for rows in cases:
        with pytest.raises((ParseError, ValidationError)):
            make_tree(rows)


def test_wrong_column_count():
    with pytest.raises(ParseError, match="10"):
        parse_conllu("# sent_id = q\n1\tx\tx\n", is_text=True)


def test_embedding_store_checks():
    store = EmbeddingStore(3)
    store.add("a", [3.0, 0.0, 4.0])
    assert abs(np.linalg.norm(store.get("a")) - 1.0) < 1e-6
    assert "a" in store and "b" not in store
    with pytest.raises(ValidationError):
        store.add("a", [1.0, 0.0, 0.0])  # duplicate
    with pytest.raises(ValidationError):
        store.add("b", [1.0, 0.0])  # wrong shape
    with pytest.raises(ValidationError):
        store.add("c", [np.nan, 0.0, 0.0])
    with pytest.raises(ValidationError):
        store.add("d", [0.0, 0.0, 0.0])


def test_load_embeddings_file(tmp_path):
    path = tmp_path / "vecs.txt"
    path.write_text("dim 2\nfoo\t1.0 0.0\nbar\t0.6 0.8\n", encoding="utf-8")
    store = load_embeddings(str(path))
    assert store.dim == 2
    assert cosine(store.get("foo"), store.get("bar")) == pytest.approx(0.6)
    with pytest.raises(ValidationError):
        load_embeddings(str(path), expected_dim=5)
    bad = tmp_path / "bad.txt"
    bad.write_text("dim 2\nfoo\t1.0 oops\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_embeddings(str(bad))


def test_cosine_bounds_and_zero_vector():
    assert cosine(np.array([1.0, 0.0]), np.array([1.0, 0.0])) == 1.0
    assert cosine(np.array([1.0, 0.0]), np.array([-1.0, 0.0])) == -1.0
    with pytest.raises(ValidationError):
        cosine(np.array([0.0, 0.0]), np.array([1.0, 0.0]))


def test_fallback_embed_properties():
    # deterministic, unit-norm, seeded; near-duplicates beat unrelated text
    rng = np.random.default_rng(5)
    words = ["develop", "developer", "developed", "quartz", "banana", "take"]
    for _ in range(20):
        w = words[int(rng.integers(0, len(words)))]
        v1 = fallback_embed(w)
        v2 = fallback_embed(w)
        assert np.array_equal(v1, v2)
        assert abs(np.linalg.norm(v1) - 1.0) < 1e-9
    assert not np.array_equal(fallback_embed("develop", seed=1), fallback_embed("develop", seed=2))
    near = cosine(fallback_embed("developer"), fallback_embed("developed"))
    far = cosine(fallback_embed("developer"), fallback_embed("quartz"))
    assert near > far


def test_fallback_embed_input_checks():
    with pytest.raises(ValidationError):
        fallback_embed("")
    with pytest.raises(ValidationError):
        fallback_embed("ok", dim=4)
