"""End-to-end handoff: adapter output consumed by the collodb toolkit.

The adapter talks to the miner only through files and its command line, so
this test shells out to the installed `collodb` executable rather than
importing anything from it.
"""

import json
import shutil
import subprocess

import pytest

from conftest import read_sent_ids, read_vector_keys
from preproc_adapter.pipeline import preprocess

pytestmark = pytest.mark.skipif(
    shutil.which("collodb") is None, reason="collodb CLI not installed"
)


def run(*argv):
    return subprocess.run(list(argv), capture_output=True, text=True)


@pytest.fixture
def emitted(sample_config):
    preprocess(sample_config)
    return sample_config


def test_ten_sentence_round_trip(emitted, tmp_path):
    db = str(tmp_path / "db.json")
    mine = run(
        "collodb", "mine",
        "--corpus", emitted.corpus_out,
        "--sentence-embeddings", emitted.sentence_vectors_out,
        "--word-embeddings", emitted.word_vectors_out,
        "--verbs", "take,develop",
        "--min-cluster-size", "2",
        "--min-pts", "2",
        "-o", db,
    )
    assert mine.returncode == 0, mine.stderr
    check = run("collodb", "validate", db)
    assert check.returncode == 0, check.stderr

    with open(db, encoding="utf-8") as fh:
        doc = json.load(fh)
    by_verb = {v["verb"]: v for v in doc["verbs"]}
    assert by_verb["take"]["total_instances"] == 5
    assert by_verb["develop"]["total_instances"] == 3
    assert sum(len(v["collostructions"]) for v in doc["verbs"]) >= 1


def test_sent_id_sets_match(emitted):
    corpus_ids = set(read_sent_ids(emitted.corpus_out))
    vector_keys = set(read_vector_keys(emitted.sentence_vectors_out))
    assert corpus_ids == vector_keys
    assert len(corpus_ids) == 10


def test_emitted_vectors_are_normalized(emitted):
    import numpy as np

    for path in (emitted.sentence_vectors_out, emitted.word_vectors_out):
        with open(path, encoding="utf-8") as fh:
            dim = int(fh.readline().split()[1])
            for line in fh:
                _, _, values = line.partition("\t")
                vec = np.array([float(v) for v in values.split()])
                assert vec.shape == (dim,)
                assert abs(np.linalg.norm(vec) - 1.0) < 1e-6


def test_queries_against_mined_database(emitted, tmp_path):
    db = str(tmp_path / "db.json")
    mine = run(
        "collodb", "mine",
        "--corpus", emitted.corpus_out,
        "--sentence-embeddings", emitted.sentence_vectors_out,
        "--word-embeddings", emitted.word_vectors_out,
        "--verbs", "take,develop",
        "--min-cluster-size", "2",
        "--min-pts", "2",
        "-o", db,
    )
    assert mine.returncode == 0, mine.stderr
    query = run("collodb", "query", db, "take")
    assert query.returncode == 0, query.stderr
