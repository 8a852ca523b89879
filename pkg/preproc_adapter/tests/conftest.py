import pytest

from preproc_adapter.config import AdapterConfig

# ten sentences: five instances of take (three textually identical),
# three of develop (two identical), and two with neither target verb
SAMPLE_SENTENCES = [
    "the worker took the offer",
    "the worker took the offer",
    "the worker took the offer",
    "the manager took the offer",
    "the student took the class",
    "the student developed the plan",
    "the student developed the plan",
    "the engineer developed the design",
    "the choir sang together",
    "a quiet morning passed",
]


def write_sample(tmp_path, sentences=None):
    path = tmp_path / "input.txt"
    path.write_text("\n".join(SAMPLE_SENTENCES if sentences is None else sentences) + "\n")
    return str(path)


@pytest.fixture
def sample_config(tmp_path):
    return AdapterConfig(
        inputs=[write_sample(tmp_path)],
        corpus_out=str(tmp_path / "corpus.conllu"),
        sentence_vectors_out=str(tmp_path / "sentences.vec"),
        word_vectors_out=str(tmp_path / "words.vec"),
        samples_out=str(tmp_path / "samples.json"),
        verbs=["take", "develop"],
        sample_cap=4,
        dim=32,
        seed=13,
    )


def read_sent_ids(conllu_path):
    ids = []
    with open(conllu_path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# sent_id = "):
                ids.append(line.split("=", 1)[1].strip())
    return ids


def read_vector_keys(vec_path):
    with open(vec_path, encoding="utf-8") as fh:
        header = fh.readline()
        assert header.startswith("dim ")
        return [line.split("\t", 1)[0] for line in fh if line.strip()]
