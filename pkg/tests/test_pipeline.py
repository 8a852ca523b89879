"""Configuration handling, instance sampling, and the mining pipeline."""

import pytest

from collodb.colgen import validate_collostruction
from collodb.db import load_database
from collodb.errors import ConfigError, InputError
from collodb.pipeline import (
    PipelineConfig,
    VerbInstance,
    collect_instances,
    config_document,
    config_fingerprint,
    config_from_mapping,
    parse_config_file,
    run_mine,
    sample_instances,
)

from conftest import FIXTURES, make_tree


# ---------------------------------------------------------------- config


def test_parse_config_file(tmp_path):
    p = tmp_path / "mine.conf"
    p.write_text(
        "# a comment\n"
        "corpus = corpus.conllu\n"
        "seed = 99   # trailing comment\n"
        "\n"
        "verbs = 过, 吃\n",
        encoding="utf-8",
    )
    raw = parse_config_file(str(p))
    assert raw == {"corpus": "corpus.conllu", "seed": "99", "verbs": "过, 吃"}


def test_parse_config_file_rejects_bad_lines(tmp_path):
    p = tmp_path / "bad.conf"
    p.write_text("just words\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        parse_config_file(str(p))
    p.write_text("seed = 1\nseed = 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        parse_config_file(str(p))
    with pytest.raises(InputError):
        parse_config_file(str(tmp_path / "absent.conf"))


def test_config_from_mapping_coerces_types():
    cfg = config_from_mapping(
        {
            "seed": "42",
            "sense_threshold": "0.75",
            "use_lemma": "no",
            "exhaustive_paths": "true",
            "verbs": "过,吃",
            "corpus": "x.conllu",
        }
    )
    assert cfg.seed == 42
    assert cfg.sense_threshold == 0.75
    assert cfg.use_lemma is False
    assert cfg.exhaustive_paths is True
    assert cfg.verbs == ("过", "吃")
    assert cfg.corpus == "x.conllu"


def test_config_from_mapping_rejects_bad_values():
    with pytest.raises(ConfigError):
        config_from_mapping({"not_a_key": "1"})
    with pytest.raises(ConfigError):
        config_from_mapping({"seed": "abc"})
    with pytest.raises(ConfigError):
        config_from_mapping({"use_lemma": "perhaps"})
    with pytest.raises(ConfigError):
        config_from_mapping({"sense_threshold": "high"})


def test_config_validation():
    with pytest.raises(ConfigError):
        PipelineConfig(max_instances=0)
    with pytest.raises(ConfigError):
        PipelineConfig(sense_threshold=0.0)
    with pytest.raises(ConfigError):
        PipelineConfig(strength_mode="bayesian")
    with pytest.raises(ConfigError):
        PipelineConfig(jobs=0)
    with pytest.raises(ConfigError):
        PipelineConfig(verb_pos=())


def test_config_document_excludes_jobs():
    a = PipelineConfig(corpus="c", jobs=1)
    b = PipelineConfig(corpus="c", jobs=8)
    assert "jobs" not in config_document(a)
    assert config_document(a) == config_document(b)
    assert config_fingerprint(a) == config_fingerprint(b)
    c = PipelineConfig(corpus="c", seed=77)
    assert config_fingerprint(a) != config_fingerprint(c)


# ---------------------------------------------------------------- instances


def verb_tree(sent_id, forms_and_pos):
    rows = []
    for i, (form, pos) in enumerate(forms_and_pos, start=1):
        head = "0" if i == 1 else "1"
        deprel = "root" if i == 1 else "dep"
        rows.append((i, form, form, pos, head, deprel))
    return make_tree(rows, sent_id=sent_id)


def test_collect_instances_first_occurrence_per_sentence():
    tree = verb_tree("s1", [("吃", "VERB"), ("他", "PRON"), ("吃", "VERB")])
    got = collect_instances([tree], PipelineConfig(verbs=("吃",)))
    assert got == {"吃": [VerbInstance("s1", 1)]}


def test_collect_instances_discovery_mode():
    t1 = verb_tree("s1", [("吃", "VERB"), ("饭", "NOUN")])
    t2 = verb_tree("s2", [("跑", "VERB"), ("吃", "VERB")])
    got = collect_instances([t1, t2], PipelineConfig())
    assert set(got) == {"吃", "跑"}
    assert got["吃"] == [VerbInstance("s1", 1), VerbInstance("s2", 2)]


def test_collect_instances_respects_verb_pos():
    tree = verb_tree("s1", [("吃", "XX")])
    got = collect_instances([tree], PipelineConfig(verbs=("吃",)))
    assert got["吃"] == []
    got2 = collect_instances([tree], PipelineConfig(verbs=("吃",), verb_pos=("XX",)))
    assert got2["吃"] == [VerbInstance("s1", 1)]


def test_sample_instances_cap_and_determinism():
    instances = [VerbInstance(f"s{i:03d}", 1) for i in range(100)]
    kept = sample_instances(instances, cap=10, seed=13, verb="吃")
    assert len(kept) == 10
    assert set(kept) <= set(instances)
    assert kept == sorted(kept, key=lambda x: (x.sent_id, x.target_id))
    assert kept == sample_instances(instances, cap=10, seed=13, verb="吃")
    # a different seed or verb key draws a different sample
    assert kept != sample_instances(instances, cap=10, seed=14, verb="吃")
    assert kept != sample_instances(instances, cap=10, seed=13, verb="跑")
    # under the cap nothing is dropped
    assert sample_instances(instances[:5], cap=10, seed=13, verb="吃") == instances[:5]


# ---------------------------------------------------------------- mining


def test_run_mine_end_to_end(tmp_path):
    cfg = PipelineConfig(
        corpus=str(FIXTURES / "corpus.conllu"),
        verbs=("take", "develop"),
        min_cluster_size=3,
        min_pts=2,
    )
    db = run_mine(cfg)
    assert set(db.verbs) == {"take", "develop"}
    manifest = db.manifest
    assert manifest["config_sha256"] == config_fingerprint(cfg)
    assert "jobs" not in manifest["config"]
    assert manifest["n_verbs"] == 2
    for verb in ("take", "develop"):
        report = manifest["verbs"][verb]
        assert report["sampled"] > 0
        assert report["sampled"] == sum(report["kept_sense_sizes"]) + report["discarded"]
        assert report["collostructions"] == len(db.verbs[verb].collostructions)
        # the corpus repeats each frame often enough that mining must
        # actually produce something for both verbs
        assert report["collostructions"] >= 1
        for colo in db.verbs[verb].collostructions:
            validate_collostruction(colo)


def test_run_mine_unknown_verb_warns_not_fails():
    cfg = PipelineConfig(
        corpus=str(FIXTURES / "corpus.conllu"),
        verbs=("take", "unattested"),
        min_cluster_size=3,
        min_pts=2,
    )
    db = run_mine(cfg)
    assert db.verbs["unattested"].collostructions == []
    assert any("unattested" in w for w in db.manifest["warnings"])


def test_run_mine_requires_corpus():
    with pytest.raises(InputError):
        run_mine(PipelineConfig())
    with pytest.raises(InputError):
        run_mine(PipelineConfig(corpus="/nonexistent/path.conllu"))


def test_run_mine_jobs_parity(tmp_path):
    base = dict(
        corpus=str(FIXTURES / "corpus.conllu"),
        verbs=("take", "develop"),
        min_cluster_size=3,
        min_pts=2,
    )
    from collodb.db import save_database

    seq = run_mine(PipelineConfig(**base, jobs=1))
    par = run_mine(PipelineConfig(**base, jobs=3))
    p1, p2 = tmp_path / "seq.json", tmp_path / "par.json"
    save_database(seq, str(p1))
    save_database(par, str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_run_mine_reruns_are_byte_identical(tmp_path):
    from collodb.db import save_database

    cfg = PipelineConfig(
        corpus=str(FIXTURES / "corpus.conllu"),
        verbs=("take",),
        min_cluster_size=3,
        min_pts=2,
    )
    p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
    save_database(run_mine(cfg), str(p1))
    save_database(run_mine(cfg), str(p2))
    assert p1.read_bytes() == p2.read_bytes()
    # and the file loads back cleanly
    load_database(str(p1))
