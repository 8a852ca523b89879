"""Database round trip, validation, and querying."""

import json

import pytest

from collodb.colgen import generate_collostruction
from collodb.db import (
    Database,
    load_database,
    query,
    save_database,
    validate_database,
)
from collodb.errors import InputError, InvariantError, ValidationError

from conftest import make_clause


def transitive(sent_id, subj="他", obj="球"):
    return make_clause(
        sent_id, 2, "root",
        [(1, "nsubj", "v", subj, 2), (3, "dobj", "v", obj, 2)],
    )


def adverbial(sent_id, adv="快"):
    return make_clause(sent_id, 2, "root", [(1, "advmod", "v", adv, 2)])


def toy_db():
    db = Database(manifest={"note": "toy"})
    kick = [
        generate_collostruction([transitive(f"k{i}") for i in range(4)], "踢", 10),
        generate_collostruction([adverbial(f"a{i}") for i in range(2)], "踢", 10),
    ]
    runs = [
        generate_collostruction(
            [transitive(f"r{i}", subj="你", obj="步") for i in range(5)], "跑", 6
        ),
    ]
    db.add_verb("踢", 10, [c for c in kick if c])
    db.add_verb("跑", 6, [c for c in runs if c])
    return db


def test_ids_are_dense_and_verb_sorted():
    db = toy_db()
    ids = [c.colo_id for c in db.all_collostructions()]
    assert ids == list(range(len(ids)))
    # 跑 sorts before 踢 (codepoint order), so its records come first
    assert db.all_collostructions()[0].verb == "跑"
    assert db.by_id(ids[-1]).colo_id == ids[-1]
    with pytest.raises(InputError):
        db.by_id(999)


def test_duplicate_verb_rejected():
    db = toy_db()
    with pytest.raises(ValidationError):
        db.add_verb("踢", 3, [])


def test_round_trip_preserves_everything(tmp_path):
    db = toy_db()
    p = tmp_path / "db.json"
    save_database(db, str(p))
    loaded = load_database(str(p))
    assert loaded.manifest == db.manifest
    assert set(loaded.verbs) == set(db.verbs)
    for verb in db.verbs:
        assert loaded.verbs[verb].total_instances == db.verbs[verb].total_instances
        assert loaded.verbs[verb].collostructions == db.verbs[verb].collostructions


def test_save_is_byte_identical(tmp_path):
    db = toy_db()
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_database(db, str(p1))
    save_database(load_database(str(p1)), str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_load_rejects_bad_documents(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("not json at all", encoding="utf-8")
    with pytest.raises(InputError):
        load_database(str(p))
    p.write_text(json.dumps({"hello": 1}), encoding="utf-8")
    with pytest.raises(InputError):
        load_database(str(p))
    p.write_text(
        json.dumps({"schema_version": "999", "manifest": {}, "verbs": []}),
        encoding="utf-8",
    )
    with pytest.raises(InputError):
        load_database(str(p))


def test_load_rejects_malformed_record(tmp_path):
    db = toy_db()
    p = tmp_path / "db.json"
    save_database(db, str(p))
    doc = json.loads(p.read_text(encoding="utf-8"))
    del doc["verbs"][0]["collostructions"][0]["slots"]
    p.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(InputError):
        load_database(str(p))


def test_validate_catches_support_overflow():
    db = toy_db()
    db.verbs["踢"].total_instances = 1
    with pytest.raises(InvariantError):
        validate_database(db)


def test_validate_catches_probability_mass_overflow():
    db = toy_db()
    for colo in db.verbs["踢"].collostructions:
        colo.p_col = 0.9
    with pytest.raises(InvariantError):
        validate_database(db)


def test_validate_catches_verb_mismatch():
    db = toy_db()
    db.verbs["踢"].collostructions[0].verb = "跑"
    with pytest.raises(InvariantError):
        validate_database(db)


def test_query_sorts_by_probability_then_id():
    db = toy_db()
    got = query(db, "踢")
    assert [c.support for c in got] == [4, 2]
    assert all(a.p_col >= b.p_col for a, b in zip(got, got[1:]))


def test_query_filters():
    db = toy_db()
    assert all(
        any(s.key.deprel == "dobj" for s in c.slots) for c in query(db, "踢", deprel="dobj")
    )
    assert len(query(db, "踢", deprel="dobj")) == 1
    assert len(query(db, "踢", collexeme="快")) == 1
    assert query(db, "踢", collexeme="不存在") == []


def test_query_unknown_verb_is_an_error():
    db = toy_db()
    with pytest.raises(InputError):
        query(db, "飞")
