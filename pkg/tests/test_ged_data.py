"""Labeled dataset format and verb-token resolution."""

import pytest

from collodb.errors import InputError, ParseError
from collodb.ged.data import GedInstance, load_ged_dataset, resolve_target, save_ged_dataset

from conftest import make_tree


def inst(text, verb, begin, end, label="correct", correction=None):
    return GedInstance(text=text, verb=verb, begin=begin, end=end, label=label, correction=correction)


def test_round_trip(tmp_path):
    items = [
        inst("他 吃 饭", "吃", 2, 3),
        inst("他 看 错", "看", 2, 3, label="error", correction="他 读 错"),
    ]
    p = tmp_path / "data.jsonl"
    save_ged_dataset(items, str(p))
    assert load_ged_dataset(str(p)) == items
    # blank lines tolerated
    p.write_text(p.read_text(encoding="utf-8") + "\n\n", encoding="utf-8")
    assert load_ged_dataset(str(p)) == items


def test_load_reports_line_numbers(tmp_path):
    p = tmp_path / "bad.jsonl"
    good = '{"text": "他 吃", "verb": "吃", "begin-offset": 2, "end-offset": 3, "label": "correct"}'
    p.write_text(good + "\nnot json\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        load_ged_dataset(str(p))
    assert "line 2" in str(err.value)


def test_load_validates_label_and_offsets(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text(
        '{"text": "abc", "verb": "b", "begin-offset": 1, "end-offset": 2, "label": "maybe"}\n',
        encoding="utf-8",
    )
    with pytest.raises(ParseError):
        load_ged_dataset(str(p))
    p.write_text(
        '{"text": "abc", "verb": "b", "begin-offset": 2, "end-offset": 1, "label": "correct"}\n',
        encoding="utf-8",
    )
    with pytest.raises(ParseError):
        load_ged_dataset(str(p))
    p.write_text(
        '{"text": "abc", "verb": "b", "begin-offset": 0, "end-offset": 9, "label": "correct"}\n',
        encoding="utf-8",
    )
    with pytest.raises(ParseError):
        load_ged_dataset(str(p))
    p.write_text('{"verb": "b"}\n', encoding="utf-8")
    with pytest.raises(ParseError):
        load_ged_dataset(str(p))


def sample_tree():
    rows = [
        (1, "他", "他", "PRON", "2", "nsubj"),
        (2, "吃", "吃", "VERB", "0", "root"),
        (3, "饭", "饭", "NOUN", "2", "dobj"),
    ]
    return make_tree(rows, sent_id="r1", text="他 吃 饭")


def test_resolve_target_by_exact_span():
    tree = sample_tree()
    assert resolve_target(tree, inst("他 吃 饭", "吃", 2, 3)) == 2


def test_resolve_target_overlapping_span():
    tree = sample_tree()
    # span covers only part of the token boundary convention: begin inside
    assert resolve_target(tree, inst("他 吃 饭", "吃", 2, 3)) == 2


def test_resolve_target_falls_back_to_form():
    tree = sample_tree()
    # offsets point at whitespace; fall back to the first form match
    got = resolve_target(tree, inst("他 吃 饭", "饭", 1, 2))
    assert got == 3


def test_resolve_target_uses_tree_text_when_instance_text_empty():
    tree = sample_tree()
    got = resolve_target(tree, GedInstance(text="", verb="吃", begin=2, end=3, label="correct"))
    assert got == 2


def test_resolve_target_unresolvable():
    tree = sample_tree()
    with pytest.raises(InputError):
        resolve_target(tree, inst("他 吃 饭", "喝", 1, 2))
