"""Shared builders for trees, clause structures, and fixture paths."""

from pathlib import Path

import pytest

from collodb.clause import ClauseNode, ClauseStructure
from collodb.ingest import parse_conllu

FIXTURES = Path(__file__).parent / "fixtures"


def conllu_text(sent_id, rows, text=None):
    """rows: (id, form, lemma, pos, head, deprel)."""
    lines = [f"# sent_id = {sent_id}"]
    if text is not None:
        lines.append(f"# text = {text}")
    for i, form, lemma, pos, head, deprel in rows:
        lines.append(f"{i}\t{form}\t{lemma}\t{pos}\t_\t_\t{head}\t{deprel}\t_\t_")
    return "\n".join(lines) + "\n"


def make_tree(rows, sent_id="s1", text=None):
    return parse_conllu(conllu_text(sent_id, rows, text), is_text=True)[0]


def node(token_id, deprel, head_form, dep_form, head_id, side):
    return ClauseNode(
        token_id=token_id,
        deprel=deprel,
        head_form=head_form,
        dep_form=dep_form,
        head_id=head_id,
        side=side,
    )


def make_clause(sent_id, target_id, focus_deprel, children, ancestors=(), target_word="v"):
    """Build a ClauseStructure directly from compact node specs.

    children/ancestors: (token_id, deprel, head_form, dep_form, head_id).
    Side is derived from the token position relative to the target.
    """
    focus = node(target_id, focus_deprel, "", target_word, 0, "focus")
    v_child = [
        node(tid, rel, hf, df, hid, "left" if tid < target_id else "right")
        for tid, rel, hf, df, hid in children
    ]
    v_ancestor = [
        node(tid, rel, hf, df, hid, "left" if tid < target_id else "right")
        for tid, rel, hf, df, hid in ancestors
    ]
    return ClauseStructure(
        sent_id=sent_id,
        target_id=target_id,
        strategy=1,
        focus=focus,
        v_child=v_child,
        v_ancestor=v_ancestor,
    )


@pytest.fixture(scope="session")
def fixture_corpus():
    return parse_conllu(str(FIXTURES / "corpus.conllu"))
