"""Clause-structure retrieval around a target verb.

A clause is the local argument structure extracted from a dependency tree
for one verb occurrence: an ordered list of child-side nodes, an ordered
list of ancestor-side nodes, and the focus verb itself.  Each node stands
for one tree edge r(w_h, w_d): the node's own relation to its governor,
the governor's word, and the node's own word.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InputError, InvariantError
from .ingest import DependencyTree, Token

DEFAULT_VERB_POS = frozenset({"VERB", "VV", "VC", "VE"})
SUBJECT_RELS = frozenset({"nsubj", "nsubjpass"})
# "skeleton" nodes carried along with an ancestor: its core arguments
SKELETON_RELS = frozenset({"nsubj", "nsubjpass", "dobj", "obj", "iobj"})


class EdgeCategory(enum.Enum):
    FOCUS_CHILD = "FOCUS>CHILD"
    HEAD_FOCUS = "HEAD>FOCUS"
    CONTEXT_HEAD = "CONTEXT>HEAD"
    HEAD_CONTEXT = "HEAD>CONTEXT"
    CONTEXT_CONTEXT = "CONTEXT>CONTEXT"


@dataclass(frozen=True)
class ClauseNode:
    """One tree edge r(w_h, w_d), owned by the dependent token."""

    token_id: int
    deprel: str
    head_form: str  # governor's word, "" for the sentence root
    dep_form: str  # the node's own word
    head_id: int
    side: str  # "left" | "right" | "focus", by linear position vs the target

    def label(self) -> str:
        return f"{self.deprel}({self.head_form},{self.dep_form})"


@dataclass
class ClauseStructure:
    """Argument structure of one verb occurrence."""

    sent_id: str
    target_id: int
    strategy: int  # which retrieval rule fired (1-4)
    focus: ClauseNode
    v_child: list[ClauseNode]
    v_ancestor: list[ClauseNode]

    @property
    def nodes(self) -> list[ClauseNode]:
        """All clause nodes (focus included), in linear order, deduplicated."""
        seen: dict[int, ClauseNode] = {}
        for node in [self.focus, *self.v_child, *self.v_ancestor]:
            seen.setdefault(node.token_id, node)
        return [seen[tid] for tid in sorted(seen)]

    def node_for(self, token_id: int) -> ClauseNode | None:
        for node in self.nodes:
            if node.token_id == token_id:
                return node
        return None


def is_verb(token: Token, verb_pos: frozenset[str] = DEFAULT_VERB_POS) -> bool:
    """Verb predicate over POS tags; auxiliaries are deliberately outside it."""
    return token.pos in verb_pos


def _word(token: Token | None, use_lemma: bool) -> str:
    if token is None:
        return ""
    if use_lemma and token.lemma:
        return token.lemma
    return token.form


def _make_node(tree: DependencyTree, token: Token, target_id: int, use_lemma: bool) -> ClauseNode:
    gov = tree.governor(token.id)
    if token.id == target_id:
        side = "focus"
    else:
        side = "left" if token.id < target_id else "right"
    return ClauseNode(
        token_id=token.id,
        deprel=token.deprel,
        head_form=_word(gov, use_lemma),
        dep_form=_word(token, use_lemma),
        head_id=token.head,
        side=side,
    )


def retrieve_clause(
    tree: DependencyTree,
    target_id: int,
    *,
    verb_pos: frozenset[str] = DEFAULT_VERB_POS,
    use_lemma: bool = True,
) -> ClauseStructure:
    """Extract the clause structure around one verb occurrence.

    Exactly one of four rules fires, keyed on the target's position in the
    tree:

    1. target is the root: V_child is its children minus conj subtrees
       (coordination starts a separate clause) and V_ancestor is empty;
    2. target is itself a conj dependent with its own subject: V_child is
       all of its children, V_ancestor its governor;
    3. the target's governor has a subject: the governor's argument frame
       is the clause, so V_child is all children of the governor (the
       target among them) and V_ancestor continues upward;
    4. otherwise the frame two levels up is used; if the tree is too
       shallow for that, rule 2's shape applies.

    Child entries carry their own immediate children along; every
    ancestor carries its subject/object dependents ("skeleton" nodes).
    Punctuation is excluded throughout.
    """
    if not tree.has_token(target_id):
        raise InputError(f"{tree.sent_id}: no token with id {target_id}")
    target = tree.token(target_id)
    if not is_verb(target, verb_pos):
        raise InputError(
            f"{tree.sent_id}: token {target_id} ({target.form}/{target.pos}) "
            f"is not a verb under the configured predicate"
        )

    def children(tok: Token) -> list[Token]:
        return tree.children(tok.id)

    def has_subject(tok: Token) -> bool:
        return any(c.deprel in SUBJECT_RELS for c in children(tok))

    gov = tree.governor(target_id)
    skip_conj = False
    if target.head == 0:
        strategy, focal = 1, target
        skip_conj = True
    elif target.deprel == "conj" and has_subject(target):
        strategy, focal = 2, target
    elif gov is not None and has_subject(gov):
        strategy, focal = 3, gov
    else:
        anc02 = tree.governor(gov.id) if gov is not None else None
        if anc02 is None:
            strategy, focal = 4, target  # too shallow: fall back to rule 2's shape
        else:
            strategy, focal = 4, anc02

    # tokens on the governor chain from target up to the focal head must
    # survive filtering, or the clause would fall apart
    protected = {target_id}
    cur = gov
    while cur is not None and cur.id != focal.id:
        protected.add(cur.id)
        cur = tree.governor(cur.id)

    child_tokens: list[Token] = []
    used: set[int] = set()
    for c in children(focal):
        if c.id not in protected and (c.deprel == "punct" or (skip_conj and c.deprel == "conj")):
            continue
        child_tokens.append(c)
        used.add(c.id)
        for gc in children(c):
            if gc.id in used or (gc.deprel == "punct" and gc.id not in protected):
                continue
            child_tokens.append(gc)
            used.add(gc.id)

    anchors: list[Token] = []
    if focal.id != target_id:
        anchors.append(focal)
    focal_gov = tree.governor(focal.id)
    if focal_gov is not None:
        anchors.append(focal_gov)

    ancestor_tokens: list[Token] = []
    used.update(a.id for a in anchors)
    used.add(target_id)
    for anchor in anchors:
        ancestor_tokens.append(anchor)
        for c in children(anchor):
            if c.deprel in SKELETON_RELS and c.id not in used:
                ancestor_tokens.append(c)
                used.add(c.id)

    child_tokens.sort(key=lambda t: t.id)
    ancestor_tokens.sort(key=lambda t: t.id)

    clause = ClauseStructure(
        sent_id=tree.sent_id,
        target_id=target_id,
        strategy=strategy,
        focus=_make_node(tree, target, target_id, use_lemma),
        v_child=[_make_node(tree, t, target_id, use_lemma) for t in child_tokens],
        v_ancestor=[_make_node(tree, t, target_id, use_lemma) for t in ancestor_tokens],
    )
    _check_connected(clause, tree)
    return clause


def _check_connected(clause: ClauseStructure, tree: DependencyTree) -> None:
    """Clause nodes must form a connected subgraph of the tree around the target."""
    ids = {n.token_id for n in clause.nodes}
    if clause.target_id not in ids:
        raise InvariantError(f"{clause.sent_id}: clause lost its own target")
    reached = {clause.target_id}
    frontier = [clause.target_id]
    while frontier:
        nxt = []
        for node in clause.nodes:
            if node.token_id in reached:
                continue
            if node.head_id in reached:
                nxt.append(node.token_id)
        for tid in list(reached):
            head = tree.token(tid).head
            if head in ids and head not in reached:
                nxt.append(head)
        if not nxt:
            break
        reached.update(nxt)
        frontier = nxt
    if reached != ids:
        missing = sorted(ids - reached)
        raise InvariantError(f"{clause.sent_id}: clause nodes {missing} are disconnected from the target")


def classify_edge(clause: ClauseStructure, node: ClauseNode) -> EdgeCategory:
    """Place a clause node in one of the five positional categories.

    Children of the focus (transitively, within the clause) are
    FOCUS>CHILD; the focus's immediate governor is HEAD>FOCUS; nodes
    above that governor are CONTEXT>HEAD; the governor's other dependents
    are HEAD>CONTEXT; anything else is CONTEXT>CONTEXT.
    """
    ids = {n.token_id: n for n in clause.nodes}
    if node.token_id not in ids:
        raise InputError(f"node {node.token_id} is not part of this clause")
    if node.token_id == clause.target_id:
        raise InputError("the focus node itself has no edge category")

    # descendant of the focus via heads that stay inside the clause
    cur = node
    while cur.head_id in ids:
        if cur.head_id == clause.target_id:
            return EdgeCategory.FOCUS_CHILD
        cur = ids[cur.head_id]

    target_head = clause.focus.head_id
    if node.token_id == target_head:
        return EdgeCategory.HEAD_FOCUS
    if target_head in ids:
        # ancestors of the target's governor, via heads inside the clause
        cur = ids[target_head]
        while cur.head_id in ids:
            if cur.head_id == node.token_id:
                return EdgeCategory.CONTEXT_HEAD
            cur = ids[cur.head_id]
    if node.head_id == target_head and target_head != 0:
        return EdgeCategory.HEAD_CONTEXT
    return EdgeCategory.CONTEXT_CONTEXT
