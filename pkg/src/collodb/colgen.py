"""Collostruction generation from clusters of similar clause structures.

A collostruction is an ordered sequence of slots around one focus verb,
with collexemes (attested words plus association strengths) in each slot
and dependency edges between slots.  Generation works on one cluster of
clause structures at a time: clause nodes are mapped to slot keys, linear
adjacency between keys is accumulated into a weighted graph, candidate
slot orders are read off the graph as simple paths, scored, and the best
surviving path becomes the collostruction skeleton.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .clause import ClauseStructure
from .errors import ConfigError, InvariantError, ValidationError

PATH_CAP = 10_000  # exhaustive enumeration stops here

FOCUS = "focus"
CHILD = "child"
ANCESTOR = "ancestor"


@dataclass(frozen=True, order=True)
class SlotKey:
    """Identity of a slot: its side, relation label, and repeat ordinal.

    The ordinal disambiguates repeated relations on one side, counted
    outward from the focus (1 = nearest).  Keys order lexicographically
    by (side, deprel, ordinal); that order is the global tie-breaker.
    """

    side: str
    deprel: str
    ordinal: int

    def __str__(self) -> str:
        return f"{self.side}:{self.deprel}:{self.ordinal}"

    @staticmethod
    def parse(text: str) -> "SlotKey":
        # deprels may themselves contain colons (compound:vc), so split
        # the side off the left and the ordinal off the right
        try:
            side, rest = text.split(":", 1)
            deprel, ordinal = rest.rsplit(":", 1)
            key = SlotKey(side, deprel, int(ordinal))
        except ValueError:
            raise ValidationError(f"bad slot key {text!r}") from None
        if side not in (FOCUS, CHILD, ANCESTOR) or key.ordinal < 1:
            raise ValidationError(f"bad slot key {text!r}")
        return key


@dataclass(frozen=True)
class Collexeme:
    word: str
    count: int
    p_lex: float


@dataclass
class Slot:
    key: SlotKey
    collexemes: list[Collexeme]
    head_words: list[str] = field(default_factory=list)  # attested governor words

    @property
    def support(self) -> int:
        """Number of cluster clauses in which this slot occurs."""
        return sum(c.count for c in self.collexemes)


@dataclass(frozen=True)
class Edge:
    """Directed dependency between slots: dependent -> head, labeled r."""

    dependent: SlotKey
    head: SlotKey
    deprel: str
    p_slot: float


@dataclass
class Collostruction:
    verb: str
    sense_cluster_id: int
    stage: str  # "synsem" | "syntactic"
    p_col: float
    support: int  # cluster size
    slots: list[Slot]  # in linear slot order
    edges: list[Edge]
    example_sent_ids: list[str]
    score: float = 0.0
    colo_id: int = -1  # database-wide id, assigned when stored

    @property
    def focus_index(self) -> int:
        for i, slot in enumerate(self.slots):
            if slot.key.side == FOCUS:
                return i
        raise InvariantError("collostruction has no focus slot")

    @property
    def core_deprel(self) -> str:
        return self.slots[self.focus_index].key.deprel


@dataclass
class AdjacencyGraph:
    nodes: set[SlotKey] = field(default_factory=set)
    edges: dict[tuple[SlotKey, SlotKey], int] = field(default_factory=dict)
    starts: Counter = field(default_factory=Counter)


def _dominant_focus_deprel(cluster: Sequence[ClauseStructure]) -> str:
    """One focus key per cluster: the most frequent target deprel wins ties alphabetically."""
    counts = Counter(c.focus.deprel for c in cluster)
    return min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]


def clause_slot_keys(clause: ClauseStructure, focus_deprel: str) -> dict[int, SlotKey]:
    """Map each clause node (by token id) to its slot key.

    Repeated relations on a side get ordinals counted outward from the
    focus position; at equal distance the left occurrence counts first.
    """
    child_ids = {n.token_id for n in clause.v_child}
    keys: dict[int, SlotKey] = {clause.target_id: SlotKey(FOCUS, focus_deprel, 1)}
    groups: dict[tuple[str, str], list] = defaultdict(list)
    for node in clause.nodes:
        if node.token_id == clause.target_id:
            continue
        side = CHILD if node.token_id in child_ids else ANCESTOR
        groups[(side, node.deprel)].append(node)
    for (side, deprel), nodes in groups.items():
        nodes.sort(key=lambda n: (abs(n.token_id - clause.target_id), n.token_id))
        for ordinal, node in enumerate(nodes, start=1):
            keys[node.token_id] = SlotKey(side, deprel, ordinal)
    return keys


def build_adjacency_graph(cluster: Sequence[ClauseStructure]) -> AdjacencyGraph:
    """Accumulate linear adjacency between slot keys over all cluster clauses."""
    graph = AdjacencyGraph()
    focus_deprel = _dominant_focus_deprel(cluster)
    for clause in cluster:
        keys = clause_slot_keys(clause, focus_deprel)
        ordered = [keys[n.token_id] for n in clause.nodes]
        graph.nodes.update(ordered)
        if ordered:
            graph.starts[ordered[0]] += 1
        for a, b in zip(ordered, ordered[1:]):
            graph.edges[(a, b)] = graph.edges.get((a, b), 0) + 1
    return graph


def enumerate_paths(
    graph: AdjacencyGraph, exhaustive: bool = False, cap: int = PATH_CAP
) -> list[list[SlotKey]]:
    """Candidate slot orders: maximal simple paths from each distinct start node.

    Default mode walks greedily, always following the heaviest edge to an
    unvisited node (ties: lexicographically smallest key).  Exhaustive
    mode backtracks over every maximal simple path, capped at `cap`.
    """
    out_edges: dict[SlotKey, list[tuple[SlotKey, int]]] = defaultdict(list)
    for (a, b), w in graph.edges.items():
        out_edges[a].append((b, w))
    for a in out_edges:
        # heaviest first, then lexicographic key
        out_edges[a].sort(key=lambda bw: (-bw[1], bw[0]))

    paths: list[list[SlotKey]] = []
    for start in sorted(graph.starts):
        if exhaustive:
            stack = [[start]]
            while stack and len(paths) < cap:
                path = stack.pop()
                nxt = [b for b, _ in out_edges.get(path[-1], []) if b not in path]
                if not nxt:
                    paths.append(path)
                    continue
                for b in reversed(nxt):
                    stack.append(path + [b])
        else:
            path = [start]
            visited = {start}
            while True:
                nxt = next(
                    (b for b, _ in out_edges.get(path[-1], []) if b not in visited), None
                )
                if nxt is None:
                    break
                path.append(nxt)
                visited.add(nxt)
            paths.append(path)
    # distinct paths only; keep first occurrence order
    seen: set[tuple] = set()
    unique = []
    for p in paths:
        t = tuple(p)
        if t not in seen:
            seen.add(t)
            unique.append(p)
    return unique


def _dependency_pairs(
    cluster: Sequence[ClauseStructure], focus_deprel: str
) -> dict[tuple[SlotKey, SlotKey], str]:
    """Directed dependent -> head relations between slot keys, over all clauses."""
    pairs: dict[tuple[SlotKey, SlotKey], str] = {}
    for clause in cluster:
        keys = clause_slot_keys(clause, focus_deprel)
        for node in clause.nodes:
            if node.head_id in keys and node.token_id in keys:
                dep_key = keys[node.token_id]
                head_key = keys[node.head_id]
                pairs.setdefault((dep_key, head_key), node.deprel)
    return pairs


def filter_paths(
    paths: Sequence[Sequence[SlotKey]], cluster: Sequence[ClauseStructure]
) -> list[list[SlotKey]]:
    """Drop structurally inadmissible paths.

    A path must contain the focus slot; when every cluster clause has
    ancestor-side material, it must also retain at least one ancestor
    slot.  A slot attested on only one side of the focus across the
    whole cluster must stay on that side of the focus in the path.
    """
    focus_deprel = _dominant_focus_deprel(cluster)
    need_ancestor = all(c.v_ancestor for c in cluster)
    side_evidence: dict[SlotKey, set[str]] = defaultdict(set)
    for clause in cluster:
        keys = clause_slot_keys(clause, focus_deprel)
        for node in clause.nodes:
            if node.side in ("left", "right"):
                side_evidence[keys[node.token_id]].add(node.side)

    kept: list[list[SlotKey]] = []
    for path in paths:
        focus_positions = [i for i, k in enumerate(path) if k.side == FOCUS]
        if len(focus_positions) != 1:
            continue
        if need_ancestor and not any(k.side == ANCESTOR for k in path):
            continue
        fpos = focus_positions[0]
        ok = True
        for i, key in enumerate(path):
            if i == fpos:
                continue
            evidence = side_evidence.get(key, set())
            if evidence == {"left"} and i > fpos:
                ok = False
                break
            if evidence == {"right"} and i < fpos:
                ok = False
                break
        if ok:
            kept.append(list(path))
    return kept


def score_path(
    path: Sequence[SlotKey], graph: AdjacencyGraph, cluster: Sequence[ClauseStructure]
) -> float:
    """Score = (Coverage + Average) / (1 + NumDangle).

    A path node dangles when it has no dependency relation with any other
    node on the path.  Coverage is the non-dangling share of the path;
    Average is the mean adjacency weight over consecutive path pairs
    whose two ends both survive (0 with fewer than two survivors).
    """
    focus_deprel = _dominant_focus_deprel(cluster)
    deps = _dependency_pairs(cluster, focus_deprel)
    linked: set[SlotKey] = set()
    path_set = set(path)
    for (dep, head) in deps:
        if dep in path_set and head in path_set and dep != head:
            linked.add(dep)
            linked.add(head)
    dangling = [k for k in path if k not in linked]
    coverage = (len(path) - len(dangling)) / len(path) if path else 0.0
    weights = [
        graph.edges.get((a, b), 0)
        for a, b in zip(path, path[1:])
        if a in linked and b in linked
    ]
    average = sum(weights) / len(weights) if weights else 0.0
    return (coverage + average) / (1 + len(dangling))


def collexeme_strength(
    count_in_slot: int,
    cluster_size: int,
    word_corpus_freq: float | None = None,
    mode: str = "conditional",
) -> float:
    """Association strength of a collexeme within its slot.

    The default is the conditional attestation rate count/cluster_size.
    Mode "literal" multiplies in the word's corpus prior, i.e. the printed
    product form joint x prior / p(collostruction) with both probabilities
    estimated from counts (the corpus-size terms cancel).
    """
    if cluster_size <= 0:
        raise ValidationError(f"cluster_size must be positive, got {cluster_size}")
    if count_in_slot < 0:
        raise ValidationError(f"count_in_slot must be >= 0, got {count_in_slot}")
    if count_in_slot > cluster_size:
        raise ValidationError(
            f"collexeme count {count_in_slot} exceeds cluster size {cluster_size}"
        )
    if count_in_slot == 0:
        return 0.0
    conditional = count_in_slot / cluster_size
    if mode == "conditional":
        return conditional
    if mode == "literal":
        if word_corpus_freq is None:
            raise ConfigError("literal mode needs the word's corpus frequency")
        if not 0.0 < word_corpus_freq <= 1.0:
            raise ValidationError(f"word_corpus_freq must be in (0, 1], got {word_corpus_freq}")
        return conditional * word_corpus_freq
    raise ConfigError(f"unknown collexeme strength mode {mode!r}")


def _edges_cross(order: Mapping[SlotKey, int], e1: Edge, e2: Edge) -> bool:
    a1, b1 = sorted((order[e1.dependent], order[e1.head]))
    a2, b2 = sorted((order[e2.dependent], order[e2.head]))
    return a1 < a2 < b1 < b2 or a2 < a1 < b2 < b1


def generate_collostruction(
    cluster: Sequence[ClauseStructure],
    verb: str,
    total_verb_instances: int,
    *,
    sense_cluster_id: int = 0,
    stage: str = "synsem",
    strength_mode: str = "conditional",
    word_corpus_freqs: Mapping[str, float] | None = None,
    exhaustive_paths: bool = False,
) -> Collostruction | None:
    """Generate one collostruction from a cluster of clause structures.

    Returns None when no admissible path survives filtering.  The result
    is projective: if dependency edges cross in the chosen slot order,
    offending slots are pruned, rarest first, and any slot left without a
    dependency connection to the focus goes with them.
    """
    if not cluster:
        raise ValidationError("cannot generate from an empty cluster")
    size = len(cluster)
    if total_verb_instances < size:
        raise ValidationError(
            f"total_verb_instances {total_verb_instances} smaller than cluster size {size}"
        )
    graph = build_adjacency_graph(cluster)
    paths = filter_paths(enumerate_paths(graph, exhaustive=exhaustive_paths), cluster)
    if not paths:
        return None
    scores = {tuple(p): score_path(p, graph, cluster) for p in paths}
    best = min(paths, key=lambda p: (-scores[tuple(p)], -len(p), tuple(p)))
    best_score = scores[tuple(best)]

    focus_deprel = _dominant_focus_deprel(cluster)
    occupants: dict[SlotKey, Counter] = defaultdict(Counter)  # key -> word counts
    head_words: dict[SlotKey, set[str]] = defaultdict(set)
    slot_support: Counter = Counter()
    for clause in cluster:
        keys = clause_slot_keys(clause, focus_deprel)
        for node in clause.nodes:
            key = keys[node.token_id]
            if key not in best:
                continue
            occupants[key][node.dep_form] += 1
            head_words[key].add(node.head_form)
            slot_support[key] += 1

    deps = _dependency_pairs(cluster, focus_deprel)
    path_set = set(best)
    edges = [
        Edge(
            dependent=dep,
            head=head,
            deprel=rel,
            p_slot=slot_support[dep] / size,
        )
        for (dep, head), rel in sorted(deps.items(), key=lambda kv: (kv[0][0], kv[0][1]))
        if dep in path_set and head in path_set
    ]

    slots: list[Slot] = []
    for key in best:
        if key.side == FOCUS:
            slots.append(
                Slot(
                    key=key,
                    collexemes=[Collexeme(verb, size, 1.0)],
                    head_words=sorted(head_words.get(key, set())),
                )
            )
            continue
        counter = occupants.get(key, Counter())
        collexemes = [
            Collexeme(
                word,
                count,
                collexeme_strength(
                    count,
                    size,
                    (word_corpus_freqs or {}).get(word) if strength_mode == "literal" else None,
                    strength_mode,
                ),
            )
            for word, count in counter.items()
        ]
        collexemes.sort(key=lambda c: (-c.p_lex, c.word))
        slots.append(Slot(key=key, collexemes=collexemes, head_words=sorted(head_words.get(key, set()))))

    colo = Collostruction(
        verb=verb,
        sense_cluster_id=sense_cluster_id,
        stage=stage,
        p_col=size / total_verb_instances,
        support=size,
        slots=slots,
        edges=edges,
        example_sent_ids=sorted({c.sent_id for c in cluster}),
        score=best_score,
    )
    _enforce_projectivity(colo)
    _prune_unreachable(colo)
    validate_collostruction(colo)
    return colo


def _enforce_projectivity(colo: Collostruction) -> None:
    """Prune slots until no two dependency edges cross in slot order."""
    while True:
        order = {s.key: i for i, s in enumerate(colo.slots)}
        crossing: set[SlotKey] = set()
        for i, e1 in enumerate(colo.edges):
            for e2 in colo.edges[i + 1 :]:
                if _edges_cross(order, e1, e2):
                    crossing.update((e1.dependent, e1.head, e2.dependent, e2.head))
        crossing.discard(colo.slots[colo.focus_index].key)
        if not crossing:
            return
        support = {s.key: s.support for s in colo.slots}
        victim = min(crossing, key=lambda k: (support[k], -order[k]))
        colo.slots = [s for s in colo.slots if s.key != victim]
        colo.edges = [e for e in colo.edges if victim not in (e.dependent, e.head)]


def _prune_unreachable(colo: Collostruction) -> None:
    """Keep only slots connected to the focus through dependency edges."""
    focus_key = colo.slots[colo.focus_index].key
    adjacency: dict[SlotKey, set[SlotKey]] = defaultdict(set)
    for e in colo.edges:
        adjacency[e.dependent].add(e.head)
        adjacency[e.head].add(e.dependent)
    reached = {focus_key}
    frontier = [focus_key]
    while frontier:
        nxt = []
        for key in frontier:
            for other in adjacency.get(key, ()):
                if other not in reached:
                    reached.add(other)
                    nxt.append(other)
        frontier = nxt
    colo.slots = [s for s in colo.slots if s.key in reached]
    colo.edges = [e for e in colo.edges if e.dependent in reached and e.head in reached]


def validate_collostruction(colo: Collostruction) -> None:
    """Structural sanity of one collostruction; raises InvariantError."""
    keys = [s.key for s in colo.slots]
    if len(set(keys)) != len(keys):
        raise InvariantError("duplicate slot keys")
    focus_slots = [s for s in colo.slots if s.key.side == FOCUS]
    if len(focus_slots) != 1:
        raise InvariantError(f"expected exactly 1 focus slot, found {len(focus_slots)}")
    focus = focus_slots[0]
    if len(focus.collexemes) != 1 or focus.collexemes[0].p_lex != 1.0:
        raise InvariantError("focus slot must hold exactly the verb at strength 1.0")
    if focus.collexemes[0].word != colo.verb:
        raise InvariantError("focus slot word differs from the collostruction verb")
    if not 0.0 < colo.p_col <= 1.0:
        raise InvariantError(f"p_col out of range: {colo.p_col}")
    if colo.support < 1:
        raise InvariantError(f"support must be >= 1, got {colo.support}")
    key_set = set(keys)
    order = {k: i for i, k in enumerate(keys)}
    for slot in colo.slots:
        if slot.key.side != FOCUS:
            if not slot.collexemes:
                raise InvariantError(f"slot {slot.key} has no collexemes")
            for c in slot.collexemes:
                if not 0.0 < c.p_lex <= 1.0:
                    raise InvariantError(f"p_lex out of range for {c.word!r}: {c.p_lex}")
                if not 1 <= c.count <= colo.support:
                    raise InvariantError(f"bad collexeme count for {c.word!r}: {c.count}")
    for e in colo.edges:
        if e.dependent not in key_set or e.head not in key_set:
            raise InvariantError(f"edge {e} references a missing slot")
        if not 0.0 < e.p_slot <= 1.0:
            raise InvariantError(f"p_slot out of range: {e.p_slot}")
    for i, e1 in enumerate(colo.edges):
        for e2 in colo.edges[i + 1 :]:
            if _edges_cross(order, e1, e2):
                raise InvariantError(f"crossing edges: {e1} x {e2}")
    # reachability
    adjacency: dict[SlotKey, set[SlotKey]] = defaultdict(set)
    for e in colo.edges:
        adjacency[e.dependent].add(e.head)
        adjacency[e.head].add(e.dependent)
    reached = {focus.key}
    frontier = [focus.key]
    while frontier:
        nxt = []
        for key in frontier:
            for other in adjacency.get(key, ()):
                if other not in reached:
                    reached.add(other)
                    nxt.append(other)
        frontier = nxt
    if reached != key_set:
        raise InvariantError(f"slots unreachable from focus: {sorted(map(str, key_set - reached))}")
