"""Statistical analysis of a collostruction database.

Covers: continuous power-law fitting with a likelihood-ratio test against
an exponential alternative, per-relation slot statistics, within-slot
semantic coherence, and characteristic action sequences read off a
sememe lexicon.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .colgen import FOCUS, Slot
from .db import Database
from .errors import InputError, ValidationError
from .ingest import EmbeddingStore, cosine

log = logging.getLogger(__name__)

MIN_TAIL = 10  # smallest usable tail for a power-law fit

# relations that link an action-bearing slot to the focus verb
ACTION_RELATIONS = frozenset(
    {"xcomp", "ccomp", "nsubj", "dobj", "compound:vc", "nmod:prep", "conj"}
)


@dataclass
class PowerLawReport:
    x_min: float
    exponent: float
    n_tail: int
    ks: float
    R: float | None = None  # normalized log-likelihood ratio, power law vs exponential
    p: float | None = None  # two-sided significance of R


def _tail(samples: np.ndarray, x_min: float) -> np.ndarray:
    return samples[samples >= x_min]


def _mle_exponent(tail: np.ndarray, x_min: float) -> float:
    log_spread = float(np.sum(np.log(tail / x_min)))
    if log_spread <= 0.0:
        raise ValidationError("samples above x_min have zero log-spread; cannot fit")
    return 1.0 + len(tail) / log_spread


def _ks_distance(tail: np.ndarray, x_min: float, exponent: float) -> float:
    xs = np.sort(tail)
    n = len(xs)
    theoretical = 1.0 - np.power(x_min / xs, exponent - 1.0)
    lo = np.arange(n) / n
    hi = np.arange(1, n + 1) / n
    return float(np.max(np.maximum(np.abs(theoretical - lo), np.abs(theoretical - hi))))


def fit_power_law(samples: Sequence[float], x_min: float | None = None) -> PowerLawReport:
    """Fit a continuous power law by maximum likelihood.

    With x_min given, the exponent is fitted on the tail at or above it.
    Otherwise x_min is chosen among observed values to minimize the KS
    distance between the tail and the fitted distribution.  The report
    includes the likelihood-ratio comparison against an exponential fit
    of the same tail.
    """
    data = np.asarray(list(samples), dtype=np.float64)
    if data.size == 0:
        raise ValidationError("empty sample")
    if np.any(~np.isfinite(data)) or np.any(data <= 0.0):
        raise ValidationError("samples must be positive finite numbers")

    if x_min is not None:
        if x_min > data.max():
            raise ValidationError(f"x_min {x_min} exceeds the largest sample")
        tail = _tail(data, x_min)
        if tail.size < MIN_TAIL:
            raise ValidationError(
                f"only {tail.size} samples at or above x_min; need at least {MIN_TAIL}"
            )
        exponent = _mle_exponent(tail, x_min)
        ks = _ks_distance(tail, x_min, exponent)
        report = PowerLawReport(x_min=float(x_min), exponent=exponent, n_tail=int(tail.size), ks=ks)
    else:
        best: PowerLawReport | None = None
        for candidate in np.unique(data):
            tail = _tail(data, float(candidate))
            if tail.size < MIN_TAIL:
                continue
            try:
                exponent = _mle_exponent(tail, float(candidate))
            except ValidationError:
                continue
            ks = _ks_distance(tail, float(candidate), exponent)
            if best is None or ks < best.ks:
                best = PowerLawReport(
                    x_min=float(candidate), exponent=exponent, n_tail=int(tail.size), ks=ks
                )
        if best is None:
            raise ValidationError(
                f"no x_min candidate leaves at least {MIN_TAIL} fittable samples"
            )
        report = best

    report.R, report.p = compare_power_exponential(data, report.x_min)
    return report


def compare_power_exponential(samples: Sequence[float], x_min: float) -> tuple[float, float]:
    """Normalized log-likelihood ratio R of power law vs exponential, with p-value.

    Both models are fitted by maximum likelihood to the tail at or above
    x_min (the exponential is shifted to start there).  R is the summed
    pointwise log-likelihood difference divided by its standard error;
    positive favors the power law.  p is the two-sided normal tail
    probability of |R|.  R is invariant under rescaling of the samples.
    """
    data = np.asarray(list(samples), dtype=np.float64)
    tail = _tail(data, x_min)
    n = tail.size
    if n < 2:
        raise ValidationError("need at least 2 tail samples to compare models")
    exponent = _mle_exponent(tail, x_min)
    mean_excess = float(np.mean(tail - x_min))
    if mean_excess <= 0.0:
        raise ValidationError("all tail samples equal x_min; exponential fit undefined")
    lam = 1.0 / mean_excess

    ll_power = np.log(exponent - 1.0) - np.log(x_min) - exponent * np.log(tail / x_min)
    ll_exp = np.log(lam) - lam * (tail - x_min)
    diffs = ll_power - ll_exp
    raw = float(np.sum(diffs))
    sigma = float(np.sqrt(np.mean((diffs - diffs.mean()) ** 2)))
    if sigma == 0.0:
        raise ValidationError("degenerate likelihood comparison (identical pointwise ratios)")
    r_norm = raw / (sigma * math.sqrt(n))
    p = math.erfc(abs(r_norm) / math.sqrt(2.0))
    return r_norm, p


def collostruction_percentages(db: Database, verb: str | None = None) -> list[float]:
    """p_col of each collostruction, as a percentage of the verb's instances."""
    verbs = [verb] if verb is not None else sorted(db.verbs)
    out = []
    for v in verbs:
        if v not in db.verbs:
            raise InputError(f"verb {v!r} not in database")
        out.extend(c.p_col * 100.0 for c in db.verbs[v].collostructions)
    return out


def sense_percentages(db: Database, verb: str | None = None) -> list[float]:
    """Instance share of each sense cluster, as a percentage per verb."""
    verbs = [verb] if verb is not None else sorted(db.verbs)
    out = []
    for v in verbs:
        if v not in db.verbs:
            raise InputError(f"verb {v!r} not in database")
        mass: dict[int, float] = defaultdict(float)
        for colo in db.verbs[v].collostructions:
            mass[colo.sense_cluster_id] += colo.p_col * 100.0
        out.extend(mass[k] for k in sorted(mass))
    return out


@dataclass
class SlotStats:
    side: str
    deprel: str
    occurrence_fraction: float  # share of collostructions containing the slot
    mean_p_slot: float  # mean within-cluster attestation rate where present
    n_collostructions: int


def slot_statistics(db: Database) -> list[SlotStats]:
    """Distribution of slot relations across all collostructions."""
    colos = db.all_collostructions()
    if not colos:
        raise InputError("empty database")
    present: Counter = Counter()
    p_sums: dict[tuple[str, str], float] = defaultdict(float)
    for colo in colos:
        seen: set[tuple[str, str]] = set()
        for slot in colo.slots:
            if slot.key.side == FOCUS:
                continue
            gid = (slot.key.side, slot.key.deprel)
            if gid in seen:
                continue  # a repeated relation counts once per collostruction
            seen.add(gid)
            present[gid] += 1
            p_sums[gid] += slot.support / colo.support
    rows = [
        SlotStats(
            side=side,
            deprel=deprel,
            occurrence_fraction=present[(side, deprel)] / len(colos),
            mean_p_slot=p_sums[(side, deprel)] / present[(side, deprel)],
            n_collostructions=present[(side, deprel)],
        )
        for (side, deprel) in present
    ]
    rows.sort(key=lambda r: (-r.occurrence_fraction, r.side, r.deprel))
    return rows


def within_slot_similarity(
    slot: Slot,
    store: EmbeddingStore,
    literal: bool = False,
) -> float:
    """Semantic coherence of a slot: mean pairwise cosine of its collexemes.

    Collexemes without an embedding are skipped with a warning.  The
    default averages over all N(N-1)/2 pairs; `literal` divides the pair
    sum by N-1 instead (the printed form, which can exceed 1).
    """
    words = [c.word for c in slot.collexemes]
    vectors = []
    for w in words:
        v = store.get(w)
        if v is None:
            log.warning("no embedding for collexeme %r; skipped", w)
            continue
        vectors.append(v)
    n = len(vectors)
    if n < 2:
        raise ValidationError(f"slot {slot.key}: fewer than 2 embeddable collexemes")
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            total += cosine(vectors[i], vectors[j])
    if literal:
        return total / (n - 1)
    return total / (n * (n - 1) / 2)


class SememeLexicon:
    """word -> sememes mapping plus an optional sememe hypernym hierarchy."""

    def __init__(self, senses: Mapping[str, Sequence[str]], hypernyms: Mapping[str, str] | None = None):
        self._senses = {w: list(ss) for w, ss in senses.items()}
        self._hypernyms = dict(hypernyms or {})
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        for start in self._hypernyms:
            seen = {start}
            cur = start
            while cur in self._hypernyms:
                cur = self._hypernyms[cur]
                if cur in seen:
                    raise ValidationError(f"hypernym cycle through {cur!r}")
                seen.add(cur)

    def sememes(self, word: str) -> list[str]:
        return list(self._senses.get(word, []))

    def expand(self, word: str) -> list[str]:
        """Sememes of a word plus all their hypernym ancestors, in order."""
        out: list[str] = []
        seen: set[str] = set()
        for s in self._senses.get(word, []):
            cur: str | None = s
            while cur is not None and cur not in seen:
                seen.add(cur)
                out.append(cur)
                cur = self._hypernyms.get(cur)
        return out

    @staticmethod
    def from_files(sense_path: str, hypernym_path: str | None = None) -> "SememeLexicon":
        senses: dict[str, list[str]] = {}
        with open(sense_path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                word, sep, rest = line.partition("\t")
                if not sep:
                    raise ValidationError(f"{sense_path}:{line_no}: expected '<word>\\t<sememes>'")
                senses[word] = [s.strip() for s in rest.split(",") if s.strip()]
        hypernyms: dict[str, str] = {}
        if hypernym_path is not None:
            with open(hypernym_path, encoding="utf-8") as fh:
                for line_no, raw in enumerate(fh, start=1):
                    line = raw.strip()
                    if not line or line.startswith("#"):
                        continue
                    child, sep, parent = line.partition("\t")
                    if not sep or not parent.strip():
                        raise ValidationError(
                            f"{hypernym_path}:{line_no}: expected '<sememe>\\t<parent>'"
                        )
                    hypernyms[child] = parent.strip()
        return SememeLexicon(senses, hypernyms)


def action_sequences(
    db: Database,
    verb: str,
    lexicon: SememeLexicon,
    relations: Iterable[str] = ACTION_RELATIONS,
    top_k: int = 5,
) -> dict[str, list[tuple[str, int]]]:
    """Most frequent sememes in slots directly linked to the focus verb.

    Slots are grouped by their link to the focus: "CHILD: <rel>" for
    dependents of the focus, "ANCESTOR: <rel>" for its governor (the
    relation then being the focus's own).  Collexemes expand to their
    sememes plus hypernyms, weighted by attestation count; the top_k
    sememes per group are returned.
    """
    if verb not in db.verbs:
        raise InputError(f"verb {verb!r} not in database")
    rels = {r.lower() for r in relations}
    counts: dict[str, Counter] = defaultdict(Counter)
    for colo in db.verbs[verb].collostructions:
        slots = {s.key: s for s in colo.slots}
        focus_key = colo.slots[colo.focus_index].key
        for edge in colo.edges:
            if edge.deprel not in rels:
                continue
            if edge.head == focus_key and edge.dependent != focus_key:
                label, slot = f"CHILD: {edge.deprel}", slots[edge.dependent]
            elif edge.dependent == focus_key and edge.head != focus_key:
                label, slot = f"ANCESTOR: {edge.deprel}", slots[edge.head]
            else:
                continue
            for collexeme in slot.collexemes:
                for sememe in lexicon.expand(collexeme.word):
                    counts[label][sememe] += collexeme.count
    return {
        label: sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
        for label, counter in sorted(counts.items())
    }
