"""Dependency parser backends.

The default backend is a deterministic rule parser: closed-class lexicons,
suffix heuristics and a fixed attachment order.  It is not a treebank-grade
parser and does not try to be; its contract is that every emitted tree is
structurally valid (contiguous ids, one root, connected, acyclic) so the
output always survives strict downstream validation.  A spacy-backed parser
can be selected for real syntax when that ecosystem is installed.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from .errors import ConfigError, ModelError

_PUNCT_CHARS = set(string.punctuation)

_DETS = {
    "the", "a", "an", "this", "that", "these", "those",
    "my", "your", "his", "her", "its", "our", "their", "some", "every", "each", "no",
}
_PRONOUNS = {
    "i", "you", "he", "she", "it", "we", "they",
    "me", "him", "us", "them", "who", "whom", "what", "someone", "everyone",
}
_AUXES = {
    "is", "are", "was", "were", "be", "been", "being", "am",
    "do", "does", "did", "has", "have", "had",
    "will", "would", "can", "could", "may", "might", "must", "shall", "should",
}
_ADPS = {
    "of", "in", "on", "at", "to", "with", "from", "by", "for", "about",
    "into", "over", "under", "after", "before", "during", "against",
    "between", "through", "across", "near", "without", "around",
}
_CCONJ = {"and", "or", "but"}
_SCONJ = {"that", "because", "while", "although", "if", "when", "since", "unless"}
_ADVS = {
    "now", "here", "there", "very", "often", "never", "always", "soon",
    "again", "already", "still", "together", "well", "fast", "yesterday", "today",
}
_ADJS = {
    "good", "bad", "new", "old", "big", "small", "quick", "slow", "happy",
    "long", "short", "early", "late", "young", "bright", "quiet", "busy",
    "fresh", "deep", "strong", "clear", "final", "whole", "gentle", "steady",
}
_NUMBER_WORDS = {
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "twenty", "thirty", "forty", "fifty", "hundred", "thousand",
}

# past and participle forms that simple suffix stripping cannot recover
_IRREGULAR = {
    "took": "take", "taken": "take", "takes": "take", "taking": "take",
    "said": "say", "says": "say", "saying": "say",
    "slept": "sleep", "sang": "sing", "sung": "sing",
    "went": "go", "gone": "go", "goes": "go",
    "ate": "eat", "eaten": "eat",
    "made": "make", "making": "make",
    "saw": "see", "seen": "see",
    "gave": "give", "given": "give", "giving": "give",
    "found": "find", "wrote": "write", "written": "write", "writing": "write",
    "ran": "run", "running": "run",
    "came": "come", "coming": "come",
    "got": "get", "gotten": "get", "getting": "get",
    "thought": "think", "told": "tell",
    "knew": "know", "known": "know",
    "felt": "feel", "kept": "keep", "left": "leave", "met": "meet",
    "paid": "pay", "sat": "sit", "stood": "stand", "understood": "understand",
    "spoke": "speak", "spoken": "speak",
    "broke": "break", "broken": "break",
    "brought": "bring", "bought": "buy", "built": "build", "caught": "catch",
    "chose": "choose", "chosen": "choose",
    "drew": "draw", "drawn": "draw", "drove": "drive", "driven": "drive",
    "fell": "fall", "fallen": "fall", "flew": "fly", "flown": "fly",
    "grew": "grow", "grown": "grow",
    "heard": "hear", "held": "hold", "lost": "lose",
    "rose": "rise", "risen": "rise",
    "sent": "send", "sold": "sell", "sought": "seek", "spent": "spend",
    "taught": "teach", "threw": "throw", "thrown": "throw",
    "wore": "wear", "worn": "wear", "won": "win",
}

_BASE_VERBS = {
    "take", "develop", "stop", "sleep", "sing", "flow", "cheer", "travel",
    "finish", "explain", "decide", "answer", "say", "go", "eat", "make",
    "see", "run", "work", "play", "help", "want", "need", "use", "try",
    "ask", "call", "start", "turn", "move", "live", "believe", "bring",
    "happen", "write", "sit", "stand", "pay", "meet", "learn", "change",
    "lead", "watch", "follow", "create", "open", "walk", "offer",
    "remember", "love", "consider", "appear", "wait", "serve", "send",
    "build", "stay", "fall", "cut", "reach", "raise", "practice", "study",
    "visit", "clean", "plant", "carry", "repair", "share", "test", "train",
}


@dataclass(frozen=True)
class TokenRow:
    """One output token; mirrors the columns the corpus format needs."""

    id: int
    form: str
    lemma: str
    pos: str
    head: int
    deprel: str


@dataclass
class Parse:
    tokens: list[TokenRow]
    text: str


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization with punctuation peeled off both ends."""
    out: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        while chunk and chunk[0] in _PUNCT_CHARS:
            lead.append(chunk[0])
            chunk = chunk[1:]
        tail: list[str] = []
        while chunk and chunk[-1] in _PUNCT_CHARS:
            tail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(lead)
        if chunk:
            out.append(chunk)
        out.extend(reversed(tail))
    return out


class RuleParser:
    """Deterministic heuristic parser for simple declarative English."""

    def __init__(self, extra_verbs: list[str] | None = None):
        self._verbs = set(_BASE_VERBS)
        self._verbs.update(v.lower() for v in (extra_verbs or []))

    # --- lexical analysis -------------------------------------------------

    def verb_lemma(self, word: str) -> str | None:
        """Base form if the word looks like a verb we know, else None."""
        w = word.lower()
        if w in _IRREGULAR:
            return _IRREGULAR[w]
        if w in self._verbs:
            return w
        if w.endswith("ies") and w[:-3] + "y" in self._verbs:
            return w[:-3] + "y"
        if w.endswith("es") and w[:-2] in self._verbs:
            return w[:-2]
        if w.endswith("s") and w[:-1] in self._verbs:
            return w[:-1]
        if w.endswith("ed"):
            candidates = [w[:-2], w[:-1], _undouble(w[:-2])]
            if w.endswith("ied"):
                candidates.append(w[:-3] + "y")
            for base in candidates:
                if base in self._verbs:
                    return base
        if w.endswith("ing"):
            for base in (w[:-3], w[:-3] + "e", _undouble(w[:-3])):
                if base in self._verbs:
                    return base
        return None

    def _tag(self, forms: list[str]) -> list[tuple[str, str, str]]:
        """(form, lemma, pos) for each token."""
        tagged: list[tuple[str, str, str]] = []
        for i, form in enumerate(forms):
            w = form.lower()
            nxt = forms[i + 1].lower() if i + 1 < len(forms) else ""
            prev_pos = tagged[-1][2] if tagged else ""
            nominal_slot = prev_pos in ("DET", "ADJ", "NUM", "ADP")
            if w and all(c in _PUNCT_CHARS for c in w):
                tagged.append((form, w, "PUNCT"))
            elif w in _DETS and w != "that":
                tagged.append((form, w, "DET"))
            elif w == "that":
                # determiner before a nominal, complementizer otherwise
                pos = "DET" if nxt and nxt not in _DETS and self.verb_lemma(nxt) is None else "SCONJ"
                tagged.append((form, w, pos))
            elif w in _PRONOUNS:
                tagged.append((form, w, "PRON"))
            elif w in _AUXES:
                tagged.append((form, w, "AUX"))
            elif w == "to" and nxt and self.verb_lemma(nxt) is not None:
                tagged.append((form, w, "PART"))
            elif w in _ADPS:
                tagged.append((form, w, "ADP"))
            elif w in _CCONJ:
                tagged.append((form, w, "CCONJ"))
            elif w in _SCONJ:
                tagged.append((form, w, "SCONJ"))
            elif w == "not":
                tagged.append((form, w, "PART"))
            elif any(c.isdigit() for c in w) or w in _NUMBER_WORDS:
                tagged.append((form, w, "NUM"))
            elif (lemma := self.verb_lemma(w)) is not None:
                # a verb form in a nominal slot is a noun ("the offer") or a
                # participial modifier ("the developed plan")
                if nominal_slot and w.endswith(("ed", "en", "ing")):
                    tagged.append((form, lemma, "ADJ"))
                elif nominal_slot:
                    tagged.append((form, _noun_lemma(w), "NOUN"))
                else:
                    tagged.append((form, lemma, "VERB"))
            elif w in _ADVS or (w.endswith("ly") and len(w) > 3):
                tagged.append((form, w, "ADV"))
            elif w in _ADJS or w.endswith(("ous", "ful", "ive", "able", "ible")):
                tagged.append((form, w, "ADJ"))
            elif w.endswith("ed") and len(w) > 4 and not nominal_slot:
                tagged.append((form, _guess_ed_lemma(w), "VERB"))
            elif w.endswith("ed") and len(w) > 4:
                tagged.append((form, w, "ADJ"))
            else:
                tagged.append((form, _noun_lemma(w), "NOUN"))
        return tagged

    # --- attachment -------------------------------------------------------

    def parse(self, text: str) -> Parse:
        forms = tokenize(text)
        clean = " ".join(forms)
        if not forms:
            return Parse(tokens=[], text=clean)
        tagged = self._tag(forms)
        n = len(tagged)
        pos = [t[2] for t in tagged]
        heads = [0] * n  # 0-based storage, value is 1-based head id
        rels = [""] * n

        verbs = [i for i in range(n) if pos[i] == "VERB"]
        if verbs:
            root = verbs[0]
        elif any(p == "AUX" for p in pos):
            root = pos.index("AUX")
        else:
            nouns = [i for i in range(n) if pos[i] in ("NOUN", "PRON")]
            root = nouns[-1] if nouns else 0
        rels[root] = "root"

        def governing_verb(i: int) -> int:
            before = [v for v in verbs if v < i]
            if before:
                return before[-1]
            after = [v for v in verbs if v > i]
            return after[0] if after else root

        def attach(i: int, head: int, rel: str) -> None:
            if i == root:  # the root never re-attaches, whatever later passes think
                return
            heads[i] = head + 1
            rels[i] = rel

        # non-root verbs: infinitival complement, clausal complement, or conjunct
        for v in verbs[1:]:
            prev_verb = max(u for u in verbs if u < v)
            gov = prev_verb
            between = range(prev_verb + 1, v)
            prev_content = next((j for j in reversed(between) if pos[j] != "ADV"), None)
            if prev_content is not None and pos[prev_content] == "PART" and tagged[prev_content][1] == "to":
                attach(v, gov, "xcomp")
            elif any(pos[j] == "SCONJ" for j in between) or any(pos[j] in ("NOUN", "PRON") for j in between):
                attach(v, gov, "ccomp")
            else:
                attach(v, gov, "conj")

        claimed: set[int] = {root}  # a nominal root is not up for grabs

        # prepositional phrases: ADP plus the next free nominal
        for i in range(n):
            if pos[i] != "ADP":
                continue
            obj = next(
                (j for j in range(i + 1, n) if pos[j] in ("NOUN", "PRON") and j not in claimed),
                None,
            )
            if obj is None:
                attach(i, governing_verb(i), "case")
                continue
            attach(obj, governing_verb(i), "nmod")
            attach(i, obj, "case")
            claimed.add(obj)

        # one subject per verb: the last free nominal before it
        span_starts = {v: max((u for u in verbs if u < v), default=-1) for v in verbs}
        for v in verbs:
            subj = next(
                (
                    j
                    for j in range(v - 1, span_starts[v], -1)
                    if pos[j] in ("NOUN", "PRON") and j not in claimed
                ),
                None,
            )
            if subj is not None:
                attach(subj, v, "nsubj")
                claimed.add(subj)
        if not verbs and pos[root] == "AUX":
            subj = next(
                (j for j in range(root - 1, -1, -1) if pos[j] in ("NOUN", "PRON") and j not in claimed),
                None,
            )
            if subj is not None:
                attach(subj, root, "nsubj")
                claimed.add(subj)

        # objects: free nominals after each verb, adjacent runs folded as compounds
        for k, v in enumerate(verbs):
            end = verbs[k + 1] if k + 1 < len(verbs) else n
            free = [j for j in range(v + 1, end) if pos[j] in ("NOUN", "PRON") and j not in claimed]
            runs: list[list[int]] = []
            for j in free:
                if runs and j == runs[-1][-1] + 1:
                    runs[-1].append(j)
                else:
                    runs.append([j])
            for r, run in enumerate(runs):
                head_noun = run[-1]
                for j in run[:-1]:
                    attach(j, head_noun, "compound")
                attach(head_noun, v, "dobj" if r == 0 else "obl")
                claimed.update(run)

        # leftover nominals (e.g. fronted phrases) hang off their verb
        for j in range(n):
            if pos[j] in ("NOUN", "PRON") and j not in claimed and j != root:
                attach(j, governing_verb(j), "nmod")
                claimed.add(j)

        for i in range(n):
            if i == root or heads[i] != 0:
                continue
            p = pos[i]
            if p in ("DET", "ADJ", "NUM"):
                nominal = next((j for j in range(i + 1, n) if pos[j] in ("NOUN", "PRON")), None)
                rel = {"DET": "det", "ADJ": "amod", "NUM": "nummod"}[p]
                if nominal is not None:
                    attach(i, nominal, rel)
                else:
                    attach(i, governing_verb(i), "dep")
            elif p == "ADV":
                attach(i, governing_verb(i), "advmod")
            elif p == "PART":
                if tagged[i][1] == "to":
                    nxt_verb = next((v for v in verbs if v > i), None)
                    attach(i, nxt_verb if nxt_verb is not None else root, "mark")
                else:
                    attach(i, governing_verb(i), "advmod")
            elif p == "SCONJ":
                nxt_verb = next((v for v in verbs if v > i), None)
                attach(i, nxt_verb if nxt_verb is not None else root, "mark")
            elif p == "CCONJ":
                conjunct = next((j for j in range(i + 1, n) if pos[j] in ("VERB", "NOUN", "PRON")), None)
                attach(i, conjunct if conjunct is not None else root, "cc")
            elif p == "AUX":
                nxt_verb = next((v for v in verbs if v > i), None)
                attach(i, nxt_verb if nxt_verb is not None else root, "aux")
            elif p == "PUNCT":
                attach(i, root, "punct")
            else:
                attach(i, root, "dep")

        rows = [
            TokenRow(id=i + 1, form=tagged[i][0], lemma=tagged[i][1], pos=pos[i],
                     head=0 if i == root else heads[i], deprel=rels[i])
            for i in range(n)
        ]
        if not _valid_tree(rows):
            rows = _flat_parse(tagged, root)
        return Parse(tokens=rows, text=clean)


def _undouble(stem: str) -> str:
    # CVC doubling: stopped -> stop; s is excluded (passed -> pass)
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in "aeious":
        return stem[:-1]
    return stem


def _guess_ed_lemma(w: str) -> str:
    # for -ed forms outside the lexicon: jumped -> jump, carried -> carry
    if w.endswith("ied"):
        return w[:-3] + "y"
    return _undouble(w[:-2])


def _noun_lemma(w: str) -> str:
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith(("ses", "xes", "zes", "ches", "shes")):
        return w[:-2]
    if w.endswith("s") and not w.endswith("ss") and len(w) > 3:
        return w[:-1]
    return w


def _valid_tree(rows: list[TokenRow]) -> bool:
    n = len(rows)
    if sorted(t.id for t in rows) != list(range(1, n + 1)):
        return False
    roots = [t for t in rows if t.head == 0]
    if len(roots) != 1:
        return False
    if any(t.head < 0 or t.head > n or t.head == t.id for t in rows):
        return False
    seen = {roots[0].id}
    frontier = [roots[0].id]
    while frontier:
        nxt = [t.id for t in rows if t.head in frontier and t.id not in seen]
        seen.update(nxt)
        frontier = nxt
    return len(seen) == n


def _flat_parse(tagged: list[tuple[str, str, str]], root: int) -> list[TokenRow]:
    # last-resort shape: every token hangs off the chosen root
    return [
        TokenRow(
            id=i + 1,
            form=form,
            lemma=lemma,
            pos=pos,
            head=0 if i == root else root + 1,
            deprel="root" if i == root else "dep",
        )
        for i, (form, lemma, pos) in enumerate(tagged)
    ]


class SpacyParser:
    """Adapter around a pretrained spacy pipeline."""

    def __init__(self, model: str):
        if not model:
            raise ConfigError("the spacy backend needs a model name")
        try:
            import spacy  # deliberate lazy import, heavy dependency
        except ImportError as exc:
            raise ModelError(f"spacy is not installed: {exc}") from None
        try:
            self._nlp = spacy.load(model)
        except Exception as exc:
            raise ModelError(f"cannot load spacy model {model!r}: {exc}") from None

    def parse(self, text: str) -> Parse:
        doc = self._nlp(text)
        rows = []
        for i, tok in enumerate(doc):
            head = 0 if tok.head is tok else tok.head.i + 1
            rows.append(
                TokenRow(
                    id=i + 1,
                    form=tok.text,
                    lemma=tok.lemma_.lower(),
                    pos=tok.pos_,
                    head=head,
                    deprel=tok.dep_.lower() if tok.head is not tok else "root",
                )
            )
        return Parse(tokens=rows, text=" ".join(t.form for t in rows))


def make_parser(name: str, *, extra_verbs: list[str] | None = None, model: str = ""):
    if name == "rules":
        return RuleParser(extra_verbs=extra_verbs)
    if name == "spacy":
        return SpacyParser(model)
    raise ConfigError(f"unknown parser backend {name!r}")
