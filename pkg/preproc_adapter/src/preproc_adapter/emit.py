"""File emission.

All writers go through the same atomic path: the content is written to a
temporary sibling file and moved into place with os.replace, so a crashed
run never leaves a half-written artifact behind.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .parsers import Parse


def atomic_write(path: str, content: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(content)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def conllu_text(sentences: list[tuple[str, Parse]]) -> str:
    """Render (sent_id, parse) pairs in the 10-column corpus format."""
    blocks: list[str] = []
    for sent_id, parse in sentences:
        lines = [f"# sent_id = {sent_id}", f"# text = {parse.text}"]
        for t in parse.tokens:
            lines.append(
                "\t".join(
                    [str(t.id), t.form, t.lemma, t.pos, "_", "_", str(t.head), t.deprel, "_", "_"]
                )
            )
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def embedding_text(dim: int, rows: list[tuple[str, np.ndarray]]) -> str:
    """Render an embedding table: `dim N` header, then id<TAB>values lines."""
    lines = [f"dim {dim}"]
    for key, vec in rows:
        values = " ".join(f"{x:.8f}" for x in vec)
        lines.append(f"{key}\t{values}")
    return "\n".join(lines) + "\n"


def samples_text(samples: dict[str, list[dict[str, str]]]) -> str:
    return json.dumps(samples, indent=2, sort_keys=True) + "\n"
