"""Command-line entry point: `preproc-adapter CONFIG`."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import load_config
from .errors import AdapterError
from .pipeline import preprocess


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="preproc-adapter",
        description="Convert raw text into a dependency-parsed corpus and embedding files.",
    )
    ap.add_argument("config", help="key = value configuration file")
    ap.add_argument("-q", "--quiet", action="store_true", help="suppress the run report")
    args = ap.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        config = load_config(args.config)
        report = preprocess(config)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if not args.quiet:
        print(f"sentences read    {report.sentences_read}")
        print(f"sentences kept    {report.sentences_kept}")
        print(f"sentences skipped {report.sentences_skipped}")
        print(f"tokens            {report.tokens}")
        print(f"vocabulary        {report.vocabulary}")
        for verb in sorted(report.samples):
            print(f"samples[{verb}]  {report.samples[verb]}")
        print(f"wrote {config.corpus_out}")
        print(f"wrote {config.sentence_vectors_out}")
        print(f"wrote {config.word_vectors_out}")
        if config.samples_out:
            print(f"wrote {config.samples_out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
