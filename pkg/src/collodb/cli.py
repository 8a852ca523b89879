"""Command-line front end.

Subcommands cover the whole lifecycle: `mine` builds a database from a
parsed corpus, `query`/`validate`/`clause` inspect artifacts, `stats`
runs the distribution analyses, and `ged` trains and applies the error
detector.  Exit codes: 0 success, 1 bad input or usage, 2 violated
internal invariant.
"""

from __future__ import annotations

import sys

import click

from .clause import classify_edge, is_verb, retrieve_clause
from .db import load_database, query as query_db, save_database
from .depcluster import embedding_word_sim, hashing_word_sim
from .errors import CollodbError, ConfigError, InputError, InvariantError
from .ged.classifier import (
    TrainConfig,
    classify,
    evaluate,
    load_model,
    save_model,
    train,
)
from .ged.data import load_ged_dataset, resolve_target
from .ged.index import build_index, heuristic_search
from .ged.matching import MatchWeights, extract_features, select_top
from .ingest import load_embeddings, parse_conllu
from .pipeline import PipelineConfig, config_from_mapping, parse_config_file, run_mine
from .stats import (
    SememeLexicon,
    action_sequences,
    collostruction_percentages,
    fit_power_law,
    sense_percentages,
    slot_statistics,
    within_slot_similarity,
)


@click.group()
@click.option("--config", "config_path", default=None, help="Flat key=value config file.")
@click.option("--seed", type=int, default=None, help="Override the seed everywhere.")
@click.option("--jobs", type=int, default=None, help="Worker processes for mining.")
@click.pass_context
def cli(ctx, config_path, seed, jobs):
    """Verb collostruction databases: mining, analysis, error detection."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["seed"] = seed
    ctx.obj["jobs"] = jobs


def _echo_row(*cells) -> None:
    click.echo("\t".join(str(c) for c in cells))


def _fmt(value, digits=6) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}g}" if isinstance(value, float) else str(value)


def _parse_weights(text: str | None) -> MatchWeights:
    if text is None:
        return MatchWeights()
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5:
        raise ConfigError(f"expected five comma-separated weights, got {len(parts)}")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"weights must be numbers: {text!r}") from exc
    return MatchWeights(*values)


def _word_sim(word_embeddings: str | None):
    if word_embeddings:
        return embedding_word_sim(load_embeddings(word_embeddings))
    return hashing_word_sim()


@cli.command()
@click.option("--corpus", default=None, help="Dependency-parsed corpus (10-column format).")
@click.option("-o", "--output", required=True, help="Database file to write.")
@click.option("--sentence-embeddings", default=None)
@click.option("--word-embeddings", default=None)
@click.option("--verbs", default=None, help="Comma-separated verbs; empty mines all.")
@click.option("--max-instances", type=int, default=None)
@click.option("--sense-threshold", type=float, default=None)
@click.option("--min-cluster-size", type=int, default=None)
@click.option("--min-pts", type=int, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--alpha-w", type=float, default=None)
@click.option("--beta-w", type=float, default=None)
@click.option("--sim-floor", type=float, default=None)
@click.option("--strength-mode", type=click.Choice(["conditional", "literal"]), default=None)
@click.option("--exhaustive-paths/--greedy-paths", "exhaustive_paths", default=None)
@click.option("--embedding-dim", type=int, default=None)
@click.option("--use-lemma/--use-form", "use_lemma", default=None)
@click.option("--verb-pos", default=None, help="Comma-separated part-of-speech tags.")
@click.pass_context
def mine(ctx, output, **flags):
    """Mine a collostruction database from a parsed corpus."""
    config = PipelineConfig()
    if ctx.obj.get("config_path"):
        config = config_from_mapping(parse_config_file(ctx.obj["config_path"]), config)
    overrides = {k: str(v) for k, v in flags.items() if v is not None}
    if ctx.obj.get("seed") is not None:
        overrides["seed"] = str(ctx.obj["seed"])
    if ctx.obj.get("jobs") is not None:
        overrides["jobs"] = str(ctx.obj["jobs"])
    config = config_from_mapping(overrides, config)
    db = run_mine(config)
    save_database(db, output)
    totals = db.manifest["verbs"]
    _echo_row("verb", "sampled", "senses", "discarded", "collostructions")
    for verb in sorted(totals):
        r = totals[verb]
        _echo_row(verb, r["sampled"], len(r["kept_sense_sizes"]), r["discarded"], r["collostructions"])
    for warning in db.manifest["warnings"]:
        click.echo(f"warning: {warning}", err=True)
    click.echo(f"wrote {output}")


@cli.command("query")
@click.argument("database")
@click.argument("verb")
@click.option("--deprel", default=None, help="Keep records with a slot of this relation.")
@click.option("--collexeme", default=None, help="Keep records with a matching collexeme substring.")
def query_cmd(database, verb, deprel, collexeme):
    """List a verb's collostructions, most probable first."""
    db = load_database(database)
    records = query_db(db, verb, deprel=deprel, collexeme=collexeme)
    _echo_row("id", "p_col", "support", "sense", "stage", "score", "pattern")
    for colo in records:
        pattern = " ".join(str(s.key) for s in colo.slots)
        _echo_row(
            colo.colo_id,
            _fmt(colo.p_col),
            colo.support,
            colo.sense_cluster_id,
            colo.stage,
            _fmt(colo.score),
            pattern,
        )


@cli.command()
@click.argument("database")
def validate(database):
    """Load a database file and run every structural check."""
    db = load_database(database)
    n_colos = len(db.all_collostructions())
    click.echo(f"ok: {len(db.verbs)} verbs, {n_colos} collostructions")


@cli.command()
@click.argument("trees_path")
@click.option("--sentence", "sent_id", required=True, help="sent_id of the sentence.")
@click.option("--verb", default=None, help="Locate the target by verb word.")
@click.option("--target", type=int, default=None, help="Locate the target by token id.")
def clause(trees_path, sent_id, verb, target):
    """Show the clause structure retrieved around one verb token."""
    trees = [t for t in parse_conllu(trees_path) if t.sent_id == sent_id]
    if not trees:
        raise InputError(f"no sentence with sent_id {sent_id!r}")
    tree = trees[0]
    if target is None:
        if verb is None:
            raise InputError("pass --verb or --target to pick the focus token")
        matches = [t.id for t in tree.tokens if is_verb(t) and verb in (t.word, t.form)]
        if not matches:
            raise InputError(f"no verb token {verb!r} in sentence {sent_id!r}")
        target = matches[0]
    structure = retrieve_clause(tree, target)
    click.echo(f"strategy {structure.strategy}, focus {structure.focus.label()}")
    for node in structure.nodes:
        side = "focus" if node.token_id == structure.target_id else node.side
        category = "-" if node.token_id == structure.target_id else classify_edge(structure, node).value
        _echo_row(node.token_id, side, node.label(), category)


@cli.group()
def stats():
    """Distribution analyses over a mined database."""


@stats.command()
@click.argument("database")
@click.option(
    "--level",
    type=click.Choice(["collostructions", "senses"]),
    default="collostructions",
    help="Fit usage-pattern or sense-cluster percentages.",
)
@click.option("--x-min", type=float, default=None, help="Fix the tail cutoff instead of scanning.")
@click.option("--verb", default=None, help="Restrict to one verb.")
def powerlaw(database, level, x_min, verb):
    """Fit a power law to percentage mass and test it against an exponential."""
    db = load_database(database)
    if level == "collostructions":
        samples = collostruction_percentages(db, verb)
    else:
        samples = sense_percentages(db, verb)
    report = fit_power_law(samples, x_min)
    _echo_row("n", "x_min", "exponent", "n_tail", "ks", "R", "p")
    _echo_row(
        len(samples),
        _fmt(report.x_min),
        _fmt(report.exponent),
        report.n_tail,
        _fmt(report.ks),
        _fmt(report.R),
        _fmt(report.p),
    )


@stats.command()
@click.argument("database")
def slots(database):
    """Slot occurrence fractions and attestation probabilities."""
    db = load_database(database)
    _echo_row("side", "deprel", "occurrence_fraction", "mean_p_slot", "n")
    for row in slot_statistics(db):
        _echo_row(
            row.side,
            row.deprel,
            _fmt(row.occurrence_fraction),
            _fmt(row.mean_p_slot),
            row.n_collostructions,
        )


@stats.command()
@click.argument("database")
@click.option("--embeddings", required=True, help="Word embedding file for collexemes.")
@click.option("--literal", is_flag=True, help="Divide the pair sum by N-1 instead of the pair count.")
@click.option("--verb", default=None)
def coherence(database, embeddings, literal, verb):
    """Within-slot semantic coherence of collexeme sets."""
    db = load_database(database)
    store = load_embeddings(embeddings)
    verbs = [verb] if verb else sorted(db.verbs)
    _echo_row("verb", "id", "slot", "n_collexemes", "coherence")
    for v in verbs:
        if v not in db.verbs:
            raise InputError(f"unknown verb {v!r}")
        for colo in db.verbs[v].collostructions:
            for slot in colo.slots:
                if len(slot.collexemes) < 2:
                    continue
                try:
                    value = within_slot_similarity(slot, store, literal=literal)
                except CollodbError:
                    continue  # fewer than two collexemes had embeddings
                _echo_row(v, colo.colo_id, str(slot.key), len(slot.collexemes), _fmt(value))


@stats.command()
@click.argument("database")
@click.argument("verb")
@click.option("--lexicon", required=True, help="word<TAB>sememe,sememe file.")
@click.option("--hypernyms", default=None, help="Optional sememe<TAB>hypernym file.")
@click.option("--top", type=int, default=5)
def actions(database, verb, lexicon, hypernyms, top):
    """Dominant sememes in the slots tied directly to the verb."""
    db = load_database(database)
    lex = SememeLexicon.from_files(lexicon, hypernyms)
    groups = action_sequences(db, verb, lex, top_k=top)
    for label in sorted(groups):
        click.echo(label)
        for sememe, count in groups[label]:
            _echo_row("", sememe, count)


@cli.group()
def ged():
    """Grammatical error detection over verb usage."""


def _load_parallel(dataset_path: str, trees_path: str):
    instances = load_ged_dataset(dataset_path)
    trees = parse_conllu(trees_path)
    if len(instances) != len(trees):
        raise InputError(
            f"{len(instances)} dataset records but {len(trees)} parsed sentences"
        )
    return instances, trees


def _instance_features(instances, trees, db, weights, word_sim, params=None):
    """Per-instance feature vectors; None where no candidate matched."""
    index = build_index(db)
    out = []
    for inst, tree in zip(instances, trees):
        try:
            target = resolve_target(tree, inst)
            structure = retrieve_clause(tree, target)
        except InputError:
            out.append(None)
            continue
        candidates = heuristic_search(structure, index)
        selected = select_top(structure, candidates, params, word_sim, weights)
        if selected is None:
            out.append(None)
            continue
        colo, alignment, _ = selected
        out.append(extract_features(structure, colo, alignment))
    return out


@ged.command("index")
@click.argument("database")
def ged_index(database):
    """Summarize the pattern postings built from a database."""
    db = load_database(database)
    index = build_index(db)
    _echo_row("verb", "category", "units", "postings")
    for verb in sorted(index.postings):
        for category, units in sorted(index.postings[verb].items()):
            _echo_row(verb, category, len(units), sum(len(v) for v in units.values()))


@ged.command("train")
@click.argument("database")
@click.argument("dataset")
@click.argument("trees_path")
@click.option("-o", "--output", required=True, help="Model file to write (.npz).")
@click.option("--seed", type=int, default=7)
@click.option("--epochs", type=int, default=200)
@click.option("--lr", type=float, default=1e-3)
@click.option("--batch", type=int, default=32)
@click.option("--weights", default=None, help="Five comma-separated match weights.")
@click.option("--word-embeddings", default=None)
def ged_train(database, dataset, trees_path, output, seed, epochs, lr, batch, weights, word_embeddings):
    """Train the error classifier on a labeled dataset."""
    db = load_database(database)
    instances, trees = _load_parallel(dataset, trees_path)
    feats = _instance_features(instances, trees, db, _parse_weights(weights), _word_sim(word_embeddings))
    usable = [(f, inst.label) for f, inst in zip(feats, instances) if f is not None]
    skipped = len(feats) - len(usable)
    if skipped:
        click.echo(f"warning: {skipped} instances had no matching pattern; excluded", err=True)
    if not usable:
        raise InputError("no instance could be featurized; is the database for these verbs?")
    config = TrainConfig(epochs=epochs, batch_size=batch, learning_rate=lr, seed=seed)
    model = train([f for f, _ in usable], [lab for _, lab in usable], config)
    save_model(model, output)
    preds = [classify(model, f).label for f, _ in usable]
    correct = sum(1 for p, (_, lab) in zip(preds, usable) if p == lab)
    click.echo(f"trained on {len(usable)} instances; fit accuracy {correct / len(usable):.4f}")
    click.echo(f"wrote {output}")


@ged.command("eval")
@click.argument("database")
@click.argument("model_path")
@click.argument("dataset")
@click.argument("trees_path")
@click.option("--weights", default=None)
@click.option("--word-embeddings", default=None)
def ged_eval(database, model_path, dataset, trees_path, weights, word_embeddings):
    """Score a trained model against gold labels."""
    db = load_database(database)
    model = load_model(model_path)
    instances, trees = _load_parallel(dataset, trees_path)
    feats = _instance_features(instances, trees, db, _parse_weights(weights), _word_sim(word_embeddings))
    predicted = [classify(model, f).label for f in feats]
    report = evaluate(predicted, [inst.label for inst in instances])
    click.echo(report.table())


@ged.command("check")
@click.argument("database")
@click.argument("model_path")
@click.argument("trees_path")
@click.option("--sentence", "sent_id", default=None, help="sent_id; defaults to the first sentence.")
@click.option("--verb", required=True)
@click.option("--weights", default=None)
@click.option("--word-embeddings", default=None)
def ged_check(database, model_path, trees_path, sent_id, verb, weights, word_embeddings):
    """Judge one verb usage in a parsed sentence."""
    db = load_database(database)
    model = load_model(model_path)
    trees = parse_conllu(trees_path)
    if sent_id is not None:
        trees = [t for t in trees if t.sent_id == sent_id]
        if not trees:
            raise InputError(f"no sentence with sent_id {sent_id!r}")
    tree = trees[0]
    matches = [t.id for t in tree.tokens if is_verb(t) and verb in (t.word, t.form)]
    if not matches:
        matches = [t.id for t in tree.tokens if verb in (t.word, t.form)]
    if not matches:
        raise InputError(f"no token {verb!r} in sentence {tree.sent_id!r}")
    structure = retrieve_clause(tree, matches[0])
    index = build_index(db)
    candidates = heuristic_search(structure, index)
    selected = select_top(structure, candidates, None, _word_sim(word_embeddings), _parse_weights(weights))
    if selected is None:
        verdict = classify(model, None)
        click.echo(f"{verdict.label}\t(no matching pattern; prior fallback)")
        return
    colo, alignment, score = selected
    verdict = classify(model, extract_features(structure, colo, alignment))
    _echo_row(
        verdict.label,
        f"p_correct={verdict.p_correct:.4f}",
        f"p_error={verdict.p_error:.4f}",
        f"match={colo.colo_id}",
        f"combined={score.combined:.4f}",
    )


@ged.command("dump-features")
@click.argument("database")
@click.argument("dataset")
@click.argument("trees_path")
@click.option("--weights", default=None)
@click.option("--word-embeddings", default=None)
def ged_dump_features(database, dataset, trees_path, weights, word_embeddings):
    """Emit the classifier feature table for external analysis."""
    db = load_database(database)
    instances, trees = _load_parallel(dataset, trees_path)
    feats = _instance_features(instances, trees, db, _parse_weights(weights), _word_sim(word_embeddings))
    _echo_row("idx", "label", "verb", "core_dep_col", "core_dep_cls", "deps_col", "deps_cls")
    for i, (inst, fv) in enumerate(zip(instances, feats)):
        if fv is None:
            _echo_row(i, inst.label, inst.verb, "-", "-", "-", "-")
            continue
        col = "|".join(f"{d}:{s:.4f}" for d, s in fv.deps_col) or "-"
        cls = "|".join(f"{d}:{s:.4f}" for d, s in fv.deps_cls) or "-"
        _echo_row(i, inst.label, inst.verb, fv.core_dep_col, fv.core_dep_cls, col, cls)


def main(argv=None):
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except InvariantError as exc:
        click.echo(f"invariant violated: {exc}", err=True)
        sys.exit(2)
    except CollodbError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    sys.exit(0)
