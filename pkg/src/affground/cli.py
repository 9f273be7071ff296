"""Operator command line.

Results go to stdout as canonical documents, diagnostics to stderr.
Exit codes: 0 success, 1 domain failure (resolution, non-empty
validation), 2 parse/usage failure.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from . import dataio, evalkit
from .engine import EnergyWeights, GroundConfig, ground as engine_ground
from .errors import (
    AffgroundError,
    ConfigurationError,
    IngestError,
    ParseError,
    ProtocolError,
    RangeError,
)
from .ingest import import_flat, ingest, merge as kb_merge, read_flat, read_stage1, read_stage2
from .kb import validate as kb_validate
from .percept import EmbeddingTable

EXIT_DOMAIN = 1
EXIT_USAGE = 2

_PARSE_ERRORS = (ParseError, IngestError, RangeError, ProtocolError, ConfigurationError)


def _fail(exc: Exception, code: int) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _parse_weights(text: str) -> EnergyWeights:
    parts = text.split(",")
    if len(parts) != 3:
        raise ParseError(f"--weights expects alpha,beta,gamma, got {text!r}")
    try:
        return EnergyWeights(*[float(p) for p in parts])
    except ValueError:
        raise ParseError(f"--weights expects three numbers, got {text!r}")


def _load_embeddings(path: str) -> EmbeddingTable:
    return dataio.load_embeddings(Path(path).read_bytes())


def _write_output(data: bytes, output: str | None) -> None:
    if output:
        Path(output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)


@click.group()
def main():
    """Energy-based affordance grounding toolkit."""


@main.command("ground")
@click.option("--scene", "scene_path", required=True, type=click.Path(exists=True))
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@click.option("--embeddings", "emb_path", required=True, type=click.Path(exists=True))
@click.option("--verb", required=True)
@click.option("--weights", default="1,1,1", show_default=True, help="alpha,beta,gamma")
@click.option("--mode", type=click.Choice(["posterior", "labels"]), default="posterior", show_default=True)
@click.option("--temperature", type=float, default=0.1, show_default=True)
@click.option("--explain", "with_explain", is_flag=True, help="append per-candidate explanations")
@click.option("--output", type=click.Path(), default=None)
def cmd_ground(scene_path, kb_path, emb_path, verb, weights, mode, temperature, with_explain, output):
    """Ground a verb query against one scene; print the result document."""
    try:
        scene = dataio.load_scene(Path(scene_path).read_bytes())
        kb = dataio.load_kb(Path(kb_path).read_bytes())
        embeddings = _load_embeddings(emb_path)
        w = _parse_weights(weights)
    except _PARSE_ERRORS as e:
        _fail(e, EXIT_USAGE)
        return
    config = GroundConfig(hypothesis_mode=mode, temperature=temperature)
    try:
        result = engine_ground(scene, verb, kb, embeddings, w, config)
    except AffgroundError as e:
        _fail(e, EXIT_DOMAIN)
        return
    doc = dataio.result_to_doc(result, include_explanations=with_explain)
    _write_output(dataio.canonical_bytes(doc), output)


@main.group("eval")
def cmd_eval():
    """Evaluation protocols."""


@cmd_eval.command("static")
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@click.option("--embeddings", "emb_path", required=True, type=click.Path(exists=True))
@click.option("--weights", default="1,1,1", show_default=True)
@click.option("--mode", type=click.Choice(["posterior", "labels"]), default="posterior", show_default=True)
@click.option("--tier", "tiers", multiple=True, type=click.Choice(list(evalkit.TIERS)),
              help="restrict to specific tiers (default: all)")
@click.option("--output", type=click.Path(), default=None)
@click.option("--table", "table_out", type=click.Path(), default=None, help="also write a tabular text report")
def cmd_eval_static(dataset_dir, kb_path, emb_path, weights, mode, tiers, output, table_out):
    """Tiered static evaluation over a dataset directory.

    Layout: <dataset>/<tier>/*.json holding affscene/1 files with
    ground truth.
    """
    try:
        kb = dataio.load_kb(Path(kb_path).read_bytes())
        embeddings = _load_embeddings(emb_path)
        w = _parse_weights(weights)
        use_tiers = tuple(tiers) if tiers else evalkit.TIERS
        scenes_by_tier = {}
        for tier in use_tiers:
            tier_dir = Path(dataset_dir) / tier
            if not tier_dir.is_dir():
                raise ConfigurationError(f"missing tier directory {tier_dir}")
            scenes_by_tier[tier] = [
                dataio.load_scene(p.read_bytes()) for p in sorted(tier_dir.glob("*.json"))
            ]
    except _PARSE_ERRORS as e:
        _fail(e, EXIT_USAGE)
        return
    try:
        report = evalkit.run_static(
            scenes_by_tier, kb, embeddings, w, use_tiers, GroundConfig(hypothesis_mode=mode)
        )
    except AffgroundError as e:
        _fail(e, EXIT_DOMAIN)
        return
    _write_output(dataio.canonical_bytes(report), output)
    if table_out:
        Path(table_out).write_text(dataio.report_to_table(report), encoding="utf-8")


@cmd_eval.command("episodes")
@click.option("--episodes", "episodes_path", required=True, type=click.Path(exists=True))
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@click.option("--embeddings", "emb_path", required=True, type=click.Path(exists=True))
@click.option("--weights", default="1,1,1", show_default=True)
@click.option("--mode", type=click.Choice(["single", "multi"]), default="single", show_default=True)
@click.option("--hypothesis-mode", type=click.Choice(["posterior", "labels"]), default="posterior", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", type=click.Path(), default=None)
@click.option("--table", "table_out", type=click.Path(), default=None)
def cmd_eval_episodes(episodes_path, kb_path, emb_path, weights, mode, hypothesis_mode, seed, output, table_out):
    """Episode-based functional grounding (accuracy / MRR / nDCG)."""
    try:
        kb = dataio.load_kb(Path(kb_path).read_bytes())
        embeddings = _load_embeddings(emb_path)
        w = _parse_weights(weights)
        episodes = load_episodes(Path(episodes_path).read_bytes())
    except _PARSE_ERRORS as e:
        _fail(e, EXIT_USAGE)
        return
    try:
        report = evalkit.run_episodes(
            episodes, kb, embeddings, w, mode, seed,
            GroundConfig(hypothesis_mode=hypothesis_mode),
        )
    except AffgroundError as e:
        _fail(e, EXIT_DOMAIN)
        return
    _write_output(dataio.canonical_bytes(report), output)
    if table_out:
        Path(table_out).write_text(dataio.report_to_table(report), encoding="utf-8")


def load_episodes(raw: bytes) -> list[evalkit.EvaluationEpisode]:
    """Parse an affepisodes/1 document into evaluation episodes."""
    doc = dataio.parse_document(raw, "affepisodes/1")
    eps_doc = doc.get("episodes")
    if not isinstance(eps_doc, list) or not eps_doc:
        raise ParseError("episodes: expected non-empty list")
    episodes = []
    for i, ed in enumerate(eps_doc):
        try:
            candidates = tuple(
                (c["candidate_id"], c["embedding_id"], c.get("label"))
                for c in ed["candidates"]
            )
            episodes.append(
                evalkit.EvaluationEpisode(
                    episode_id=ed["episode_id"],
                    verb=ed["verb"],
                    candidates=candidates,
                    relevance={k: int(v) for k, v in ed["relevance"].items()},
                )
            )
        except (KeyError, TypeError) as e:
            raise ParseError(f"episodes[{i}]: missing field {e}") from None
    return episodes


@main.group("kb")
def cmd_kb():
    """Knowledge-base lifecycle."""


@cmd_kb.command("validate")
@click.argument("kb_path", type=click.Path(exists=True))
def cmd_kb_validate(kb_path):
    """Print invariant violations; exit 1 if any."""
    try:
        kb = dataio.load_kb(Path(kb_path).read_bytes())
    except ParseError as e:
        _fail(e, EXIT_USAGE)
        return
    violations = kb_validate(kb)
    for v in violations:
        click.echo(v.message)
    sys.exit(EXIT_DOMAIN if violations else 0)


@cmd_kb.command("merge")
@click.argument("kb_a", type=click.Path(exists=True))
@click.argument("kb_b", type=click.Path(exists=True))
@click.option("--policy", type=click.Choice(["max", "mean", "prefer_b"]), default="max", show_default=True)
@click.option("--output", type=click.Path(), default=None)
def cmd_kb_merge(kb_a, kb_b, policy, output):
    """Merge two KBs with a conflict policy."""
    try:
        a = dataio.load_kb(Path(kb_a).read_bytes())
        b = dataio.load_kb(Path(kb_b).read_bytes())
    except ParseError as e:
        _fail(e, EXIT_USAGE)
        return
    _write_output(dataio.save_kb(kb_merge(a, b, policy)), output)


@cmd_kb.command("import-flat")
@click.argument("pairs_path", type=click.Path(exists=True))
@click.option("--output", type=click.Path(), default=None)
def cmd_kb_import_flat(pairs_path, output):
    """Import a flat verb,object,weight table as a degenerate KB."""
    try:
        pairs = read_flat(Path(pairs_path).read_text(encoding="utf-8"))
        kb = import_flat(pairs)
    except _PARSE_ERRORS as e:
        _fail(e, EXIT_USAGE)
        return
    _write_output(dataio.save_kb(kb), output)


@cmd_kb.command("ingest")
@click.option("--stage1", "stage1_path", required=True, type=click.Path(exists=True), help="verb,property,weight table")
@click.option("--stage2", "stage2_path", required=True, type=click.Path(exists=True), help="property,object,weight table")
@click.option("--prune-epsilon", type=float, default=0.0, show_default=True)
@click.option("--output", type=click.Path(), default=None)
def cmd_kb_ingest(stage1_path, stage2_path, prune_epsilon, output):
    """Build a KB from the two-stage scored tables."""
    try:
        s1 = read_stage1(Path(stage1_path).read_text(encoding="utf-8"))
        s2 = read_stage2(Path(stage2_path).read_text(encoding="utf-8"))
        kb = ingest(s1, s2, prune_epsilon)
    except _PARSE_ERRORS as e:
        _fail(e, EXIT_USAGE)
        return
    _write_output(dataio.save_kb(kb), output)


@cmd_kb.command("diff")
@click.argument("kb_a", type=click.Path(exists=True))
@click.argument("kb_b", type=click.Path(exists=True))
def cmd_kb_diff(kb_a, kb_b):
    """Print edge-level weight deltas between two KBs."""
    try:
        a = dataio.load_kb(Path(kb_a).read_bytes())
        b = dataio.load_kb(Path(kb_b).read_bytes())
    except ParseError as e:
        _fail(e, EXIT_USAGE)
        return
    for kind, ea, eb in (("vp", a.vp_edges, b.vp_edges), ("po", a.po_edges, b.po_edges)):
        for key in sorted(set(ea) | set(eb)):
            wa, wb = ea.get(key), eb.get(key)
            if wa == wb:
                continue
            frm, to = key
            left = "-" if wa is None else dataio.format_number(wa)
            right = "-" if wb is None else dataio.format_number(wb)
            click.echo(f"{kind} {frm} {to} {left} -> {right}")


@main.command("serve")
@click.option("--data-dir", envvar="AFFGROUND_DATA_DIR", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--port", envvar="AFFGROUND_PORT", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--mode", type=click.Choice(["posterior", "labels"]), default="posterior", show_default=True)
def cmd_serve(data_dir, port, host, mode):
    """Launch the HTTP service over a data directory."""
    import uvicorn

    from .service import create_app, load_state

    try:
        state = load_state(data_dir, GroundConfig(hypothesis_mode=mode))
    except _PARSE_ERRORS as e:
        _fail(e, EXIT_USAGE)
        return
    uvicorn.run(create_app(state), host=host, port=port)


if __name__ == "__main__":
    main()
