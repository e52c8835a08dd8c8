"""Command line for the ingest -> map -> infer -> report workflow.

Four subcommands: `ingest` parses a regulation and writes the populated
knowledge graph as Turtle; `check` maps policy corpora to articles, records
compliance, runs inference, and reports gaps per provider; `gaps` re-reports
one provider from a saved graph; `sweep` scores retrieval thresholds
against ground truth. Graph state moves between commands as Turtle files.

Outputs carry no timestamps; the human check report starts with sha256
digests of its inputs instead, so identical inputs give identical bytes.
Exit codes: 0 compliant or success, 1 gaps found, 2 usage or data error.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .compliance import compute_gap, record_compliance, render_report
from .errors import ComplyGraphError, EmptyCorpus
from .evaluation import SweepConfig, render_sweep_table, sweep
from .kg import Graph, parse_turtle, populate_provider, populate_regulation, serialize_turtle
from .policies import filter_short_segments, load_ground_truth, load_policies
from .rag import ExternalBackend, ExtractiveBackend, GeneratorBackend, PolicyArticleMap, map_policy_to_articles
from .regulation import chunk_regulation, load_obligation_map, parse_regulation
from .retrieval import RetrieverConfig, build_index
from .rules import RuleSet, builtin_rules, infer_fixpoint, parse_rules

ENDPOINT_ENV = "COMPLYGRAPH_EXTERNAL_ENDPOINT"

DIGEST_CHARS = 12


@dataclass(frozen=True)
class CliConfig:
    """Validated knobs shared by the subcommands."""

    regulation: Path | None = None
    obligations: Path | None = None
    policies: Path | None = None
    truth: Path | None = None
    rules: Path | None = None
    kg: Path | None = None
    kg_out: Path | None = None
    out: Path | None = None
    threshold: float = 0.75
    thresholds: tuple[float, ...] = ()
    min_tokens: int = 10
    backend: str = "extractive"
    external_endpoint: str | None = None
    external_timeout: float = 10.0
    format: str = "human"

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("--threshold must be positive")
        if self.min_tokens < 1:
            raise ValueError("--min-tokens must be >= 1")


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:DIGEST_CHARS]


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _notice(message: str) -> None:
    print(f"notice: {message}", file=sys.stderr)


def _make_backend(config: CliConfig) -> GeneratorBackend:
    if config.backend == "extractive":
        return ExtractiveBackend()
    endpoint = config.external_endpoint or os.environ.get(ENDPOINT_ENV)
    if not endpoint:
        raise ValueError(
            f"external backend needs --external-endpoint or {ENDPOINT_ENV}"
        )
    return ExternalBackend(endpoint, timeout=config.external_timeout)


def _load_rules(config: CliConfig) -> RuleSet:
    rules = list(builtin_rules())
    if config.rules is not None:
        rules.extend(parse_rules(_read(config.rules)))
    return RuleSet(tuple(rules))


def cmd_ingest(config: CliConfig) -> int:
    doc = parse_regulation(_read(config.regulation))
    assignments = load_obligation_map(_read(config.obligations), doc)
    graph = populate_regulation(Graph.of(), doc, assignments)
    config.out.write_text(serialize_turtle(graph), encoding="utf-8")
    chunks = chunk_regulation(doc)
    print(
        f"ingested {doc.regulation_id}: chapters {len(doc.chapters)}"
        f" articles {len(doc.articles())} chunks {len(chunks)}"
    )
    return 0


def _digest_preamble(config: CliConfig) -> str:
    entries = [
        ("regulation", config.regulation),
        ("kg", config.kg),
        ("policies", config.policies),
        ("rules", config.rules),
    ]
    lines = ["inputs:"]
    for label, path in entries:
        if path is not None:
            lines.append(f"  {label} sha256 {_digest(path)} {path}")
    return "\n".join(lines) + "\n\n"


def cmd_check(config: CliConfig) -> int:
    doc = parse_regulation(_read(config.regulation))
    graph = parse_turtle(_read(config.kg))
    docs = load_policies(_read(config.policies))
    kept = filter_short_segments(docs, config.min_tokens)
    kept_ids = {d.provider_id for d in kept}
    for dropped in docs:
        if dropped.provider_id not in kept_ids:
            _notice(
                f"provider {dropped.provider_id}: every segment fell below"
                f" --min-tokens {config.min_tokens}; skipped"
            )
    if not kept:
        raise EmptyCorpus("no policy segments left after --min-tokens filtering")

    retriever = RetrieverConfig(threshold=config.threshold)
    index = build_index(chunk_regulation(doc), retriever)
    backend = _make_backend(config)
    merged = PolicyArticleMap({}, {})
    for policy in kept:
        merged = merged.merge(
            map_policy_to_articles(policy, index, retriever, backend)
        )
    for segment_id, message in merged.failures:
        _notice(f"segment {segment_id}: {message}; fell back to extractive backend")

    for policy in kept:
        graph = populate_provider(graph, policy.provider_id, doc.regulation_id)
        graph = record_compliance(
            graph,
            policy.provider_id,
            set(merged.provider_articles[policy.provider_id]),
        )
    graph = infer_fixpoint(graph, _load_rules(config))
    if config.kg_out is not None:
        config.kg_out.write_text(serialize_turtle(graph), encoding="utf-8")

    reports = [compute_gap(graph, policy.provider_id) for policy in kept]
    if config.format == "human":
        text = _digest_preamble(config) + "\n".join(
            render_report(r, "human") for r in reports
        )
    else:
        text = "".join(render_report(r, "machine") for r in reports)
    _emit(text, config.out)
    return 1 if any(r.missing for r in reports) else 0


def cmd_gaps(config: CliConfig, provider_id: str) -> int:
    graph = parse_turtle(_read(config.kg))
    graph = infer_fixpoint(graph, _load_rules(config))
    report = compute_gap(graph, provider_id)
    _emit(render_report(report, config.format), config.out)
    return 1 if report.missing else 0


def cmd_sweep(config: CliConfig) -> int:
    doc = parse_regulation(_read(config.regulation))
    docs = load_policies(_read(config.policies))
    truth = load_ground_truth(_read(config.truth), docs)
    thresholds = tuple(sorted(set(config.thresholds)))
    sweep_config = SweepConfig(thresholds, min_tokens=config.min_tokens)
    results = sweep(chunk_regulation(doc), docs, truth, sweep_config)
    _emit(render_sweep_table(results), config.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="complygraph",
        description="map privacy policies to GDPR articles and report compliance gaps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser(
        "ingest", help="parse a regulation and write the populated graph as Turtle"
    )
    ingest.add_argument("--regulation", type=Path, required=True)
    ingest.add_argument("--obligations", type=Path, required=True)
    ingest.add_argument("--out", type=Path, required=True)

    check = sub.add_parser(
        "check", help="map policies to articles and report compliance gaps"
    )
    check.add_argument("--regulation", type=Path, required=True)
    check.add_argument("--kg", type=Path, required=True)
    check.add_argument("--policies", type=Path, required=True)
    check.add_argument("--rules", type=Path)
    check.add_argument("--threshold", type=float, default=0.75)
    check.add_argument("--min-tokens", type=int, default=10, dest="min_tokens")
    check.add_argument(
        "--backend", choices=("extractive", "external"), default="extractive"
    )
    check.add_argument("--external-endpoint", dest="external_endpoint")
    check.add_argument(
        "--external-timeout", type=float, default=10.0, dest="external_timeout"
    )
    check.add_argument("--format", choices=("human", "machine"), default="human")
    check.add_argument("--out", type=Path)
    check.add_argument("--kg-out", type=Path, dest="kg_out")

    gaps = sub.add_parser("gaps", help="report one provider from a saved graph")
    gaps.add_argument("provider")
    gaps.add_argument("--kg", type=Path, required=True)
    gaps.add_argument("--rules", type=Path)
    gaps.add_argument("--format", choices=("human", "machine"), default="human")
    gaps.add_argument("--out", type=Path)

    swp = sub.add_parser(
        "sweep", help="score retrieval thresholds against ground truth"
    )
    swp.add_argument("--regulation", type=Path, required=True)
    swp.add_argument("--policies", type=Path, required=True)
    swp.add_argument("--truth", type=Path, required=True)
    swp.add_argument(
        "--threshold",
        type=float,
        action="append",
        required=True,
        dest="thresholds",
        help="repeatable; one sweep row per value",
    )
    swp.add_argument("--min-tokens", type=int, default=10, dest="min_tokens")
    swp.add_argument("--out", type=Path)

    return parser


def _config_from(args: argparse.Namespace) -> CliConfig:
    fields = (
        "regulation", "obligations", "policies", "truth", "rules", "kg",
        "kg_out", "out", "threshold", "min_tokens", "backend",
        "external_endpoint", "external_timeout", "format",
    )
    kwargs = {name: getattr(args, name) for name in fields if hasattr(args, name)}
    if hasattr(args, "thresholds"):
        kwargs["thresholds"] = tuple(args.thresholds)
    return CliConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _config_from(args)
        if args.command == "ingest":
            return cmd_ingest(config)
        if args.command == "check":
            return cmd_check(config)
        if args.command == "gaps":
            return cmd_gaps(config, args.provider)
        return cmd_sweep(config)
    except (ComplyGraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
