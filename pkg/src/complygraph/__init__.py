"""Map privacy policies to GDPR articles and report compliance gaps.

The package parses a structured regulation source into chapters, articles,
and paragraph chunks, indexes the chunks with TF-IDF retrieval, maps each
policy segment to the articles it addresses, stores everything in an RDF
style triple graph, infers required compliance per obligation role with
forward-chaining rules, and reports the required-minus-complied gap.
"""

from .compliance import ComplianceReport, compute_gap, record_compliance, render_report
from .errors import ComplyGraphError
from .evaluation import CorrectnessResult, SweepConfig, correctness_at, render_sweep_table, sweep
from .kg import Graph, Iri, Literal, Triple, Variable, match, parse_turtle, populate_provider, populate_regulation, serialize_turtle
from .policies import GroundTruth, PolicyDocument, PolicySegment, filter_short_segments, load_ground_truth, load_policies
from .rag import ExternalBackend, ExtractiveBackend, GeneratedResponse, PolicyArticleMap, answer, build_prompt, map_policy_to_articles
from .regulation import Article, ArticleChunk, Chapter, ObligationRole, Paragraph, RegulationDoc, chunk_regulation, load_obligation_map, parse_regulation, serialize_regulation
from .retrieval import Index, RetrievalHit, RetrieverConfig, aggregate_articles, build_index, retrieve
from .rules import Rule, RuleAtom, RuleSet, apply_rule, builtin_rules, infer_fixpoint, parse_rules

__version__ = "0.1.0"

__all__ = [
    "Article",
    "ArticleChunk",
    "Chapter",
    "ComplianceReport",
    "ComplyGraphError",
    "CorrectnessResult",
    "ExternalBackend",
    "ExtractiveBackend",
    "GeneratedResponse",
    "Graph",
    "GroundTruth",
    "Index",
    "Iri",
    "Literal",
    "ObligationRole",
    "Paragraph",
    "PolicyArticleMap",
    "PolicyDocument",
    "PolicySegment",
    "RegulationDoc",
    "RetrievalHit",
    "RetrieverConfig",
    "Rule",
    "RuleAtom",
    "RuleSet",
    "SweepConfig",
    "Triple",
    "Variable",
    "aggregate_articles",
    "answer",
    "apply_rule",
    "build_index",
    "build_prompt",
    "builtin_rules",
    "chunk_regulation",
    "compute_gap",
    "correctness_at",
    "filter_short_segments",
    "infer_fixpoint",
    "load_ground_truth",
    "load_obligation_map",
    "load_policies",
    "map_policy_to_articles",
    "match",
    "parse_regulation",
    "parse_rules",
    "parse_turtle",
    "populate_provider",
    "populate_regulation",
    "record_compliance",
    "render_report",
    "render_sweep_table",
    "retrieve",
    "serialize_regulation",
    "serialize_turtle",
    "sweep",
    "__version__",
]
