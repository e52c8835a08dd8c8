"""Compliance recording, gap computation, and report rendering.

The gap between what a provider must comply with and what it demonstrably
complies with is a set difference over two graph patterns: the objects of
requiresComplianceWith minus the objects of compliesWithSection. Reports
come in a human layout and a line-oriented machine layout with a fixed
field order, both byte-stable for identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kg
from .kg import Graph, Iri, Triple, Variable, match

TITLE_WIDTH = 72
EXCERPT_WIDTH = 200

REPORT_FORMATS = ("human", "machine")


@dataclass(frozen=True)
class ArticleDetail:
    """Presentation fields for one article, derived from its stored text."""

    number: int
    title: str
    excerpt: str
    url: str | None
    chapter_index: int | None


@dataclass(frozen=True)
class ComplianceReport:
    provider_id: str
    required: tuple[int, ...]
    complied: tuple[int, ...]
    missing: tuple[int, ...]
    details: dict[int, ArticleDetail]


def record_compliance(graph: Graph, provider_id: str, articles: set[int]) -> Graph:
    """Assert one compliesWithSection triple per article; idempotent."""
    provider = kg.require_provider(graph, provider_id)
    triples = []
    for number in sorted(articles):
        article = kg.find_article_by_number(graph, number)
        triples.append(Triple(provider, kg.COMPLIES_WITH_SECTION, article))
    return graph.add_all(triples)


def _truncate(text: str, width: int) -> str:
    if len(text) <= width:
        return text
    return text[: width - 3].rstrip() + "..."


def _article_numbers(graph: Graph) -> dict[Iri, int]:
    """Map every article node to its section index."""
    numbers: dict[Iri, int] = {}
    for binding in match(graph, (Variable("s"), kg.HAS_SECTION_INDEX, Variable("i"))):
        subject = binding["s"]
        if Triple(subject, kg.RDF_TYPE, kg.GDPR_ARTICLES) in graph:
            numbers[subject] = int(binding["i"].lexical)
    return numbers


def _object_of(graph: Graph, subject: Iri, predicate: Iri):
    found = match(graph, (subject, predicate, Variable("o")))
    return found[0]["o"] if found else None


def _detail_for(graph: Graph, article: Iri, number: int) -> ArticleDetail:
    text_term = _object_of(graph, article, kg.HAS_SECTION_TEXT)
    text = text_term.lexical if text_term is not None else ""
    first_line = text.split("\n", 1)[0].strip()
    title = _truncate(first_line, TITLE_WIDTH) if first_line else "(no section text)"
    excerpt = _truncate(" ".join(text.split()), EXCERPT_WIDTH)
    url_term = _object_of(graph, article, kg.HAS_SECTION_URL)
    url = url_term.lexical if url_term is not None else None
    chapter_index = None
    chapter = _object_of(graph, article, kg.PART_OF_CHAPTER)
    if chapter is not None:
        index_term = _object_of(graph, chapter, kg.HAS_CHAPTER_INDEX)
        if index_term is not None:
            chapter_index = int(index_term.lexical)
    return ArticleDetail(number, title, excerpt, url, chapter_index)


def compute_gap(graph: Graph, provider_id: str) -> ComplianceReport:
    """Required minus complied over an already-inferred graph.

    required and complied are read straight off the provider's
    requiresComplianceWith and compliesWithSection edges; missing is their
    difference. Run infer_fixpoint first or required will be empty.
    """
    provider = kg.require_provider(graph, provider_id)
    numbers = _article_numbers(graph)

    def objects(predicate: Iri) -> set[int]:
        found = match(graph, (provider, predicate, Variable("a")))
        return {numbers[b["a"]] for b in found if b["a"] in numbers}

    required = objects(kg.REQUIRES_COMPLIANCE_WITH)
    complied = objects(kg.COMPLIES_WITH_SECTION)
    missing = required - complied
    by_number = {n: iri for iri, n in numbers.items()}
    details = {
        n: _detail_for(graph, by_number[n], n) for n in sorted(required | complied)
    }
    return ComplianceReport(
        provider_id,
        tuple(sorted(required)),
        tuple(sorted(complied)),
        tuple(sorted(missing)),
        details,
    )


_ROMAN = (
    (1000, "M"), (900, "CM"), (500, "D"), (400, "CD"),
    (100, "C"), (90, "XC"), (50, "L"), (40, "XL"),
    (10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I"),
)


def _roman(n: int) -> str:
    out = []
    for value, numeral in _ROMAN:
        while n >= value:
            out.append(numeral)
            n -= value
    return "".join(out)


def _render_human(report: ComplianceReport) -> str:
    lines = [
        f"Compliance report for {report.provider_id}",
        f"required articles: {len(report.required)}",
        f"complied articles: {len(report.complied)}",
        f"missing articles: {len(report.missing)}",
        "",
    ]
    if not report.missing:
        lines.append(
            f"Fully compliant: all {len(report.required)} required articles"
            " are complied with."
        )
    else:
        lines.append("Missing:")
        for number in report.missing:
            detail = report.details[number]
            chapter = (
                f" [Chapter {_roman(detail.chapter_index)}]"
                if detail.chapter_index is not None
                else ""
            )
            lines.append(f"  Article {number}{chapter}: {detail.title}")
            if detail.url:
                lines.append(f"    {detail.url}")
    return "\n".join(lines) + "\n"


def _render_machine(report: ComplianceReport) -> str:
    lines = [
        f"provider {report.provider_id}"
        f" required {len(report.required)}"
        f" complied {len(report.complied)}"
        f" missing {len(report.missing)}"
    ]
    for number in report.missing:
        lines.append(f"missing {number} {report.details[number].title}")
    return "\n".join(lines) + "\n"


def render_report(report: ComplianceReport, format: str = "human") -> str:
    """Deterministic text in one of the two supported layouts."""
    if format == "human":
        return _render_human(report)
    if format == "machine":
        return _render_machine(report)
    raise ValueError(f"format must be one of {REPORT_FORMATS}, got {format!r}")
