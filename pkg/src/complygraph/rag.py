"""Prompted retrieval over regulation chunks with pluggable answer backends.

The pipeline asks one fixed question per policy segment, retrieves matching
article chunks, and synthesizes an answer. The extractive backend composes
the answer from the retrieved text itself and keeps everything offline and
deterministic; the external backend forwards the prompt plus chunks to a
line-oriented TCP service. Either way the supporting article list comes
from retrieval alone, so compliance results never depend on the backend.
"""

from __future__ import annotations

import re
import socket
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .errors import BackendUnavailable, UpstreamEmptyPolicy
from .policies import PolicyDocument, PolicySegment
from .regulation import ArticleChunk
from .retrieval import Index, RetrievalHit, RetrieverConfig, aggregate_articles, retrieve

QUESTION = "Which GDPR article does this privacy policy relate to?"

NO_MATCH_ANSWER = "No GDPR article matched above the configured threshold."


@dataclass(frozen=True)
class Prompt:
    question: str
    context_text: str

    @property
    def rendered(self) -> str:
        return self.question + "\n" + self.context_text


def build_prompt(segment: PolicySegment) -> Prompt:
    """Fixed question template over the segment text."""
    return Prompt(QUESTION, segment.text)


@dataclass(frozen=True)
class GeneratedResponse:
    """Answer text plus the articles retrieval grounded it on.

    supporting_articles is sorted ascending by (score, article number);
    backend_used is the producing backend's identifier, or "none" when
    retrieval came back empty and no backend ran.
    """

    answer_text: str
    supporting_articles: tuple[tuple[int, float], ...]
    backend_used: str


class GeneratorBackend(Protocol):
    identifier: str

    def generate(self, prompt: Prompt, chunks: Sequence[ArticleChunk]) -> str: ...


_SENTENCE_END = re.compile(r"(?<=[.!?])\s")


def _first_sentence(text: str) -> str:
    flat = " ".join(text.split())
    parts = _SENTENCE_END.split(flat, maxsplit=1)
    return parts[0]


class ExtractiveBackend:
    """Offline default: enumerate matched articles and quote their chunks."""

    identifier = "extractive"

    def generate(self, prompt: Prompt, chunks: Sequence[ArticleChunk]) -> str:
        numbers = ", ".join(str(c.article_number) for c in chunks)
        lines = ["Related GDPR articles: " + numbers]
        for chunk in chunks:
            lines.append(f"Article {chunk.article_number}: {_first_sentence(chunk.text)}")
        return "\n".join(lines)


def _escape_line(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace("\r", "\\r")
        .replace("\n", "\\n")
        .replace("\t", "\\t")
    )


def _unescape_line(s: str) -> str:
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\" and i + 1 < len(s):
            nxt = s[i + 1]
            mapped = {"\\": "\\", "n": "\n", "r": "\r", "t": "\t"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(c)
        i += 1
    return "".join(out)


class ExternalBackend:
    """Client for a line-delimited generation service over TCP.

    Request: one UTF-8 line, the rendered prompt and the chunk texts joined
    by blank lines, with backslash escapes for newlines. Response: one line
    of generated text, same escaping. Any transport failure or timeout
    raises BackendUnavailable; this client never fabricates answer text.
    """

    identifier = "external"

    def __init__(self, endpoint: str, timeout: float = 10.0):
        host, sep, port = endpoint.rpartition(":")
        if not sep or not host or not port.isdigit():
            raise ValueError(f"endpoint must be host:port, got {endpoint!r}")
        self.endpoint = endpoint
        self.host = host
        self.port = int(port)
        self.timeout = timeout

    def generate(self, prompt: Prompt, chunks: Sequence[ArticleChunk]) -> str:
        payload = "\n\n".join([prompt.rendered] + [c.text for c in chunks])
        line = _escape_line(payload).encode("utf-8") + b"\n"
        try:
            with socket.create_connection((self.host, self.port), timeout=self.timeout) as sock:
                sock.sendall(line)
                reply = sock.makefile("rb").readline()
        except OSError as exc:
            raise BackendUnavailable(f"external backend {self.endpoint}: {exc}") from exc
        if not reply:
            raise BackendUnavailable(f"external backend {self.endpoint}: empty reply")
        return _unescape_line(reply.decode("utf-8").rstrip("\r\n"))


def _best_chunks(index: Index, hits: Sequence[RetrievalHit]) -> list[ArticleChunk]:
    """Best-scoring chunk per article, ordered like supporting_articles."""
    best: dict[int, RetrievalHit] = {}
    for hit in hits:  # hits arrive sorted by (score, article, chunk)
        best.setdefault(hit.article_number, hit)
    ordered = sorted(best.values(), key=lambda h: (h.score, h.article_number))
    return [index.record(h.chunk_id).chunk for h in ordered]


def answer(
    segment: PolicySegment,
    index: Index,
    config: RetrieverConfig,
    backend: GeneratorBackend,
) -> GeneratedResponse:
    """Retrieve articles for one segment and synthesize an answer.

    Empty retrieval short-circuits to a fixed no-match sentence before any
    backend call, so an unreachable external service cannot fail a segment
    that matched nothing anyway.
    """
    hits = retrieve(index, segment.text, config)
    per_article = aggregate_articles(hits)
    supporting = tuple(sorted(per_article.items(), key=lambda p: (p[1], p[0])))
    if not supporting:
        return GeneratedResponse(NO_MATCH_ANSWER, (), "none")
    prompt = build_prompt(segment)
    text = backend.generate(prompt, _best_chunks(index, hits))
    return GeneratedResponse(text, supporting, backend.identifier)


@dataclass(frozen=True)
class PolicyArticleMap:
    """Provider-level article sets with per-segment detail.

    provider_articles maps provider id to the union of its segment article
    sets; segment_articles keeps the scored per-segment lists under
    (provider_id, segment_id); failures records segments whose external
    call failed and fell back to the extractive backend.
    """

    provider_articles: dict[str, frozenset[int]]
    segment_articles: dict[tuple[str, str], tuple[tuple[int, float], ...]]
    failures: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def merge(self, other: "PolicyArticleMap") -> "PolicyArticleMap":
        providers = dict(self.provider_articles)
        for pid, arts in other.provider_articles.items():
            providers[pid] = providers.get(pid, frozenset()) | arts
        segments = dict(self.segment_articles)
        segments.update(other.segment_articles)
        return PolicyArticleMap(providers, segments, self.failures + other.failures)


def map_policy_to_articles(
    policy: PolicyDocument,
    index: Index,
    config: RetrieverConfig,
    backend: GeneratorBackend,
) -> PolicyArticleMap:
    """Answer every segment and union the articles at the provider level.

    A BackendUnavailable on one segment is recorded in failures and that
    segment is re-answered extractively; nothing is silently dropped.
    """
    if not policy.segments:
        raise UpstreamEmptyPolicy(
            f"policy {policy.provider_id} has no segments left to map"
        )
    fallback = ExtractiveBackend()
    segment_articles: dict[tuple[str, str], tuple[tuple[int, float], ...]] = {}
    failures: list[tuple[str, str]] = []
    union: set[int] = set()
    for segment in policy.segments:
        try:
            response = answer(segment, index, config, backend)
        except BackendUnavailable as exc:
            failures.append((segment.segment_id, str(exc)))
            response = answer(segment, index, config, fallback)
        segment_articles[(policy.provider_id, segment.segment_id)] = (
            response.supporting_articles
        )
        union.update(n for n, _ in response.supporting_articles)
    return PolicyArticleMap(
        {policy.provider_id: frozenset(union)}, segment_articles, tuple(failures)
    )
