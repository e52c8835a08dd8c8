"""Deterministic lexical vector index over regulation chunks.

The baseline embedder is plain TF-IDF: tokens are maximal runs of lowercase
alphanumerics, idf = ln((1+N)/(1+df)) + 1, vectors L2-normalized. Distance is
cosine distance (1 - cosine similarity), so scores live in [0, 2] and a hit
is kept when its score falls at or below the configured threshold. The
embedder is pluggable via the ``backend`` identifier; thresholds are
calibrated per backend.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import log

import numpy as np

from .errors import EmptyCorpus
from .regulation import ArticleChunk

_TOKEN = re.compile(r"[a-z0-9]+")

# Scores are snapped to 12 decimals so threshold boundaries and exact
# self-matches are stable across platforms; well inside every stated tolerance.
_SCORE_DECIMALS = 12

EmbeddingVector = np.ndarray


@dataclass(frozen=True)
class RetrievalHit:
    chunk_id: str
    article_number: int
    score: float


@dataclass(frozen=True)
class RetrieverConfig:
    threshold: float
    top_k: int | None = None
    backend: str = "tfidf"

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.top_k is not None and self.top_k < 1:
            raise ValueError("top_k must be a positive integer")


@dataclass(frozen=True)
class Vocabulary:
    """Token positions and idf weights learned from the indexed corpus."""

    token_index: dict[str, int]
    idf: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.token_index)


@dataclass(frozen=True)
class ChunkRecord:
    chunk: ArticleChunk
    vector: EmbeddingVector


@dataclass(frozen=True)
class Index:
    vocabulary: Vocabulary
    records: tuple[ChunkRecord, ...]
    config: RetrieverConfig
    by_id: dict[str, ChunkRecord] = field(repr=False, default_factory=dict)

    def record(self, chunk_id: str) -> ChunkRecord:
        return self.by_id[chunk_id]


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def build_vocabulary(texts: list[str]) -> Vocabulary:
    """Vocabulary over all corpus tokens, sorted for a stable dimension order."""
    n = len(texts)
    df: dict[str, int] = {}
    for text in texts:
        for token in set(tokenize(text)):
            df[token] = df.get(token, 0) + 1
    tokens = sorted(df)
    token_index = {t: i for i, t in enumerate(tokens)}
    idf = np.array([log((1 + n) / (1 + df[t])) + 1.0 for t in tokens], dtype=float)
    return Vocabulary(token_index, idf)


def embed(vocabulary: Vocabulary, text: str) -> EmbeddingVector:
    """TF-IDF vector for ``text``; out-of-vocabulary tokens are ignored.

    Blank text (or text with no in-vocabulary tokens) maps to the zero
    vector; anything else is L2-normalized.
    """
    vec = np.zeros(vocabulary.dimension, dtype=float)
    for token in tokenize(text):
        i = vocabulary.token_index.get(token)
        if i is not None:
            vec[i] += 1.0
    vec *= vocabulary.idf
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


def build_index(chunks: list[ArticleChunk], config: RetrieverConfig) -> Index:
    """Embed every chunk once; the result is immutable and thread-safe."""
    if not chunks:
        raise EmptyCorpus("cannot build an index over zero chunks")
    vocabulary = build_vocabulary([c.text for c in chunks])
    records = tuple(ChunkRecord(c, embed(vocabulary, c.text)) for c in chunks)
    by_id = {r.chunk.chunk_id: r for r in records}
    return Index(vocabulary, records, config, by_id)


def distance(query_vec: EmbeddingVector, chunk_vec: EmbeddingVector) -> float:
    """Cosine distance, snapped to 12 decimals. Zero vectors score 1.0."""
    raw = 1.0 - float(np.dot(query_vec, chunk_vec))
    return round(min(max(raw, 0.0), 2.0), _SCORE_DECIMALS)


def retrieve(index: Index, query_text: str, config: RetrieverConfig) -> list[RetrievalHit]:
    """Chunks within ``config.threshold`` of the query, nearest first.

    Ties break on (score, article_number, chunk_id) so output bytes are
    stable. ``top_k`` truncates after the threshold filter when set.
    """
    query_vec = embed(index.vocabulary, query_text)
    hits = []
    for rec in index.records:
        score = distance(query_vec, rec.vector)
        if score <= config.threshold:
            hits.append(RetrievalHit(rec.chunk.chunk_id, rec.chunk.article_number, score))
    hits.sort(key=lambda h: (h.score, h.article_number, h.chunk_id))
    if config.top_k is not None:
        hits = hits[: config.top_k]
    return hits


def aggregate_articles(hits: list[RetrievalHit]) -> dict[int, float]:
    """Best (minimum) score per distinct article among ``hits``."""
    best: dict[int, float] = {}
    for hit in hits:
        current = best.get(hit.article_number)
        if current is None or hit.score < current:
            best[hit.article_number] = hit.score
    return best


def dump_index(index: Index) -> str:
    """Plain-text debug dump: chunk id, article, sparse vector entries."""
    lines = []
    for rec in index.records:
        entries = " ".join(
            f"{i}:{rec.vector[i]:.6f}" for i in np.nonzero(rec.vector)[0]
        )
        lines.append(f"{rec.chunk.chunk_id}\t{rec.chunk.article_number}\t{entries}")
    return "\n".join(lines) + "\n"
