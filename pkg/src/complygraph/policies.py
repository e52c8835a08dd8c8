"""Provider policy corpus ingestion and ground-truth annotations.

Corpus format::

    #PROVIDER <id> <name>
    #SEG <id> [<category>]
    segment text lines ...

Ground truth is ``provider_id,segment_id,article_number`` per line, with
``#`` comments allowed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .errors import DuplicateProvider, EmptySegment, MalformedSource, UnknownSegment

_SLUG = re.compile(r"^[a-z0-9][a-z0-9._-]*$")
_MARKER = re.compile(r"^#(PROVIDER|SEG)(?:\s+(.*))?$")
_SEG_CATEGORY = re.compile(r"^(.*?)\s*\[([^\[\]]+)\]\s*$")


@dataclass(frozen=True)
class PolicySegment:
    segment_id: str
    text: str
    category: str | None = None

    def token_count(self) -> int:
        return len(self.text.split())


@dataclass(frozen=True)
class PolicyDocument:
    provider_id: str
    provider_name: str
    segments: tuple[PolicySegment, ...]


@dataclass(frozen=True)
class GroundTruth:
    """Expected article numbers per (provider_id, segment_id)."""

    entries: dict[tuple[str, str], frozenset[int]]


def load_policies(source: str) -> list[PolicyDocument]:
    """Parse a policy corpus file, preserving provider and segment order."""
    docs: list[PolicyDocument] = []
    provider: tuple[str, str] | None = None
    segments: list[PolicySegment] = []
    seg_head: tuple[str, str | None] | None = None
    seg_lines: list[str] = []
    seg_line_no = 0
    seen_providers: set[str] = set()

    def close_segment():
        nonlocal seg_head, seg_lines
        if seg_head is None:
            return
        seg_id, category = seg_head
        text = "\n".join(seg_lines).strip()
        if not text:
            raise EmptySegment(f"segment {seg_id!r} has no text (line {seg_line_no})")
        if any(s.segment_id == seg_id for s in segments):
            raise MalformedSource(f"duplicate segment id {seg_id!r}", seg_line_no)
        segments.append(PolicySegment(seg_id, text, category))
        seg_head = None
        seg_lines = []

    def close_provider(line_no: int):
        nonlocal provider, segments
        close_segment()
        if provider is None:
            return
        pid, name = provider
        if not segments:
            raise MalformedSource(f"provider {pid!r} has no segments", line_no)
        docs.append(PolicyDocument(pid, name, tuple(segments)))
        provider = None
        segments = []

    for line_no, raw in enumerate(source.splitlines(), start=1):
        m = _MARKER.match(raw)
        if not m:
            if raw.startswith("#"):
                raise MalformedSource(f"unknown marker: {raw.split()[0]}", line_no)
            if seg_head is not None:
                seg_lines.append(raw)
            elif raw.strip():
                raise MalformedSource("text outside any segment", line_no)
            continue
        kind, rest = m.group(1), (m.group(2) or "").strip()
        if kind == "PROVIDER":
            close_provider(line_no)
            pid, _, name = rest.partition(" ")
            name = name.strip()
            if not pid or not name:
                raise MalformedSource("#PROVIDER needs an id and a name", line_no)
            if not _SLUG.match(pid):
                raise MalformedSource(f"provider id {pid!r} is not a lowercase slug", line_no)
            if pid in seen_providers:
                raise DuplicateProvider(f"provider {pid!r} listed twice (line {line_no})")
            seen_providers.add(pid)
            provider = (pid, name)
        else:  # SEG
            if provider is None:
                raise MalformedSource("#SEG outside any provider", line_no)
            close_segment()
            seg_id, category = rest, None
            cm = _SEG_CATEGORY.match(rest)
            if cm:
                seg_id, category = cm.group(1).strip(), cm.group(2).strip()
            if not seg_id:
                raise MalformedSource("segment id missing", line_no)
            seg_head = (seg_id, category)
            seg_line_no = line_no
    close_provider(len(source.splitlines()))
    return docs


def filter_short_segments(docs: list[PolicyDocument], min_tokens: int) -> list[PolicyDocument]:
    """Drop segments shorter than ``min_tokens`` whitespace-separated tokens.

    Documents left with no segments are dropped entirely. Idempotent, order
    preserving.
    """
    if min_tokens < 1:
        raise ValueError("min_tokens must be >= 1")
    out: list[PolicyDocument] = []
    for doc in docs:
        kept = tuple(s for s in doc.segments if s.token_count() >= min_tokens)
        if kept:
            out.append(replace(doc, segments=kept))
    return out


def load_ground_truth(source: str, docs: list[PolicyDocument]) -> GroundTruth:
    """Parse ground-truth rows and check them against the loaded corpus."""
    known = {(d.provider_id, s.segment_id) for d in docs for s in d.segments}
    entries: dict[tuple[str, str], set[int]] = {}
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise MalformedSource("expected 'provider_id,segment_id,article_number'", line_no)
        pid, sid, num_tok = parts
        try:
            number = int(num_tok)
        except ValueError:
            raise MalformedSource(f"article number must be an integer, got {num_tok!r}", line_no) from None
        if number < 1:
            raise MalformedSource(f"article number must be positive, got {number}", line_no)
        if (pid, sid) not in known:
            raise UnknownSegment(f"no segment {sid!r} for provider {pid!r} (line {line_no})")
        entries.setdefault((pid, sid), set()).add(number)
    return GroundTruth({k: frozenset(v) for k, v in entries.items()})
