"""Regulation source parsing, retrieval chunking and obligation-role input.

The source format is plain UTF-8 text with explicit markers::

    #REG <id> <title>
    #CH <index> <title>
    #ART <number> <title> [<url>]
    #P <index>
    paragraph text lines ...

A trailing ``[...]`` on an ``#ART`` line is the optional source URL. Lines
that do not start with a marker belong to the paragraph opened by the last
``#P``. The obligation map is ``article_number,role`` per line with ``#``
comments allowed.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import DuplicateArticle, EmptyDocument, MalformedSource, UnknownArticle, UnknownRole


@dataclass(frozen=True)
class Paragraph:
    index: int
    text: str


@dataclass(frozen=True)
class Article:
    number: int
    title: str
    source_url: str | None
    paragraphs: tuple[Paragraph, ...]


@dataclass(frozen=True)
class Chapter:
    index: int
    title: str
    articles: tuple[Article, ...]


@dataclass(frozen=True)
class RegulationDoc:
    regulation_id: str
    title: str
    chapters: tuple[Chapter, ...]

    def articles(self) -> tuple[Article, ...]:
        return tuple(a for ch in self.chapters for a in ch.articles)


@dataclass(frozen=True)
class ArticleChunk:
    """One retrieval unit: a single paragraph with its article lineage."""

    chunk_id: str
    article_number: int
    paragraph_index: int
    text: str


class ObligationRole(enum.Enum):
    """The five actor categories that regulation articles can bind."""

    CONSUMER = "Consumer"
    COMMON = "Common"
    DATA_SUBJECT = "DataSubject"
    GENERAL = "General"
    PROVIDER = "Provider"

    @staticmethod
    def parse(name: str) -> "ObligationRole":
        for role in ObligationRole:
            if role.value == name:
                return role
        raise UnknownRole(f"unknown obligation role: {name!r}")


@dataclass(frozen=True)
class ObligationAssignment:
    article_number: int
    role: ObligationRole


_MARKER = re.compile(r"^#(REG|CH|ART|P)(?:\s+(.*))?$")
_ART_URL = re.compile(r"^(.*?)\s*\[([^\[\]]+)\]\s*$")


def _parse_int(token: str, what: str, line_no: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise MalformedSource(f"{what} must be an integer, got {token!r}", line_no) from None
    return value


class _DocBuilder:
    """Accumulates marker events and enforces structural invariants."""

    def __init__(self):
        self.regulation_id: str | None = None
        self.title = ""
        self.chapters: list[Chapter] = []
        self.seen_articles: set[int] = set()
        # in-progress state
        self.chapter_head: tuple[int, str] | None = None
        self.articles: list[Article] = []
        self.article_head: tuple[int, str, str | None] | None = None
        self.paragraphs: list[Paragraph] = []
        self.para_index: int | None = None
        self.para_lines: list[str] = []
        self.para_line_no = 0

    def close_paragraph(self):
        if self.para_index is None:
            return
        text = "\n".join(self.para_lines).strip()
        if not text:
            raise MalformedSource(
                f"paragraph {self.para_index} has no text", self.para_line_no
            )
        if any(p.index == self.para_index for p in self.paragraphs):
            raise MalformedSource(
                f"duplicate paragraph index {self.para_index}", self.para_line_no
            )
        self.paragraphs.append(Paragraph(self.para_index, text))
        self.para_index = None
        self.para_lines = []

    def close_article(self, line_no: int):
        self.close_paragraph()
        if self.article_head is None:
            return
        number, title, url = self.article_head
        self.articles.append(Article(number, title, url, tuple(self.paragraphs)))
        self.article_head = None
        self.paragraphs = []

    def close_chapter(self, line_no: int):
        self.close_article(line_no)
        if self.chapter_head is None:
            return
        index, title = self.chapter_head
        if not self.articles:
            raise MalformedSource(f"chapter {index} has no articles", line_no)
        if self.chapters and self.chapters[-1].index >= index:
            raise MalformedSource(
                f"chapter index {index} does not increase past {self.chapters[-1].index}",
                line_no,
            )
        self.chapters.append(Chapter(index, title, tuple(self.articles)))
        self.chapter_head = None
        self.articles = []


def parse_regulation(source: str) -> RegulationDoc:
    """Parse regulation file content into a :class:`RegulationDoc`."""
    b = _DocBuilder()
    for line_no, raw in enumerate(source.splitlines(), start=1):
        m = _MARKER.match(raw)
        if not m:
            if raw.startswith("#"):
                raise MalformedSource(f"unknown marker: {raw.split()[0]}", line_no)
            if b.para_index is not None:
                b.para_lines.append(raw)
            elif raw.strip():
                raise MalformedSource("text outside any paragraph", line_no)
            continue
        kind, rest = m.group(1), (m.group(2) or "").strip()
        if kind == "REG":
            if b.regulation_id is not None:
                raise MalformedSource("second #REG marker", line_no)
            reg_id, _, title = rest.partition(" ")
            title = title.strip()
            if not reg_id or not title:
                raise MalformedSource("#REG needs an id and a title", line_no)
            b.regulation_id = reg_id
            b.title = title
        elif kind == "CH":
            if b.regulation_id is None:
                raise MalformedSource("#CH before #REG", line_no)
            b.close_chapter(line_no)
            idx_tok, _, title = rest.partition(" ")
            title = title.strip()
            index = _parse_int(idx_tok, "chapter index", line_no)
            if index < 1:
                raise MalformedSource(f"chapter index must be >= 1, got {index}", line_no)
            if not title:
                raise MalformedSource("chapter title missing", line_no)
            b.chapter_head = (index, title)
        elif kind == "ART":
            if b.chapter_head is None and not b.articles:
                raise MalformedSource("#ART outside any chapter", line_no)
            b.close_article(line_no)
            num_tok, _, title = rest.partition(" ")
            title = title.strip()
            number = _parse_int(num_tok, "article number", line_no)
            if number < 1:
                raise MalformedSource(f"article number must be >= 1, got {number}", line_no)
            url = None
            um = _ART_URL.match(title)
            if um:
                title, url = um.group(1).strip(), um.group(2).strip()
            if not title:
                raise MalformedSource("article title missing", line_no)
            if number in b.seen_articles:
                raise DuplicateArticle(f"article {number} defined twice (line {line_no})")
            b.seen_articles.add(number)
            b.article_head = (number, title, url)
        else:  # P
            if b.article_head is None:
                raise MalformedSource("#P outside any article", line_no)
            b.close_paragraph()
            index = _parse_int(rest, "paragraph index", line_no)
            if index < 1:
                raise MalformedSource(f"paragraph index must be >= 1, got {index}", line_no)
            b.para_index = index
            b.para_line_no = line_no
    last = len(source.splitlines())
    b.close_chapter(last)
    if b.regulation_id is None:
        raise MalformedSource("missing #REG header", 1)
    if not b.chapters:
        raise EmptyDocument("regulation has zero chapters")
    return RegulationDoc(b.regulation_id, b.title, tuple(b.chapters))


def serialize_regulation(doc: RegulationDoc) -> str:
    """Render a document back to the regulation file format."""
    lines = [f"#REG {doc.regulation_id} {doc.title}"]
    for ch in doc.chapters:
        lines.append(f"#CH {ch.index} {ch.title}")
        for art in ch.articles:
            head = f"#ART {art.number} {art.title}"
            if art.source_url is not None:
                head += f" [{art.source_url}]"
            lines.append(head)
            for p in art.paragraphs:
                lines.append(f"#P {p.index}")
                lines.append(p.text)
    return "\n".join(lines) + "\n"


def chunk_regulation(doc: RegulationDoc) -> list[ArticleChunk]:
    """One chunk per paragraph, in document order.

    An article with no paragraphs still yields one chunk (id suffix ``P0``)
    carrying the article title, so retrieval can cite every article.
    """
    chunks: list[ArticleChunk] = []
    for ch in doc.chapters:
        for art in ch.articles:
            if not art.paragraphs:
                chunks.append(ArticleChunk(f"ART{art.number}-P0", art.number, 0, art.title))
                continue
            for p in art.paragraphs:
                chunks.append(
                    ArticleChunk(f"ART{art.number}-P{p.index}", art.number, p.index, p.text)
                )
    return chunks


def load_obligation_map(source: str, doc: RegulationDoc) -> list[ObligationAssignment]:
    """Parse ``article_number,role`` rows and validate them against ``doc``."""
    known = {a.number for a in doc.articles()}
    seen: set[tuple[int, ObligationRole]] = set()
    assignments: list[ObligationAssignment] = []
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise MalformedSource("expected 'article_number,role'", line_no)
        number = _parse_int(parts[0], "article number", line_no)
        role = ObligationRole.parse(parts[1])
        if number not in known:
            raise UnknownArticle(f"article {number} not in regulation (line {line_no})")
        key = (number, role)
        if key in seen:
            raise MalformedSource(f"duplicate assignment {number},{role.value}", line_no)
        seen.add(key)
        assignments.append(ObligationAssignment(number, role))
    return assignments
