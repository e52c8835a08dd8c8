"""In-memory triple graph with pattern matching and a small Turtle subset.

Graphs are immutable snapshots: every mutation returns a new ``Graph``, so one
snapshot can be read from many threads while a writer builds the next one.
The Turtle subset covers exactly what the schema needs: prefixed IRIs, plain
IRI refs, string literals, integer literals and ``xsd:anyURI`` literals. No
blank nodes, no lists, no language tags.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import NonGroundTriple, TurtleSyntax, UnknownArticle, UnknownProvider
from .regulation import ObligationAssignment, ObligationRole, RegulationDoc

# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True, order=False)
class Iri:
    """An absolute IRI."""

    value: str

    def __post_init__(self):
        if not self.value or any(c.isspace() for c in self.value):
            raise ValueError(f"invalid IRI: {self.value!r}")


VALID_DATATYPES = ("string", "integer", "anyURI")


@dataclass(frozen=True, order=False)
class Literal:
    """A typed literal value; datatype is one of string, integer, anyURI."""

    lexical: str
    datatype: str = "string"

    def __post_init__(self):
        if self.datatype not in VALID_DATATYPES:
            raise ValueError(f"unsupported literal datatype: {self.datatype}")
        if self.datatype == "integer":
            int(self.lexical)


@dataclass(frozen=True, order=False)
class Variable:
    """A named variable; valid only in patterns and rule atoms."""

    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")


Term = Union[Iri, Literal, Variable]
Node = Union[Iri, Literal]


def integer(value: int) -> Literal:
    return Literal(str(int(value)), "integer")


def string(value: str) -> Literal:
    return Literal(value, "string")


def any_uri(value: str) -> Literal:
    return Literal(value, "anyURI")


def term_key(term: Node) -> tuple:
    """Sort key giving a total, deterministic order over ground terms."""
    if isinstance(term, Iri):
        return (0, term.value, "")
    return (1, term.datatype, term.lexical)


@dataclass(frozen=True, order=False)
class Triple:
    """A subject-predicate-object assertion. Groundness is checked on insert."""

    subject: Term
    predicate: Term
    object: Term

    def is_ground(self) -> bool:
        return not any(isinstance(t, Variable) for t in (self.subject, self.predicate, self.object))

    def sort_key(self) -> tuple:
        return (term_key(self.subject), term_key(self.predicate), term_key(self.object))


def _check_storable(t: Triple) -> None:
    if not t.is_ground():
        raise NonGroundTriple(f"triple contains a variable: {t}")
    if not isinstance(t.subject, Iri):
        raise TypeError(f"triple subject must be an IRI, got {type(t.subject).__name__}")
    if not isinstance(t.predicate, Iri):
        raise TypeError(f"triple predicate must be an IRI, got {type(t.predicate).__name__}")


@dataclass(frozen=True)
class Graph:
    """An immutable set of ground triples."""

    triples: frozenset[Triple] = field(default_factory=frozenset)

    @staticmethod
    def of(triples: Iterable[Triple] = ()) -> "Graph":
        ts = frozenset(triples)
        for t in ts:
            _check_storable(t)
        return Graph(ts)

    def add(self, t: Triple) -> "Graph":
        _check_storable(t)
        if t in self.triples:
            return self
        return Graph(self.triples | {t})

    def add_all(self, ts: Iterable[Triple]) -> "Graph":
        new = frozenset(ts) - self.triples
        for t in new:
            _check_storable(t)
        if not new:
            return self
        return Graph(self.triples | new)

    def __contains__(self, t: Triple) -> bool:
        return t in self.triples

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self.triples, key=Triple.sort_key))


def assert_triple(graph: Graph, t: Triple) -> Graph:
    """Return a graph containing ``t``; a no-op if it is already present."""
    return graph.add(t)


# ---------------------------------------------------------------------------
# Pattern matching

Pattern = tuple[Term, Term, Term]
Binding = dict[str, Node]


def _unify(pattern_term: Term, value: Node, binding: Binding) -> bool:
    if isinstance(pattern_term, Variable):
        bound = binding.get(pattern_term.name)
        if bound is None:
            binding[pattern_term.name] = value
            return True
        return bound == value
    return pattern_term == value


def match(graph: Graph, pattern: Pattern) -> list[Binding]:
    """All variable bindings under which ``pattern`` occurs in ``graph``.

    A pattern without variables acts as a boolean query: one empty binding if
    the triple is present, none otherwise. Results are sorted by the bound
    terms in variable-name order, so output is deterministic.
    """
    results: list[Binding] = []
    for t in graph.triples:
        binding: Binding = {}
        if (
            _unify(pattern[0], t.subject, binding)
            and _unify(pattern[1], t.predicate, binding)
            and _unify(pattern[2], t.object, binding)
        ):
            results.append(binding)
    results.sort(key=lambda b: tuple(term_key(b[name]) for name in sorted(b)))
    return results


# ---------------------------------------------------------------------------
# Schema vocabulary

CC_NS = "https://privcomp.example/ns#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

PREFIXES = (("cc", CC_NS), ("rdf", RDF_NS), ("xsd", XSD_NS))


def cc(local: str) -> Iri:
    return Iri(CC_NS + local)


RDF_TYPE = Iri(RDF_NS + "type")

# Classes
PROVIDERS = cc("Providers")
REGULATIONS = cc("Regulations")
GDPR_CHAPTER = cc("GDPR_Chapter")
GDPR_ARTICLES = cc("GDPR_Articles")
GDPR_OBLIGATIONS = cc("GDPR_Obligations")

# Object properties
HAS_REGULATION = cc("hasRegulation")
COMPLIES_WITH_SECTION = cc("compliesWithSection")
REQUIRES_COMPLIANCE_WITH = cc("requiresComplianceWith")
PART_OF_CHAPTER = cc("partOfChapter")
DEFINES_OBLIGATIONS_FOR = cc("definesObligationsFor")

# Data properties
HAS_CHAPTER_INDEX = cc("hasChapterIndex")
HAS_SECTION_INDEX = cc("hasSectionIndex")
HAS_SECTION_TEXT = cc("hasSectionText")
HAS_SECTION_URL = cc("hasSectionURL")

# Obligation instances, one per role
ROLE_INSTANCES: dict[ObligationRole, Iri] = {
    ObligationRole.CONSUMER: cc("Consumer_Obligations"),
    ObligationRole.COMMON: cc("Common_Obligations"),
    ObligationRole.DATA_SUBJECT: cc("Data_Subject_Obligations"),
    ObligationRole.GENERAL: cc("General_Obligations"),
    ObligationRole.PROVIDER: cc("Provider_Obligations"),
}

ALL_VOCABULARY: tuple[Iri, ...] = (
    PROVIDERS,
    REGULATIONS,
    GDPR_CHAPTER,
    GDPR_ARTICLES,
    GDPR_OBLIGATIONS,
    HAS_REGULATION,
    COMPLIES_WITH_SECTION,
    REQUIRES_COMPLIANCE_WITH,
    PART_OF_CHAPTER,
    DEFINES_OBLIGATIONS_FOR,
    HAS_CHAPTER_INDEX,
    HAS_SECTION_INDEX,
    HAS_SECTION_TEXT,
    HAS_SECTION_URL,
    *ROLE_INSTANCES.values(),
    RDF_TYPE,
)


def chapter_iri(regulation_id: str, index: int) -> Iri:
    return cc(f"{regulation_id}_Chapter_{index}")

def article_iri(regulation_id: str, number: int) -> Iri:
    return cc(f"{regulation_id}_Article_{number}")

def provider_iri(provider_id: str) -> Iri:
    return cc(provider_id)

def regulation_iri(regulation_id: str) -> Iri:
    return cc(regulation_id)


# ---------------------------------------------------------------------------
# Turtle serialization

# Local part of a prefixed name; dots allowed inside but not at the end.
_PN_LOCAL = re.compile(r"[A-Za-z0-9_]([A-Za-z0-9_.-]*[A-Za-z0-9_-])?$")

_STR_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_STR_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def _escape_string(s: str) -> str:
    return "".join(_STR_ESCAPES.get(c, c) for c in s)


def _render_iri(iri: Iri) -> str:
    for prefix, ns in PREFIXES:
        if iri.value.startswith(ns):
            local = iri.value[len(ns):]
            if local and _PN_LOCAL.match(local):
                return f"{prefix}:{local}"
    return f"<{iri.value}>"


def _render_term(term: Node) -> str:
    if isinstance(term, Iri):
        if term == RDF_TYPE:
            return "a"
        return _render_iri(term)
    if term.datatype == "integer":
        return term.lexical
    if term.datatype == "anyURI":
        return f'"{_escape_string(term.lexical)}"^^xsd:anyURI'
    return f'"{_escape_string(term.lexical)}"'


def serialize_turtle(graph: Graph) -> str:
    """Deterministic Turtle text: fixed prefix block, then sorted triples."""
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in PREFIXES]
    lines.append("")
    for t in graph:
        subj = _render_iri(t.subject)
        pred = _render_term(t.predicate)
        obj = _render_term(t.object)
        lines.append(f"{subj} {pred} {obj} .")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Turtle parsing

_PREFIX_LINE = re.compile(r"@prefix\s+([A-Za-z][\w-]*)?:\s+<([^<>\s]+)>\s*\.\s*$")

_TOKEN = re.compile(
    r"""
    \s*(
        <[^<>\s]*>                               # iriref
      | "(?:[^"\\]|\\.)*"(?:\^\^[A-Za-z][\w-]*:[A-Za-z][\w.-]*)?   # string literal
      | -?[0-9]+                                 # integer
      | [A-Za-z][\w-]*:[A-Za-z0-9_][\w.-]*       # prefixed name
      | a(?![\w.-])                              # type shorthand
      | \.
    )
    """,
    re.VERBOSE,
)


def _unescape_string(s: str, line_no: int) -> str:
    out, i = [], 0
    while i < len(s):
        c = s[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        if i + 1 >= len(s):
            raise TurtleSyntax("dangling escape in string literal", line_no)
        nxt = s[i + 1]
        if nxt in _STR_UNESCAPES:
            out.append(_STR_UNESCAPES[nxt])
            i += 2
        elif nxt == "u" and i + 6 <= len(s):
            out.append(chr(int(s[i + 2:i + 6], 16)))
            i += 6
        else:
            raise TurtleSyntax(f"unsupported escape \\{nxt}", line_no)
    return "".join(out)


def _parse_term(token: str, prefixes: dict[str, str], line_no: int) -> Node:
    if token == "a":
        return RDF_TYPE
    if token.startswith("<"):
        return Iri(token[1:-1])
    if token.startswith('"'):
        m = re.match(r'^"((?:[^"\\]|\\.)*)"(?:\^\^(\S+))?$', token)
        if not m:
            raise TurtleSyntax(f"bad literal token: {token}", line_no)
        lexical = _unescape_string(m.group(1), line_no)
        dt = m.group(2)
        if dt is None:
            return Literal(lexical, "string")
        if dt == "xsd:anyURI":
            return Literal(lexical, "anyURI")
        if dt == "xsd:integer":
            return Literal(lexical, "integer")
        raise TurtleSyntax(f"unsupported literal datatype: {dt}", line_no)
    if re.match(r"^-?[0-9]+$", token):
        return Literal(token, "integer")
    prefix, _, local = token.partition(":")
    if prefix not in prefixes:
        raise TurtleSyntax(f"undeclared prefix: {prefix}", line_no)
    return Iri(prefixes[prefix] + local)


def parse_turtle(text: str) -> Graph:
    """Parse the Turtle subset produced by :func:`serialize_turtle`."""
    prefixes: dict[str, str] = {}
    triples: list[Triple] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@prefix"):
            m = _PREFIX_LINE.match(line)
            if not m:
                raise TurtleSyntax("malformed @prefix line", line_no)
            prefixes[m.group(1) or ""] = m.group(2)
            continue
        tokens, pos = [], 0
        while pos < len(line):
            m = _TOKEN.match(line, pos)
            if not m:
                raise TurtleSyntax(f"unrecognized token at column {pos + 1}", line_no)
            tokens.append(m.group(1))
            pos = m.end()
            if line[pos:].strip() == "" and tokens[-1] == ".":
                break
        if len(tokens) != 4 or tokens[3] != ".":
            raise TurtleSyntax("expected 'subject predicate object .'", line_no)
        s = _parse_term(tokens[0], prefixes, line_no)
        p = _parse_term(tokens[1], prefixes, line_no)
        o = _parse_term(tokens[2], prefixes, line_no)
        if not isinstance(s, Iri) or not isinstance(p, Iri):
            raise TurtleSyntax("subject and predicate must be IRIs", line_no)
        triples.append(Triple(s, p, o))
    return Graph.of(triples)


# ---------------------------------------------------------------------------
# Schema population


def populate_regulation(
    graph: Graph, doc: RegulationDoc, obligations: list[ObligationAssignment]
) -> Graph:
    """Assert the regulation's chapters, articles and obligation assignments.

    Per chapter: a typed instance plus its index. Per article: a typed
    instance, its number, the concatenated paragraph text, its URL when
    present, and the link to its chapter. The five obligation instances are
    always typed; each assignment adds one definesObligationsFor triple.
    """
    known = {a.number for ch in doc.chapters for a in ch.articles}
    for ob in obligations:
        if ob.article_number not in known:
            raise UnknownArticle(f"obligation references unknown article {ob.article_number}")
    triples: list[Triple] = []
    for chap in doc.chapters:
        c_iri = chapter_iri(doc.regulation_id, chap.index)
        triples.append(Triple(c_iri, RDF_TYPE, GDPR_CHAPTER))
        triples.append(Triple(c_iri, HAS_CHAPTER_INDEX, integer(chap.index)))
        for art in chap.articles:
            a_iri = article_iri(doc.regulation_id, art.number)
            text = "\n".join(p.text for p in art.paragraphs)
            triples.append(Triple(a_iri, RDF_TYPE, GDPR_ARTICLES))
            triples.append(Triple(a_iri, HAS_SECTION_INDEX, integer(art.number)))
            triples.append(Triple(a_iri, HAS_SECTION_TEXT, string(text)))
            if art.source_url is not None:
                triples.append(Triple(a_iri, HAS_SECTION_URL, any_uri(art.source_url)))
            triples.append(Triple(a_iri, PART_OF_CHAPTER, c_iri))
    for inst in ROLE_INSTANCES.values():
        triples.append(Triple(inst, RDF_TYPE, GDPR_OBLIGATIONS))
    for ob in obligations:
        a_iri = article_iri(doc.regulation_id, ob.article_number)
        triples.append(Triple(a_iri, DEFINES_OBLIGATIONS_FOR, ROLE_INSTANCES[ob.role]))
    return graph.add_all(triples)


def populate_provider(graph: Graph, provider_id: str, regulation_id: str) -> Graph:
    """Assert a provider instance linked to its regulation."""
    p_iri = provider_iri(provider_id)
    r_iri = regulation_iri(regulation_id)
    return graph.add_all(
        [
            Triple(p_iri, RDF_TYPE, PROVIDERS),
            Triple(r_iri, RDF_TYPE, REGULATIONS),
            Triple(p_iri, HAS_REGULATION, r_iri),
        ]
    )


def find_article_by_number(graph: Graph, number: int) -> Iri:
    """Resolve an article instance from its number via hasSectionIndex."""
    x = Variable("x")
    for binding in match(graph, (x, HAS_SECTION_INDEX, integer(number))):
        candidate = binding["x"]
        if isinstance(candidate, Iri) and Triple(candidate, RDF_TYPE, GDPR_ARTICLES) in graph:
            return candidate
    raise UnknownArticle(f"no article with number {number} in graph")


def require_provider(graph: Graph, provider_id: str) -> Iri:
    p_iri = provider_iri(provider_id)
    if Triple(p_iri, RDF_TYPE, PROVIDERS) not in graph:
        raise UnknownProvider(f"provider {provider_id!r} not present in graph")
    return p_iri
