"""Forward chaining over the graph with positive Horn rules.

Rules are pure conjunctive bodies with a single head atom; class membership
atoms ``C(?x)`` are encoded as ``(rdf:type, ?x, C)`` so one matching routine
serves everything. Evaluation is naive bottom-up to the least fixpoint,
which always terminates because rules introduce no new terms.

Rule file surface syntax, one rule per line::

    S1: Cloud_Providers(?p) ^ definesObligationsFor(?a, Provider_Obligations) -> requiresComplianceWith(?p, ?a)

Bare names resolve in the ``cc:`` namespace; ``Cloud_Providers`` is an alias
for the ``Providers`` class. ``#`` comments and blank lines are allowed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import kg
from .errors import EmptyRoleSet, IterationCap, MalformedSource
from .kg import Graph, Iri, Term, Triple, Variable, match
from .regulation import ObligationRole

ITERATION_CAP = 10_000

# Fixed rule names per role; the provider and common rules carry the names
# used in the deployed ruleset, the rest extend the same scheme.
ROLE_RULE_NAMES: dict[ObligationRole, str] = {
    ObligationRole.PROVIDER: "S1",
    ObligationRole.COMMON: "S2",
    ObligationRole.CONSUMER: "S3",
    ObligationRole.DATA_SUBJECT: "S4",
    ObligationRole.GENERAL: "S5",
}

DEFAULT_ROLES = frozenset({ObligationRole.PROVIDER, ObligationRole.COMMON})

# Class-name aliases accepted in rule text.
CLASS_ALIASES = {"Cloud_Providers": kg.PROVIDERS}


@dataclass(frozen=True)
class RuleAtom:
    """One body or head atom; the predicate is always ground."""

    predicate: Iri
    subject: Term
    object: Term

    def variables(self) -> set[str]:
        return {t.name for t in (self.subject, self.object) if isinstance(t, Variable)}

    def substitute(self, binding: dict[str, kg.Node]) -> "RuleAtom":
        def sub(t: Term) -> Term:
            if isinstance(t, Variable) and t.name in binding:
                return binding[t.name]
            return t

        return RuleAtom(self.predicate, sub(self.subject), sub(self.object))


def class_atom(term: Term, cls: Iri) -> RuleAtom:
    """Encode ``Class(term)`` as a type-predicate atom."""
    return RuleAtom(kg.RDF_TYPE, term, cls)


@dataclass(frozen=True)
class Rule:
    name: str
    body: tuple[RuleAtom, ...]
    head: RuleAtom

    def __post_init__(self):
        if not self.body:
            raise ValueError(f"rule {self.name}: body must be non-empty")
        body_vars = set().union(*(a.variables() for a in self.body))
        unsafe = self.head.variables() - body_vars
        if unsafe:
            raise ValueError(
                f"rule {self.name}: head variables {sorted(unsafe)} not bound in body"
            )


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]

    def __post_init__(self):
        names = [r.name for r in self.rules]
        if len(names) != len(set(names)):
            raise ValueError("rule names must be unique")

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


def builtin_rules(roles: set[ObligationRole] = DEFAULT_ROLES) -> RuleSet:
    """One requiresComplianceWith rule per obligation role.

    Each rule binds providers to every article whose obligations target the
    given role. The default role set covers provider and common obligations
    only.
    """
    if not roles:
        raise EmptyRoleSet("builtin_rules needs at least one role")
    p = Variable("cloud_provider")
    a = Variable("gdpr_article")
    rules = []
    for role in roles:
        rules.append(
            Rule(
                name=ROLE_RULE_NAMES[role],
                body=(
                    class_atom(p, kg.PROVIDERS),
                    class_atom(a, kg.GDPR_ARTICLES),
                    RuleAtom(kg.DEFINES_OBLIGATIONS_FOR, a, kg.ROLE_INSTANCES[role]),
                ),
                head=RuleAtom(kg.REQUIRES_COMPLIANCE_WITH, p, a),
            )
        )
    rules.sort(key=lambda r: r.name)
    return RuleSet(tuple(rules))


def _head_triple(atom: RuleAtom) -> Triple | None:
    # An instantiation whose subject is a literal is not a storable triple.
    if not isinstance(atom.subject, Iri):
        return None
    return Triple(atom.subject, atom.predicate, atom.object)


def apply_rule(graph: Graph, rule: Rule) -> set[Triple]:
    """Head instantiations of one naive evaluation step, minus known triples."""
    bindings: list[dict[str, kg.Node]] = [{}]
    for atom in rule.body:
        next_bindings: list[dict[str, kg.Node]] = []
        for binding in bindings:
            ground = atom.substitute(binding)
            for extra in match(graph, (ground.subject, ground.predicate, ground.object)):
                merged = dict(binding)
                merged.update(extra)
                next_bindings.append(merged)
        bindings = next_bindings
        if not bindings:
            return set()
    new: set[Triple] = set()
    for binding in bindings:
        t = _head_triple(rule.head.substitute(binding))
        if t is not None and t.is_ground() and t not in graph:
            new.add(t)
    return new


def infer_fixpoint(graph: Graph, rules: RuleSet) -> Graph:
    """Run all rules round-synchronously until nothing new derives."""
    current = graph
    for _ in range(ITERATION_CAP):
        fresh: set[Triple] = set()
        for rule in rules:
            fresh |= apply_rule(current, rule)
        if not fresh:
            return current
        current = current.add_all(fresh)
    raise IterationCap(f"no fixpoint after {ITERATION_CAP} rounds")


# ---------------------------------------------------------------------------
# Rule file parsing

_RULE_LINE = re.compile(r"^([\w.-]+)\s*:\s*(.+?)\s*->\s*(.+)$")
_ATOM = re.compile(r"^([\w.-]+)\s*\(\s*([^,()\s]+)\s*(?:,\s*([^,()\s]+)\s*)?\)$")


def _parse_term(token: str) -> Term:
    if token.startswith("?"):
        if len(token) < 2:
            raise ValueError("empty variable name")
        return Variable(token[1:])
    if token in CLASS_ALIASES:
        return CLASS_ALIASES[token]
    return kg.cc(token)


def _parse_atom(text: str, line_no: int) -> RuleAtom:
    m = _ATOM.match(text.strip())
    if not m:
        raise MalformedSource(f"bad atom: {text.strip()!r}", line_no)
    name, first, second = m.group(1), m.group(2), m.group(3)
    try:
        if second is None:
            cls = CLASS_ALIASES.get(name, kg.cc(name))
            return class_atom(_parse_term(first), cls)
        pred = kg.cc(name)
        return RuleAtom(pred, _parse_term(first), _parse_term(second))
    except ValueError as exc:
        raise MalformedSource(str(exc), line_no) from None


def parse_rules(text: str) -> RuleSet:
    """Parse a rule file into a RuleSet; raises MalformedSource with the line."""
    rules: list[Rule] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _RULE_LINE.match(line)
        if not m:
            raise MalformedSource("expected 'name: Atom ^ Atom ... -> Atom'", line_no)
        name, body_text, head_text = m.groups()
        body = tuple(_parse_atom(part, line_no) for part in body_text.split("^"))
        head = _parse_atom(head_text, line_no)
        try:
            rules.append(Rule(name, body, head))
        except ValueError as exc:
            raise MalformedSource(str(exc), line_no) from None
    try:
        return RuleSet(tuple(rules))
    except ValueError as exc:
        raise MalformedSource(str(exc)) from None
