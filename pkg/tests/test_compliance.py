"""Compliance recording, gap arithmetic and report rendering."""

import random

import pytest

import complygraph as cg
from complygraph import compliance, kg
from complygraph.errors import UnknownArticle, UnknownProvider


def _graph(n_articles=10, provider="p.example"):
    lines = ["#REG R T", "#CH 1 C"]
    for i in range(1, n_articles + 1):
        lines += [f"#ART {i} Title number {i}", "#P 1", f"Body text for article {i}."]
    doc = cg.parse_regulation("\n".join(lines) + "\n")
    g = cg.populate_regulation(cg.Graph.of(), doc, [])
    return cg.populate_provider(g, provider, "R")


def _require(g, provider, articles):
    p = kg.provider_iri(provider)
    return g.add_all(
        kg.Triple(p, kg.REQUIRES_COMPLIANCE_WITH, kg.article_iri("R", n)) for n in articles
    )


def test_record_compliance_two_articles_idempotent():
    g = _graph()
    once = cg.record_compliance(g, "p.example", {5, 7})
    assert len(once) == len(g) + 2
    twice = cg.record_compliance(once, "p.example", {5, 7})
    assert len(twice) == len(once)


def test_record_compliance_unknown_article():
    g = _graph()
    with pytest.raises(UnknownArticle):
        cg.record_compliance(g, "p.example", {999})


def test_record_compliance_unknown_provider():
    g = _graph()
    with pytest.raises(UnknownProvider):
        cg.record_compliance(g, "nobody.example", {1})


def test_record_compliance_growth_equals_new_articles():
    rng = random.Random(7)
    g = _graph(20)
    recorded: set = set()
    for _ in range(10):
        batch = {rng.randint(1, 20) for _ in range(rng.randint(1, 6))}
        before = len(g)
        g = cg.record_compliance(g, "p.example", batch)
        assert len(g) - before == len(batch - recorded)
        recorded |= batch


def test_gap_basic_set_difference():
    g = _require(_graph(), "p.example", {1, 2, 3, 4, 5})
    g = cg.record_compliance(g, "p.example", {2, 4})
    report = cg.compute_gap(g, "p.example")
    assert report.required == (1, 2, 3, 4, 5)
    assert report.complied == (2, 4)
    assert report.missing == (1, 3, 5)


def test_gap_fully_compliant_when_complied_superset():
    g = _require(_graph(), "p.example", {1, 2})
    g = cg.record_compliance(g, "p.example", {1, 2, 3})
    report = cg.compute_gap(g, "p.example")
    assert report.missing == ()


def test_gap_unknown_provider():
    with pytest.raises(UnknownProvider):
        cg.compute_gap(_graph(), "ghost.example")


def test_gap_equals_match_query_formulation():
    rng = random.Random(3)
    g0 = _graph(15)
    required = {rng.randint(1, 15) for _ in range(8)}
    complied = {rng.randint(1, 15) for _ in range(5)}
    g = _require(g0, "p.example", required)
    g = cg.record_compliance(g, "p.example", complied)
    report = cg.compute_gap(g, "p.example")

    p = kg.provider_iri("p.example")
    x = kg.Variable("x")
    req_nodes = {b["x"] for b in cg.match(g, (p, kg.REQUIRES_COMPLIANCE_WITH, x))}
    comp_nodes = {b["x"] for b in cg.match(g, (p, kg.COMPLIES_WITH_SECTION, x))}
    numbers = compliance._article_numbers(g)
    assert set(report.missing) == {numbers[n] for n in req_nodes - comp_nodes}


def test_recording_required_article_removes_it_from_missing():
    g = _require(_graph(), "p.example", {1, 2, 3})
    g = cg.record_compliance(g, "p.example", {1})
    assert cg.compute_gap(g, "p.example").missing == (2, 3)
    g = cg.record_compliance(g, "p.example", {2})
    assert cg.compute_gap(g, "p.example").missing == (3,)
    # complying with a non-required article changes nothing
    g = cg.record_compliance(g, "p.example", {9})
    assert cg.compute_gap(g, "p.example").missing == (3,)


def test_details_title_excerpt_url_chapter(mini_regulation):
    assignments = cg.load_obligation_map("4,Provider", mini_regulation)
    g = cg.populate_regulation(cg.Graph.of(), mini_regulation, assignments)
    g = cg.populate_provider(g, "p.example", "MINIREG")
    g = cg.infer_fixpoint(g, cg.builtin_rules())
    report = cg.compute_gap(g, "p.example")
    assert report.missing == (4,)
    detail = report.details[4]
    assert detail.number == 4
    assert detail.url == "https://minireg.example/articles/4"
    assert detail.chapter_index == 2
    assert len(detail.title) <= compliance.TITLE_WIDTH
    assert len(detail.excerpt) <= compliance.EXCERPT_WIDTH
    assert "\n" not in detail.excerpt


def test_human_report_fully_compliant_line():
    g = _require(_graph(), "p.example", {1})
    g = cg.record_compliance(g, "p.example", {1})
    text = cg.render_report(cg.compute_gap(g, "p.example"), "human")
    assert "Fully compliant: all 1 required articles are complied with." in text
    assert text.endswith("\n")


def test_human_report_missing_block_with_roman_chapter():
    g = _require(_graph(), "p.example", {3})
    text = cg.render_report(cg.compute_gap(g, "p.example"), "human")
    assert "Compliance report for p.example" in text
    assert "missing articles: 1" in text
    assert "  Article 3 [Chapter I]: Body text for article 3." in text


def test_machine_report_exact_layout():
    g = _require(_graph(), "p.example", {2, 5})
    g = cg.record_compliance(g, "p.example", {5})
    text = cg.render_report(cg.compute_gap(g, "p.example"), "machine")
    assert text == (
        "provider p.example required 2 complied 1 missing 1\n"
        "missing 2 Body text for article 2.\n"
    )


def test_reports_byte_stable():
    g = _require(_graph(), "p.example", {1, 4, 9})
    report = cg.compute_gap(g, "p.example")
    for fmt in ("human", "machine"):
        assert cg.render_report(report, fmt) == cg.render_report(report, fmt)


def test_render_report_rejects_unknown_format():
    g = _require(_graph(), "p.example", {1})
    with pytest.raises(ValueError):
        cg.render_report(cg.compute_gap(g, "p.example"), "json")


def test_roman_numerals():
    assert [compliance._roman(n) for n in (1, 4, 9, 11, 40, 90, 400, 1990)] == [
        "I", "IV", "IX", "XI", "XL", "XC", "CD", "MCMXC",
    ]
