"""Test cases for the metrics report."""

import json

import pytest

from fabula.evaluate import (CorefRow, LcsRow, MetricsReport, RankingRow,
                             VerbRow)


@pytest.fixture
def report():
    return MetricsReport(
        scheme="srl-plan",
        seed=3,
        stories=2,
        stage_nll={"plan": 2.5, "story": 3.25},
        verbs=VerbRow(unique_verbs=4.0, diverse_percent=50.0, top_verbs=["go", "eat"], source="lexicon"),
        lcs=LcsRow(max=12.0, mean=4.5),
        ranking=[RankingRow(n=10, first=0.5, subsequent=0.25), RankingRow(n=50, first=0.1)],
        entity_names=2.0,
        coref=CorefRow(chains=1.0, names_per_chain=1.5),
    )


def test_tables_per_section(report):
    """Test every computed section becomes a named table."""
    tables = report.to_tables()
    assert list(tables) == [
        "stage_nll", "verb_diversity", "lcs", "entity_ranking", "entity_names", "coref_chains",
    ]
    assert tables["stage_nll"].loc["srl-plan", "story"] == 3.25
    assert tables["entity_ranking"].loc["first mentions", "rank 10"] == 0.5


def test_missing_sections_are_skipped():
    """Test a report with only NLLs renders one table."""
    report = MetricsReport(stage_nll={"story": 1.0})
    assert list(report.to_tables()) == ["stage_nll"]


def test_render_is_aligned_text(report):
    """Test rendering lists each section with fixed precision."""
    text = report.render()
    assert "== lcs ==" in text
    assert "12.0000" in text
    assert "verbs from lexicon" in text


def test_write_json_and_text(tmp_path, report):
    """Test writing produces a record that reloads and a text copy."""
    json_path, text_path = report.write(tmp_path / "out" / "report")
    assert MetricsReport.model_validate(json.loads(json_path.read_text())) == report
    assert text_path.read_text() == report.render()


def test_percentages_are_bounded():
    """Test out-of-range percentages are rejected."""
    with pytest.raises(ValueError):
        VerbRow(unique_verbs=1.0, diverse_percent=120.0, top_verbs=[], source="lexicon")
