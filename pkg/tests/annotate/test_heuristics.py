"""Test cases for the fallback annotators."""

import pytest

from fabula.annotate import (EntityLabel, Gazetteer, Span, VerbLexicon,
                             heuristic_coref, heuristic_ner, heuristic_srl)
from fabula.annotate.base import EntityMention
from fabula.corpus import Story
from fabula.errors import ValidationError


def _mention(story, start, end):
    span = Span(start, end)
    return EntityMention(span=span, label=EntityLabel.PERSON, surface=span.tokens(story))


def test_srl_single_frame(lexicon):
    """Test ARG0 and ARG1 are the chunks around the verb."""
    story = Story.from_text("John ate the cake .")
    frames = heuristic_srl(story, lexicon)
    assert len(frames) == 1
    assert frames[0].predicate == Span(1, 2)
    assert frames[0].arguments == (("ARG0", Span(0, 1)), ("ARG1", Span(2, 4)))


def test_srl_no_verb(lexicon):
    """Test a sentence without lexicon verbs has no frame."""
    assert heuristic_srl(Story.from_text("The old grey cat ."), lexicon) == []


def test_srl_two_verbs(lexicon):
    """Test two verbs give two frames in textual order, chunks stopping at conjunctions."""
    story = Story.from_text("John ate the cake and drank the tea .")
    frames = heuristic_srl(story, lexicon)
    assert [f.predicate for f in frames] == [Span(1, 2), Span(5, 6)]
    assert frames[1].arguments == (("ARG1", Span(6, 8)),)


def test_srl_reference_story(story, lexicon):
    """Test frames over the shared fixture story."""
    frames = heuristic_srl(story, lexicon)
    assert [(f.predicate.start, f.sentence_index) for f in frames] == [(1, 0), (9, 1), (14, 2)]
    assert frames[0].arguments == (("ARG0", Span(0, 1)), ("ARG1", Span(2, 4)))
    assert frames[2].arguments == (("ARG0", Span(13, 14)),)


def test_srl_deterministic(story, lexicon):
    """Test repeated runs agree."""
    assert heuristic_srl(story, lexicon) == heuristic_srl(story, lexicon)


def test_ner_capitalized_run():
    """Test a capitalized run mid-sentence is one PERSON mention."""
    story = Story.from_text("Then he met Bilbo Baggins there .")
    mentions = heuristic_ner(story)
    assert [m.surface for m in mentions] == [("Bilbo", "Baggins")]
    assert mentions[0].label is EntityLabel.PERSON


def test_ner_lowercase_story():
    """Test no capitals and an empty gazetteer give no mentions."""
    assert heuristic_ner(Story.from_text("the king rode to gondor ."), Gazetteer()) == []


def test_ner_gazetteer_lowercase_hit():
    """Test gazetteer entries match case-insensitively with their label."""
    gazetteer = Gazetteer.from_lines(["LOC gondor"])
    mentions = heuristic_ner(Story.from_text("the king rode to gondor ."), gazetteer)
    assert [(m.span, m.label) for m in mentions] == [(Span(4, 5), EntityLabel.LOC)]


def test_ner_sentence_initial_name_repeats(story):
    """Test a sentence-initial token is a name only when seen elsewhere."""
    mentions = heuristic_ner(story)
    assert [m.span for m in mentions] == [Span(2, 4), Span(13, 14)]


def test_ner_sentence_initial_multi_token_name():
    """Test a run that starts a sentence is kept when it continues."""
    mentions = heuristic_ner(Story.from_text("Bilbo Baggins met Bilbo ."))
    assert [m.surface for m in mentions] == [("Bilbo", "Baggins"), ("Bilbo",)]


def test_gazetteer_rejects_unknown_label():
    """Test gazetteer labels are limited to PERSON, ORG and LOC."""
    with pytest.raises(ValidationError):
        Gazetteer.from_lines(["PLACE gondor"])


def test_coref_head_match():
    """Test a single token equal to the first token of a name corefers."""
    story = Story.from_tokens(["w"] * 3 + ["Bilbo", "Baggins"] + ["w"] * 15 + ["Bilbo", "."])
    mentions = [_mention(story, 3, 5), _mention(story, 20, 21)]
    clusters = heuristic_coref(mentions, story, [])
    assert len(clusters) == 1
    assert clusters[0].mentions == (Span(3, 5), Span(20, 21))


def test_coref_distinct_names():
    """Test unrelated singletons produce no clusters."""
    story = Story.from_text("then Frodo saw Gandalf .")
    mentions = [_mention(story, 1, 2), _mention(story, 3, 4)]
    assert heuristic_coref(mentions, story, []) == []


def test_coref_pronoun_nearest_antecedent():
    """Test a pronoun joins the group mentioned most recently before it."""
    tokens = ["w"] * 3 + ["Frodo"] + ["w"] * 2 + ["Sam"] + ["w"] + ["x", "he", "."]
    story = Story.from_tokens(tokens)
    mentions = [_mention(story, 3, 4), _mention(story, 6, 7)]
    clusters = heuristic_coref(mentions, story, ["he"])
    assert [c.mentions for c in clusters] == [(Span(6, 7), Span(9, 10))]


def test_coref_pronoun_at_index_nine():
    """Test "he" at 9 after a single mention at 3 forms a cluster with it."""
    story = Story.from_tokens(["w"] * 3 + ["Frodo"] + ["w"] * 5 + ["he", "."])
    clusters = heuristic_coref([_mention(story, 3, 4)], story, ["he"])
    assert clusters[0].mentions == (Span(3, 4), Span(9, 10))


def test_coref_reference_story(annotated):
    """Test the fixture story clusters Bilbo Baggins, He and Bilbo."""
    assert [c.mentions for c in annotated.clusters] == [(Span(2, 4), Span(8, 9), Span(13, 14))]


def test_lemma_lexicon_first_then_suffix(lexicon):
    """Test irregular forms come from the lexicon and regular ones from suffix rules."""
    assert lexicon.lemma("ate") == "eat"
    assert lexicon.lemma("eating") == "eat"
    assert lexicon.lemma("running") == "run"
    assert lexicon.lemma("tried") == "try"
    assert lexicon.lemma("laughed") == "laugh"
    assert lexicon.lemma("Hoped") == "hope"
    assert lexicon.lemma("cake") == "cake"


def test_custom_lexicon_from_lines():
    """Test a lexicon file with comments and irregular forms."""
    lexicon = VerbLexicon.from_lines(["# verbs", "glorp glarp", ""])
    assert lexicon.is_verb("glarp")
    assert lexicon.is_verb("glorps")
    assert not lexicon.is_verb("eat")
