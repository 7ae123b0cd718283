from .base import (CORE_ROLES, DEFAULT_PRONOUNS, AnnotatedStory,
                   CorefCluster, CorefResolver, EntityLabel, EntityMention,
                   EntityRecognizer, Span, SrlAnnotator, SrlFrame,
                   is_core_role)
from .heuristics import (Annotator, CapitalizationNer, LexiconSrl,
                         StringMatchCoref, heuristic_coref, heuristic_ner,
                         heuristic_srl)
from .lexicon import Gazetteer, VerbLexicon
from .records import (AnnotationRecord, ArgumentRecord, FrameRecord,
                      MentionRecord, export_annotations, import_annotations,
                      read_annotation_file, write_annotation_file)

__all__ = [
    'CORE_ROLES', 'DEFAULT_PRONOUNS', 'AnnotatedStory', 'CorefCluster',
    'CorefResolver', 'EntityLabel', 'EntityMention', 'EntityRecognizer',
    'Span', 'SrlAnnotator', 'SrlFrame', 'is_core_role',
    'Annotator', 'CapitalizationNer', 'LexiconSrl', 'StringMatchCoref',
    'heuristic_coref', 'heuristic_ner', 'heuristic_srl',
    'Gazetteer', 'VerbLexicon',
    'AnnotationRecord', 'ArgumentRecord', 'FrameRecord', 'MentionRecord',
    'export_annotations', 'import_annotations', 'read_annotation_file',
    'write_annotation_file',
]
