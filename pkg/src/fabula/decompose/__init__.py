from .anonymize import (AnonymizedStory, EntityScheme, Fills,
                        PlaceholderSlot, PlaceholderTable, anonymize_coref,
                        anonymize_ner, deanonymize, gold_fills)
from .plan import SrlPlan, plan_source, serialize_srl_plan, verb_positions
from .posterior import (AnnotatedExample, DecompositionScheme, StageExamples,
                        anonymize, anonymized_plan, build_posterior,
                        build_stage_examples, entity_scheme)
from .records import (PlaceholderTableRecord, SlotRecord, read_decomposition,
                      table_from_record, table_to_record, write_decomposition)

__all__ = [
    'AnonymizedStory', 'EntityScheme', 'Fills', 'PlaceholderSlot',
    'PlaceholderTable', 'anonymize_coref', 'anonymize_ner', 'deanonymize',
    'gold_fills',
    'SrlPlan', 'plan_source', 'serialize_srl_plan', 'verb_positions',
    'AnnotatedExample', 'DecompositionScheme', 'StageExamples', 'anonymize',
    'anonymized_plan', 'build_posterior', 'build_stage_examples',
    'entity_scheme',
    'PlaceholderTableRecord', 'SlotRecord', 'read_decomposition',
    'table_from_record', 'table_to_record', 'write_decomposition',
]
