from .pipeline import ProvenanceRecord, run_pipeline
from .sampling import (STRUCTURAL_TOKENS, GeneratedSequence, GenerationConfig,
                       banned_ids, count_words, generate_sequence, is_word,
                       position_limit, sample_top_k, trim_to_words)

__all__ = [
    'ProvenanceRecord', 'run_pipeline',
    'STRUCTURAL_TOKENS', 'GeneratedSequence', 'GenerationConfig', 'banned_ids',
    'count_words', 'generate_sequence', 'is_word', 'position_limit',
    'sample_top_k', 'trim_to_words',
]
