from .base import (BOS, CLOSING_QUOTES, END_OF_WORD, EOS, FRAME, MENTION,
                   NEWLINE, NULL, PAD, SENT, SENTENCE_END, SEP, SPACE_MARKER,
                   UNK, ParallelExample, Prompt, Story, TokenScheme,
                   is_placeholder, placeholder_index, placeholder_token,
                   sentence_boundaries)
from .dataset import (DEFAULT_MAX_WORDS, load_dataset, read_lines,
                      read_token_lines, truncate_story, write_lines,
                      write_token_lines)
from .tokenize import (MergeTable, apply_bpe, detokenize, learn_bpe,
                       load_merges, save_merges, tokenize)
from .vocab import DEFAULT_PLACEHOLDERS, Vocabulary, build_vocab, special_tokens

__all__ = [
    'BOS', 'CLOSING_QUOTES', 'END_OF_WORD', 'EOS', 'FRAME', 'MENTION',
    'NEWLINE', 'NULL', 'PAD', 'SENT', 'SENTENCE_END', 'SEP', 'SPACE_MARKER',
    'UNK', 'ParallelExample', 'Prompt', 'Story', 'TokenScheme',
    'is_placeholder', 'placeholder_index', 'placeholder_token',
    'sentence_boundaries',
    'DEFAULT_MAX_WORDS', 'load_dataset', 'read_lines', 'read_token_lines',
    'truncate_story', 'write_lines', 'write_token_lines',
    'MergeTable', 'apply_bpe', 'detokenize', 'learn_bpe', 'load_merges',
    'save_merges', 'tokenize',
    'DEFAULT_PLACEHOLDERS', 'Vocabulary', 'build_vocab', 'special_tokens',
]
