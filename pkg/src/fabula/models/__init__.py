from .bundle import (ModelManifest, PipelineBundle, Stage, StageModel,
                     load_bundle, load_stage, read_manifest, save_stage)
from .config import Seq2SeqConfig
from .fillers import (DEFAULT_WINDOW, ContextMode, MentionContext,
                      ReferenceFiller, bag_of_words, candidate_strings,
                      coref_fill_predict, coref_source, fill_examples,
                      mention_contexts, ner_fill_predict, ner_source,
                      score_mention)
from .pointer import (DEFAULT_COPY_THRESHOLD, CopyDecision, build_verb_mask,
                      decode_step_with_copy, pointer_copy_prob)
from .seq2seq import (DecoderOutput, DecodingModel, Seq2SeqModel, StepOutput,
                      build_model)
from .trainer import (Batch, EncodedPair, TrainConfig, TrainResult, collate,
                      copy_targets, encode_pairs, evaluate_nll, stage_losses,
                      train_model)

__all__ = [
    'ModelManifest', 'PipelineBundle', 'Stage', 'StageModel', 'load_bundle',
    'load_stage', 'read_manifest', 'save_stage',
    'Seq2SeqConfig',
    'DEFAULT_WINDOW', 'ContextMode', 'MentionContext', 'ReferenceFiller',
    'bag_of_words', 'candidate_strings', 'coref_fill_predict',
    'coref_source', 'fill_examples', 'mention_contexts', 'ner_fill_predict',
    'ner_source', 'score_mention',
    'DEFAULT_COPY_THRESHOLD', 'CopyDecision', 'build_verb_mask',
    'decode_step_with_copy', 'pointer_copy_prob',
    'DecoderOutput', 'DecodingModel', 'Seq2SeqModel', 'StepOutput',
    'build_model',
    'Batch', 'EncodedPair', 'TrainConfig', 'TrainResult', 'collate',
    'copy_targets', 'encode_pairs', 'evaluate_nll', 'stage_losses',
    'train_model',
]
