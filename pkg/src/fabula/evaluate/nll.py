"""Per-stage negative log-likelihood under teacher forcing."""

import logging

from ..decompose import StageExamples
from ..errors import ValidationError
from ..models import (PipelineBundle, Seq2SeqModel, encode_pairs,
                      evaluate_nll, fill_examples)

logger = logging.getLogger(__name__)


def stage_nll_report(bundle: PipelineBundle, examples: StageExamples, batch_size: int = 16) -> dict[str, float]:
    """Mean per-token NLL in nats for each stage the bundle has.

    `plan` is the first stage of plan schemes, `story` the story given its
    plan or prompt, and `fill` the references given the anonymized story.
    """
    if examples.scheme is not bundle.scheme:
        raise ValidationError(f"examples are for {examples.scheme.value}, models for {bundle.scheme.value}")
    report: dict[str, float] = {}
    if bundle.plan is not None and examples.plan:
        pairs = encode_pairs(examples.plan, bundle.plan.source_vocab, bundle.plan.target_vocab)
        report["plan"] = evaluate_nll(bundle.plan.model, pairs, batch_size)
    if examples.story:
        pairs = encode_pairs(examples.story, bundle.story.source_vocab, bundle.story.target_vocab)
        report["story"] = evaluate_nll(bundle.story.model, pairs, batch_size)
    filler = bundle.filler
    if filler is not None and examples.fill and isinstance(filler.model, Seq2SeqModel):
        token_pairs = [
            pair
            for story in examples.fill
            for pair in fill_examples(
                story, filler.target_vocab.scheme, filler.merges, filler.context_mode, filler.window
            )
        ]
        pairs = encode_pairs(token_pairs, filler.source_vocab, filler.target_vocab)
        report["fill"] = evaluate_nll(filler.model, pairs, batch_size)
    for stage, nll in report.items():
        logger.info("%s NLL: %.4f nats/token", stage, nll)
    return report
