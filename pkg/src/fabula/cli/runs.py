"""What each command does, given resolved settings.

Every function reads only the inputs `Settings.required_paths` names for
its command and writes under the run layout, so reruns with the same
settings rewrite the same files with the same bytes.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence

from ..annotate import (DEFAULT_PRONOUNS, AnnotatedStory, Annotator,
                        Gazetteer, VerbLexicon, export_annotations,
                        import_annotations, read_annotation_file,
                        write_annotation_file)
from ..corpus import (Prompt, Story, TokenScheme, Vocabulary, learn_bpe,
                      load_dataset, read_lines, read_token_lines,
                      write_lines, write_token_lines)
from ..decompose import (AnnotatedExample, DecompositionScheme,
                         StageExamples, build_stage_examples)
from ..decompose import entity_scheme as scheme_entities
from ..decompose import read_decomposition, write_decomposition
from ..errors import AlignmentError, ValidationError
from ..evaluate import (MetricsReport, VerbSource, corpus_lcs_stats,
                        coref_cluster_stats, entity_name_diversity,
                        entity_ranking, ranking_cases, stage_nll_report,
                        verb_diversity)
from ..evaluate.report import CorefRow, LcsRow, RankingRow, VerbRow
from ..generate import ProvenanceRecord, run_pipeline, trim_to_words
from ..models import (ModelManifest, Seq2SeqConfig, Stage, encode_pairs,
                      fill_examples, load_bundle, save_stage, train_model)
from ..models.bundle import MANIFEST
from ..seeding import numpy_generator
from .config import RunLayout, Settings
from .logging import get_progress

logger = logging.getLogger(__name__)


def _annotator(settings: Settings) -> Annotator:
    config = settings.annotate
    return Annotator.fallback(
        lexicon=VerbLexicon.load(config.verb_lexicon),
        gazetteer=Gazetteer.load(config.gazetteer),
        pronouns=config.pronouns or DEFAULT_PRONOUNS,
    )


def _stories(path: Path) -> list[Story]:
    return [Story.from_tokens(tokens) for tokens in read_token_lines(path)]


def _import(stories: Sequence[Story], path: Path) -> list[AnnotatedStory]:
    records = read_annotation_file(path)
    if len(records) != len(stories):
        raise AlignmentError(f"{path} has {len(records)} records for {len(stories)} stories")
    annotated = []
    for number, (story, record) in enumerate(zip(stories, records), start=1):
        try:
            annotated.append(import_annotations(story, record))
        except ValidationError as e:
            raise ValidationError(str(e), line=number) from e
    return annotated


def run_preprocess(settings: Settings) -> int:
    """Tokenize and truncate the dataset into the run's data directory."""
    layout = settings.layout
    examples = load_dataset(
        settings.paths.dataset_source,
        settings.paths.dataset_target,
        max_words=settings.corpus.max_story_words,
    )
    layout.data.mkdir(parents=True, exist_ok=True)
    write_token_lines(layout.prompts, [example.prompt.tokens for example in examples])
    write_token_lines(layout.stories, [example.story.tokens for example in examples])
    return len(examples)


def run_annotate(settings: Settings, import_file: Optional[Path] = None) -> int:
    """Annotate the preprocessed stories with the fallback annotators or an import."""
    layout = settings.layout
    stories = _stories(layout.stories)
    if import_file is not None:
        annotated = _import(stories, import_file)
    else:
        annotator = _annotator(settings)
        annotated = [annotator.annotate(story) for story in stories]
    write_annotation_file(layout.annotations, [export_annotations(story) for story in annotated])
    return len(annotated)


def run_decompose(settings: Settings) -> StageExamples:
    """Write the training pairs of every stage the scheme trains."""
    layout = settings.layout
    prompts = read_token_lines(layout.prompts)
    stories = _stories(layout.stories)
    if len(prompts) != len(stories):
        raise AlignmentError(f"{len(prompts)} prompts for {len(stories)} stories")
    annotated = _import(stories, layout.annotations)

    examples = StageExamples(scheme=settings.scheme)
    for number, (prompt, story) in enumerate(zip(prompts, annotated), start=1):
        example = AnnotatedExample(prompt=Prompt(text=" ".join(prompt), tokens=tuple(prompt)), annotated=story)
        try:
            examples.extend(build_stage_examples(
                example,
                settings.scheme,
                fill_scheme=settings.corpus.entity_scheme,
                max_placeholders=settings.corpus.num_placeholders,
            ))
        except ValidationError as e:
            raise ValidationError(str(e), line=number) from e

    layout.decomposed.mkdir(parents=True, exist_ok=True)
    for stage, pairs in [(Stage.PLAN, examples.plan), (Stage.STORY, examples.story)]:
        if pairs:
            source, target = layout.pairs(stage)
            write_token_lines(source, [src for src, _ in pairs])
            write_token_lines(target, [tgt for _, tgt in pairs])
    if examples.fill:
        write_decomposition(
            layout.fill_tokens, [story.tokens for story in examples.fill], layout.fill_tables, examples.fill
        )
    overflowed = sum(story.overflowed for story in examples.fill)
    if overflowed:
        logger.warning("%d stories had more entities than placeholders", overflowed)
    return examples


def _read_pairs(layout: RunLayout, stage: Stage) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    source, target = layout.pairs(stage)
    if not source.exists():
        return []
    sources, targets = read_token_lines(source), read_token_lines(target)
    if len(sources) != len(targets):
        raise AlignmentError(f"{source} and {target} differ in length")
    return [(tuple(src), tuple(tgt)) for src, tgt in zip(sources, targets)]


def read_stage_examples(settings: Settings) -> StageExamples:
    """Reload what `run_decompose` wrote."""
    layout = settings.layout
    examples = StageExamples(
        scheme=settings.scheme,
        plan=_read_pairs(layout, Stage.PLAN),
        story=_read_pairs(layout, Stage.STORY),
    )
    if layout.fill_tokens.exists():
        examples.fill = read_decomposition(layout.fill_tokens, layout.fill_tables)
    return examples


def build_vocabularies(settings: Settings, examples: StageExamples) -> tuple[Vocabulary, Vocabulary]:
    """Prompt vocabulary and the story-side vocabulary shared by plan and story models."""
    corpus = settings.corpus
    has_plan = settings.scheme.has_plan
    prompts = [src for src, _ in (examples.plan if has_plan else examples.story)]
    story_side = [tgt for _, tgt in examples.plan] + [tgt for _, tgt in examples.story]
    if has_plan:
        story_side += [src for src, _ in examples.story]
    return (
        Vocabulary.build(prompts, TokenScheme.WORD, corpus.prompt_vocab_size, corpus.num_placeholders),
        Vocabulary.build(story_side, TokenScheme.WORD, corpus.story_vocab_size, corpus.num_placeholders),
    )


def run_train(settings: Settings, stage: Stage | str) -> Path:
    """Train one stage and save it under the models directory."""
    stage = Stage(stage)
    scheme = settings.scheme
    if stage is Stage.PLAN and not scheme.has_plan:
        raise ValidationError(f"scheme {scheme.value} has no plan stage")
    if stage is Stage.FILL and not scheme.has_entities:
        raise ValidationError(f"scheme {scheme.value} has no fill stage")
    corpus = settings.corpus
    model_settings = settings.stage_model(stage)
    examples = read_stage_examples(settings)
    prompt_vocab, story_vocab = build_vocabularies(settings, examples)

    merges = None
    if stage is Stage.PLAN:
        source_vocab, target_vocab, pairs = prompt_vocab, story_vocab, examples.plan
    elif stage is Stage.STORY:
        source_vocab = story_vocab if scheme.has_plan else prompt_vocab
        target_vocab, pairs = story_vocab, examples.story
    else:
        if corpus.fill_scheme is TokenScheme.BPE:
            surfaces = [slot.text for story in examples.fill for slot in story.table.slots]
            merges = learn_bpe(surfaces, corpus.bpe_merges)
        pairs = [
            pair
            for story in examples.fill
            for pair in fill_examples(
                story, corpus.fill_scheme, merges, model_settings.context_mode, model_settings.window
            )
        ]
        source_vocab = Vocabulary.build(
            [src for src, _ in pairs], TokenScheme.WORD, corpus.story_vocab_size, corpus.num_placeholders
        )
        target_vocab = Vocabulary.build(
            [tgt for _, tgt in pairs], corpus.fill_scheme, corpus.fill_vocab_size, corpus.num_placeholders
        )

    model_config = Seq2SeqConfig.for_vocabularies(
        source_vocab,
        target_vocab,
        verb_head=model_settings.verb_head and stage is Stage.PLAN,
        pointer_head=model_settings.pointer_head and stage is Stage.STORY and scheme.has_entities,
        **model_settings.architecture(),
    )
    encoded = encode_pairs(pairs, source_vocab, target_vocab)
    with get_progress() as progress:
        task = progress.add_task(f"Training {stage.value} model", total=settings.train.epochs)
        result = train_model(
            encoded,
            model_config,
            settings.train,
            settings.seed,
            stage=stage.value,
            on_epoch=lambda epoch, nll: progress.update(task, advance=1),
        )
    manifest = ModelManifest(
        stage=stage,
        scheme=scheme,
        entity_scheme=scheme_entities(scheme, corpus.entity_scheme),
        seed=settings.seed,
        config=model_config,
        source_scheme=source_vocab.scheme,
        context_mode=model_settings.context_mode,
        window=model_settings.window,
        epoch_nll=result.epoch_nll,
    )
    return save_stage(settings.layout.models, manifest, result.model, source_vocab, target_vocab, merges)


def stages_for(scheme: DecompositionScheme) -> list[Stage]:
    stages = [Stage.PLAN] if scheme.has_plan else []
    stages.append(Stage.STORY)
    if scheme.has_entities:
        stages.append(Stage.FILL)
    return stages


def run_generate(
    settings: Settings,
    prompt_file: Optional[Path] = None,
    trim_words: Optional[int] = None,
) -> list[ProvenanceRecord]:
    """Generate one story per prompt line, with a provenance record each."""
    layout = settings.layout
    bundle = load_bundle(layout.models)
    if bundle.scheme is not settings.scheme:
        raise ValidationError(f"models under {layout.models} are for {bundle.scheme.value}")
    if bundle.filler is not None:
        bundle.filler.max_tokens = settings.fill.max_fill_tokens
    prompts = [Prompt.from_text(line) for line in read_lines(prompt_file or layout.prompts)]

    stories, records = [], []
    with get_progress() as progress:
        task = progress.add_task("Generating stories", total=len(prompts))
        for example, prompt in enumerate(prompts):
            story, record = run_pipeline(
                prompt,
                bundle,
                settings.generation,
                settings.seed,
                example=example,
                max_placeholders=settings.corpus.num_placeholders,
            )
            tokens = story.tokens if trim_words is None else trim_to_words(story.tokens, trim_words)
            stories.append(tokens)
            records.append(record)
            progress.update(task, advance=1)

    layout.generated.mkdir(parents=True, exist_ok=True)
    write_token_lines(layout.generated_stories, stories)
    write_lines(layout.provenance, (record.model_dump_json() for record in records))
    flagged = sum(record.flagged for record in records)
    if flagged:
        logger.warning("%d of %d stories were cut without a sentence end", flagged, len(records))
    return records


def _model_metrics(settings: Settings, report: MetricsReport) -> None:
    layout = settings.layout
    if not (layout.models / Stage.STORY.value / MANIFEST).exists() or not layout.decomposed.exists():
        logger.info("No trained models or decomposition for %s; skipping NLL and ranking", settings.scheme.value)
        return
    bundle = load_bundle(layout.models)
    examples = read_stage_examples(settings)
    report.stage_nll = stage_nll_report(bundle, examples, settings.evaluate.batch_size)
    if bundle.filler is None or not examples.fill:
        return
    cases = ranking_cases(examples.fill, width=bundle.filler.window)
    if settings.evaluate.max_ranking_cases is not None:
        cases = cases[:settings.evaluate.max_ranking_cases]
    for n in settings.evaluate.ranking_sizes:
        try:
            result = entity_ranking(bundle.filler.score, cases, n, numpy_generator(settings.seed, "ranking", n))
        except ValidationError as e:
            logger.warning("Skipping ranking with %d candidates: %s", n, e)
            continue
        report.ranking.append(RankingRow.of(result))


def run_evaluate(
    settings: Settings,
    report_path: Optional[Path] = None,
    annotations_file: Optional[Path] = None,
) -> MetricsReport:
    """Compute every metric the available artifacts allow and write the report."""
    layout = settings.layout
    generated = _stories(layout.generated_stories)
    training = read_token_lines(layout.stories)
    lexicon = VerbLexicon.load(settings.annotate.verb_lexicon)
    if annotations_file is not None:
        annotated, source = _import(generated, annotations_file), VerbSource.ANNOTATIONS
    else:
        annotator = _annotator(settings)
        annotated, source = [annotator.annotate(story) for story in generated], VerbSource.LEXICON

    report = MetricsReport(
        scheme=settings.scheme.value,
        seed=settings.seed,
        stories=len(generated),
        verbs=VerbRow.of(verb_diversity(annotated, lexicon, source)),
        lcs=LcsRow.of(corpus_lcs_stats(
            [story.tokens for story in generated], training, settings.evaluate.lcs_shard_size
        )),
        entity_names=entity_name_diversity(annotated),
        coref=CorefRow.of(coref_cluster_stats(annotated)),
    )
    _model_metrics(settings, report)
    report.write(report_path or layout.report)
    return report


def run_all(settings: Settings, import_file: Optional[Path] = None) -> MetricsReport:
    """Preprocess, annotate, decompose, train every stage, generate and evaluate."""
    layout = settings.layout
    if settings.paths.dataset_source is not None:
        settings.check_paths("preprocess")
        run_preprocess(settings)
    settings.check_paths("annotate")
    run_annotate(settings, import_file or settings.paths.annotations)
    run_decompose(settings)
    for stage in stages_for(settings.scheme):
        run_train(settings, stage)
    run_generate(settings, layout.prompts)
    return run_evaluate(settings)
