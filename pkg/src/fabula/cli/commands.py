"""CLI commands implementation for fabula.

Commands:
- preprocess: tokenize and truncate the dataset
- annotate: SRL, entity and coreference annotation (fallback or import)
- decompose: training pairs for a decomposition scheme
- train: train the plan, story or fill model
- generate: stories from prompts through the trained pipeline
- evaluate: automatic metrics report
- pipeline: all of the above in order

Exit codes: 0 success, 2 validation error, 3 stage failure.
"""

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import typer

from ..decompose import DecompositionScheme
from ..errors import StageError, ValidationError
from ..models import Stage
from .config import Settings, load_settings
from .logging import (init_logging, log_error, log_info, log_run_header,
                      log_success, status)
from .runs import (run_all, run_annotate, run_decompose, run_evaluate,
                   run_generate, run_preprocess, run_train)

VALIDATION_EXIT = 2
STAGE_EXIT = 3

app = typer.Typer(help="fabula: coarse-to-fine story generation")

SEED = typer.Option(None, "--seed", help="Run seed; every random substream derives from it")
CONFIG = typer.Option(None, "--config", help="TOML configuration file")
OUT = typer.Option(None, "--out", help="Output directory for this run")
SET = typer.Option([], "--set", help="Override a setting, e.g. --set generation.k=5")
DEBUG = typer.Option(False, "--debug", help="Log debug messages")


@contextmanager
def command_errors(command: str) -> Iterator[None]:
    """Map fabula errors to exit codes with a red message naming the stage."""
    try:
        yield
    except typer.Exit:
        raise
    except ValidationError as e:
        log_error(f"{command} failed: {e}")
        raise typer.Exit(VALIDATION_EXIT)
    except StageError as e:
        log_error(f"{command} failed in stage {e.stage}: {e}")
        raise typer.Exit(STAGE_EXIT)
    except Exception as e:
        log_error(f"{command} failed in stage {command}: {str(e)}")
        raise typer.Exit(STAGE_EXIT)


def start(
    command: str,
    config: Optional[Path],
    seed: Optional[int],
    out: Optional[Path],
    overrides: list[str],
    debug: bool = False,
    **extra: str,
) -> Settings:
    """Resolve settings, check the command's inputs and log the run header."""
    init_logging(debug)
    settings = load_settings(config, seed, out, [*overrides, *(f"{k}={v}" for k, v in extra.items())])
    settings.check_paths(command)
    log_run_header(command, settings.config_hash(), settings.seed)
    return settings


@app.command()
def preprocess(
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    overrides: list[str] = SET,
    debug: bool = DEBUG,
) -> None:
    """Tokenize, align and truncate the prompt/story dataset."""
    with command_errors("preprocess"):
        settings = start("preprocess", config, seed, out, overrides, debug)
        with status("Reading dataset..."):
            count = run_preprocess(settings)
        log_success(f"Preprocessed {count} examples into {settings.layout.data}")


@app.command()
def annotate(
    fallback: bool = typer.Option(False, "--fallback", help="Use the built-in heuristic annotators"),
    import_file: Optional[Path] = typer.Option(None, "--import", help="Annotation records, one JSON line per story"),
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    overrides: list[str] = SET,
    debug: bool = DEBUG,
) -> None:
    """Annotate stories with SRL frames, entity mentions and coreference chains."""
    with command_errors("annotate"):
        if fallback and import_file is not None:
            raise ValidationError("--fallback and --import are mutually exclusive")
        settings = start("annotate", config, seed, out, overrides, debug)
        if import_file is not None and not import_file.exists():
            raise ValidationError(f"annotation file {import_file} does not exist")
        with status("Annotating stories..."):
            count = run_annotate(settings, import_file)
        log_success(f"Annotated {count} stories")


@app.command()
def decompose(
    scheme: Optional[DecompositionScheme] = typer.Option(None, "--scheme", help="Decomposition scheme"),
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    overrides: list[str] = SET,
    debug: bool = DEBUG,
) -> None:
    """Build the intermediate representations and per-stage training pairs."""
    with command_errors("decompose"):
        extra = {"scheme": scheme.value} if scheme is not None else {}
        settings = start("decompose", config, seed, out, overrides, debug, **extra)
        with status(f"Decomposing stories ({settings.scheme.value})..."):
            examples = run_decompose(settings)
        log_success(
            f"Wrote {len(examples.plan)} plan, {len(examples.story)} story "
            f"and {len(examples.fill)} fill examples to {settings.layout.decomposed}"
        )


@app.command()
def train(
    stage: Stage = typer.Option(..., "--stage", help="Stage model to train"),
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    overrides: list[str] = SET,
    debug: bool = DEBUG,
) -> None:
    """Train one stage model and save it with its manifest."""
    with command_errors("train"):
        settings = start("train", config, seed, out, overrides, debug)
        log_info(f"Training {stage.value} model for {settings.scheme.value}")
        path = run_train(settings, stage)
        log_success(f"Saved {stage.value} model to {path}")


@app.command()
def generate(
    prompt_file: Optional[Path] = typer.Option(None, "--prompt-file", help="Prompts, one per line"),
    trim_words: Optional[int] = typer.Option(None, "--trim-words", min=1, help="Cut stories after this many words"),
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    overrides: list[str] = SET,
    debug: bool = DEBUG,
) -> None:
    """Generate stories from prompts with the trained pipeline."""
    with command_errors("generate"):
        settings = start("generate", config, seed, out, overrides, debug)
        if prompt_file is not None and not prompt_file.exists():
            raise ValidationError(f"prompt file {prompt_file} does not exist")
        records = run_generate(settings, prompt_file, trim_words)
        log_success(f"Generated {len(records)} stories into {settings.layout.generated}")


@app.command()
def evaluate(
    report: Optional[Path] = typer.Option(None, "--report", help="Report path without suffix"),
    annotations: Optional[Path] = typer.Option(
        None, "--annotations", help="Imported annotations of the generated stories"
    ),
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    overrides: list[str] = SET,
    debug: bool = DEBUG,
) -> None:
    """Compute the automatic metrics and write the report."""
    with command_errors("evaluate"):
        settings = start("evaluate", config, seed, out, overrides, debug)
        with status("Evaluating..."):
            result = run_evaluate(settings, report, annotations)
        log_info(result.render())
        log_success(f"Wrote report to {report or settings.layout.report}")


@app.command()
def pipeline(
    import_file: Optional[Path] = typer.Option(None, "--import", help="Annotation records for the dataset stories"),
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    overrides: list[str] = SET,
    debug: bool = DEBUG,
) -> None:
    """Run preprocess, annotate, decompose, train, generate and evaluate."""
    with command_errors("pipeline"):
        settings = start("pipeline", config, seed, out, overrides, debug)
        result = run_all(settings, import_file)
        log_info(result.render())
        log_success("Pipeline finished")
