"""Evaluation report: a structured record plus aligned text tables."""

import logging
from pathlib import Path
from typing import Optional

import pandas as pd
from pydantic import BaseModel, Field

from .diversity import CorefStats, VerbDiversity
from .lcs import LcsStats
from .ranking import RankingAccuracy

logger = logging.getLogger(__name__)


class VerbRow(BaseModel):
    unique_verbs: float = Field(..., ge=0)
    diverse_percent: float = Field(..., ge=0, le=100)
    top_verbs: list[str]
    source: str

    @classmethod
    def of(cls, result: VerbDiversity) -> "VerbRow":
        return cls(
            unique_verbs=result.unique_verbs,
            diverse_percent=result.diverse_percent,
            top_verbs=list(result.top_verbs),
            source=result.source.value,
        )


class LcsRow(BaseModel):
    max: float = Field(..., ge=0)
    mean: float = Field(..., ge=0)

    @classmethod
    def of(cls, result: LcsStats) -> "LcsRow":
        return cls(max=result.max, mean=result.mean)


class RankingRow(BaseModel):
    n: int = Field(..., ge=2)
    first: Optional[float] = Field(None, ge=0, le=1)
    subsequent: Optional[float] = Field(None, ge=0, le=1)
    first_cases: int = 0
    subsequent_cases: int = 0

    @classmethod
    def of(cls, result: RankingAccuracy) -> "RankingRow":
        return cls(
            n=result.n,
            first=result.first,
            subsequent=result.subsequent,
            first_cases=result.first_cases,
            subsequent_cases=result.subsequent_cases,
        )


class CorefRow(BaseModel):
    chains: float = Field(..., ge=0)
    names_per_chain: float = Field(..., ge=0)

    @classmethod
    def of(cls, result: CorefStats) -> "CorefRow":
        return cls(chains=result.chains, names_per_chain=result.names_per_chain)


class MetricsReport(BaseModel):
    """Every metric of one evaluation run; missing sections were not computed."""

    scheme: Optional[str] = None
    seed: Optional[int] = None
    stories: int = Field(0, ge=0)
    stage_nll: dict[str, float] = Field(default_factory=dict)
    verbs: Optional[VerbRow] = None
    lcs: Optional[LcsRow] = None
    ranking: list[RankingRow] = Field(default_factory=list)
    entity_names: Optional[float] = Field(None, ge=0)
    coref: Optional[CorefRow] = None

    def to_tables(self) -> dict[str, pd.DataFrame]:
        """One DataFrame per computed section, keyed by section name."""
        label = self.scheme or "model"
        tables: dict[str, pd.DataFrame] = {}
        if self.stage_nll:
            tables["stage_nll"] = pd.DataFrame([self.stage_nll], index=[label])
        if self.verbs is not None:
            tables["verb_diversity"] = pd.DataFrame(
                [{"unique verbs": self.verbs.unique_verbs, "% diverse verbs": self.verbs.diverse_percent}],
                index=[label],
            )
        if self.lcs is not None:
            tables["lcs"] = pd.DataFrame(
                [{"max LCS": self.lcs.max, "mean LCS": self.lcs.mean}], index=[label]
            )
        if self.ranking:
            rows = {
                f"rank {row.n}": {"first mentions": row.first, "subsequent mentions": row.subsequent}
                for row in self.ranking
            }
            tables["entity_ranking"] = pd.DataFrame(rows)
        if self.entity_names is not None:
            tables["entity_names"] = pd.DataFrame(
                [{"unique names": self.entity_names}], index=[label]
            )
        if self.coref is not None:
            tables["coref_chains"] = pd.DataFrame(
                [{"chains": self.coref.chains, "unique names per chain": self.coref.names_per_chain}],
                index=[label],
            )
        return tables

    def render(self) -> str:
        """Aligned plain-text tables, one block per section."""
        blocks = []
        for name, table in self.to_tables().items():
            body = table.to_string(float_format=lambda value: f"{value:.4f}", na_rep="-")
            blocks.append(f"== {name} ==\n{body}")
        if self.verbs is not None:
            blocks.append(f"verbs from {self.verbs.source}; top five: {', '.join(self.verbs.top_verbs)}")
        return "\n\n".join(blocks) + "\n"

    def write(self, path: Path) -> tuple[Path, Path]:
        """Write `<path>.json` and `<path>.txt`; returns both paths."""
        path.parent.mkdir(parents=True, exist_ok=True)
        json_path = path.with_suffix(".json")
        text_path = path.with_suffix(".txt")
        json_path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        text_path.write_text(self.render(), encoding="utf-8")
        logger.info("Wrote report to %s and %s", json_path, text_path)
        return json_path, text_path
