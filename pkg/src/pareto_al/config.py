"""Declarative experiment configuration (YAML or JSON file)."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from . import acquisition as acq
from .datasets import CsvPoolConfig, OutputColumn, TRANSFORMS, generate, load_csv_pool, load_pool
from .pareto import Direction
from .surrogate import SurrogateConfig

OUTPUT_DIR_ENV = "PARETO_AL_OUTPUT_DIR"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SyntheticDataset(_Strict):
    case: Literal["linear", "circular", "hyperbolic", "bat"]
    n: int = Field(500, ge=2)
    seed: int = Field(0, ge=0)


class CsvOutput(_Strict):
    column: str
    direction: Literal["maximize", "minimize", "max", "min"] = "maximize"
    transform: str = "identity"
    name: Optional[str] = None

    @field_validator("transform")
    @classmethod
    def _known_transform(cls, v):
        if v not in TRANSFORMS:
            raise ValueError(f"unknown transform {v!r}; expected one of {sorted(TRANSFORMS)}")
        return v


class CsvDataset(_Strict):
    path: str
    features: list[str] = Field(min_length=1)
    outputs: list[CsvOutput] = Field(min_length=1)
    name: Optional[str] = None


class DatasetConfig(_Strict):
    synthetic: Optional[SyntheticDataset] = None
    csv: Optional[CsvDataset] = None
    pool_dir: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        given = [k for k in ("synthetic", "csv", "pool_dir") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"exactly one of synthetic/csv/pool_dir is required, got {given}")
        return self


class StrategyConfig(_Strict):
    kind: str
    name: Optional[str] = None
    mc_samples: int = Field(1000, ge=1)
    scv_mu_floor_rel: float = Field(1e-6, gt=0)
    seed: int = Field(0, ge=0)

    @field_validator("kind")
    @classmethod
    def _known_kind(cls, v):
        return acq.Kind.parse(v).value

    @model_validator(mode="after")
    def _mc(self):
        if self.kind == acq.Kind.PND.value and self.mc_samples < 100:
            raise ValueError("mc_samples must be >= 100 for pnd")
        return self

    @property
    def label(self) -> str:
        return self.name or acq.Kind.parse(self.kind).label

    def to_acquisition(self) -> acq.AcquisitionConfig:
        return acq.AcquisitionConfig(kind=acq.Kind.parse(self.kind), mc_samples=self.mc_samples,
                                     scv_mu_floor_rel=self.scv_mu_floor_rel, seed=self.seed)


class SurrogateSection(_Strict):
    n_trees: int = Field(64, ge=2)
    min_leaf: int = Field(1, ge=1)
    feature_fraction: float = Field(1.0 / 3.0, gt=0, le=1)
    sd_floor_rel: float = Field(1e-6, gt=0)
    seed: int = Field(0, ge=0)

    def to_surrogate(self) -> SurrogateConfig:
        return SurrogateConfig(**self.model_dump())


class ExperimentConfig(_Strict):
    dataset: DatasetConfig
    strategies: list[Union[str, StrategyConfig]] = Field(min_length=1)
    surrogate: SurrogateSection = SurrogateSection()
    C: int = Field(10, ge=2)
    K: int = Field(60, ge=1)
    R: int = Field(30, ge=1)
    master_seed: int = Field(0, ge=0)
    shell_depth: int = Field(2, ge=1)
    output_dir: Optional[str] = None

    @field_validator("strategies")
    @classmethod
    def _normalize(cls, items):
        out = [StrategyConfig(kind=s) if isinstance(s, str) else s for s in items]
        labels = [s.label for s in out]
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        if dupes:
            raise ValueError(f"duplicate strategy names {dupes}; set 'name' to disambiguate")
        return out

    @model_validator(mode="after")
    def _synthetic_sizes(self):
        syn = self.dataset.synthetic
        if syn is not None:
            check_sizes(syn.n, self.C, self.K)
        return self

    def resolved(self) -> dict:
        """Fully resolved config for the manifest (output_dir excluded)."""
        data = self.model_dump(mode="json", exclude={"output_dir"})
        data["strategies"] = [dict(s, name=StrategyConfig(**s).label) for s in data["strategies"]]
        return data


def check_sizes(n: int, C: int, K: int):
    if not 2 <= C < n:
        raise ValueError(f"C must satisfy 2 <= C < n (n={n}, C={C})")
    if not 1 <= K <= n - C:
        raise ValueError(f"K must satisfy K <= n - C (n={n}, C={C}, K={K}, n - C={n - C})")


class ConfigError(ValueError):
    """Config file failed validation; message lists the offending fields."""


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def load_config(path) -> tuple[ExperimentConfig, Path]:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML/JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    try:
        return ExperimentConfig.model_validate(data), path.parent
    except ValidationError as exc:
        raise ConfigError(f"{path}: {_format_validation(exc)}") from None


def build_pool(cfg: ExperimentConfig, base_dir: Path):
    ds = cfg.dataset
    if ds.synthetic is not None:
        s = ds.synthetic
        return generate(s.case, s.n, s.seed)
    if ds.csv is not None:
        c = ds.csv
        outputs = [OutputColumn(column=o.column, direction=Direction.parse(o.direction),
                                transform=o.transform, name=o.name) for o in c.outputs]
        return load_csv_pool(base_dir / c.path, CsvPoolConfig(c.features, outputs, c.name))
    return load_pool(base_dir / ds.pool_dir)


def resolve_output_dir(cfg: ExperimentConfig, base_dir: Path, override=None) -> Path:
    if override:
        return Path(override)
    if cfg.output_dir:
        return base_dir / cfg.output_dir
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env)
    raise ConfigError(f"output_dir: not set in config, on the command line, or via ${OUTPUT_DIR_ENV}")
