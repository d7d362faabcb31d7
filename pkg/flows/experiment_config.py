"""
Experiment documents.

An experiment is a YAML file validated into ``ExperimentConfig``. Node labels
are strings in the document and dense 0-based indices everywhere else; the
``build_*`` helpers do that mapping and construct the library objects.

Sections left out of the document fall back to ``config/analysis.json``.
"""
from __future__ import annotations

from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from corruption.models import (
    CorruptionAssignment,
    CorruptionModel,
    Disinformation,
    MeasurementNoise,
    Outcome,
    PacketDrop,
    RandomDelay,
    RandomStateSpace,
    RawStateSpace,
    compose_models,
)
from dynamics.dim_system import DimSystem, NoiseSpec, check_stability
from dynamics.transfer_function import TransferFunction
from graphs.structures import UndirectedGraph, make_edge
from mrf.discrete import DiscreteMrf, Factor, PerturbFactor, noisy_copy
from mrf.gaussian import GaussianNetworkModel, GaussianPerturbation
from spectral.support import SupportConfig
from spectral.welch import WelchConfig
from utilities import config, get_logger
from utilities.exceptions import ConfigValidationError, NetworkIdentificationError

logger = get_logger('flows.experiment_config')


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class FilterSpec(_Section):
    """Rational filter in powers of ``z^-1``."""

    num: List[float] = Field(min_length=1)
    den: List[float] = Field(default_factory=lambda: [1.0], min_length=1)

    def build(self) -> TransferFunction:
        return TransferFunction(tuple(self.num), tuple(self.den))


class ArcSpec(FilterSpec):
    source: str
    target: str


class NoiseEntry(_Section):
    node: str
    variance: float = Field(default=1.0, gt=0.0)
    shaping: Optional[FilterSpec] = None


class SystemSpec(_Section):
    nodes: List[str] = Field(min_length=1)
    arcs: List[ArcSpec] = Field(default_factory=list)
    noise: List[NoiseEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def _labels_resolve(self) -> "SystemSpec":
        _check_labels(self.nodes)
        known = set(self.nodes)
        for arc in self.arcs:
            for label in (arc.source, arc.target):
                if label not in known:
                    raise ValueError(f"arc references unknown node {label!r}")
            if arc.source == arc.target:
                raise ValueError(f"self-loop on node {arc.source!r}")
        seen = set()
        for entry in self.noise:
            if entry.node not in known:
                raise ValueError(f"noise references unknown node {entry.node!r}")
            if entry.node in seen:
                raise ValueError(f"noise for node {entry.node!r} given twice")
            seen.add(entry.node)
        return self


class SimulationSpec(_Section):
    samples: int = Field(default_factory=lambda: config.default_samples, gt=0)
    trials: int = Field(default_factory=lambda: config.default_trials, gt=0)
    burn_in: int = Field(default_factory=lambda: config.burn_in, ge=0)
    threads: int = Field(default=1, ge=1)


class AnalysisSpec(_Section):
    grid_size: int = Field(default_factory=lambda: config.grid_size, ge=2)
    threshold: float = Field(default_factory=lambda: config.analytic_threshold, gt=0.0)


# Corruption documents, discriminated on ``kind``.


class DelaySpec(_Section):
    kind: Literal["random_delay"]
    delays: Dict[int, float] = Field(min_length=1)


class PacketDropSpec(_Section):
    kind: Literal["packet_drop"]
    p: float = Field(gt=0.0, le=1.0)


class MeasurementNoiseSpec(_Section):
    kind: Literal["measurement_noise"]
    variance: float = Field(ge=0.0)
    shaping: Optional[FilterSpec] = None


class DisinformationSpec(_Section):
    kind: Literal["disinformation"]
    variance: float = Field(gt=0.0)
    shaping: Optional[FilterSpec] = None


class OutcomeSpec(_Section):
    probability: float = Field(gt=0.0, le=1.0)
    a: List[List[float]] = Field(default_factory=list)
    b: List[List[float]] = Field(default_factory=list)
    c: List[List[float]] = Field(default_factory=list)
    d: List[List[float]]


class RawStateSpaceSpec(_Section):
    kind: Literal["raw_state_space"]
    outcomes: List[OutcomeSpec] = Field(min_length=1)
    w: Optional[List[List[float]]] = None
    s: Optional[List[List[float]]] = None
    v: Optional[List[List[float]]] = None


class CompositionSpec(_Section):
    kind: Literal["composition"]
    stages: List["CorruptionSpec"] = Field(min_length=2)


CorruptionSpec = Annotated[
    Union[
        DelaySpec,
        PacketDropSpec,
        MeasurementNoiseSpec,
        DisinformationSpec,
        RawStateSpaceSpec,
        CompositionSpec,
    ],
    Field(discriminator="kind"),
]
CompositionSpec.model_rebuild()


# MRF documents.


class FactorSpec(_Section):
    nodes: List[str] = Field(min_length=1)
    table: Any


class DiscretePerturbationSpec(_Section):
    node: str
    table: Optional[Any] = None
    flip: Optional[float] = Field(default=None, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _one_kernel(self) -> "DiscretePerturbationSpec":
        if (self.table is None) == (self.flip is None):
            raise ValueError(f"perturbation of {self.node!r} needs exactly one of 'table' or 'flip'")
        return self


class DiscreteMrfSpec(_Section):
    kind: Literal["discrete"]
    nodes: List[str] = Field(min_length=1)
    alphabet: Union[int, Dict[str, int]] = 2
    edges: Optional[List[Tuple[str, str]]] = None
    factors: List[FactorSpec] = Field(min_length=1)
    perturbations: List[DiscretePerturbationSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def _labels_resolve(self) -> "DiscreteMrfSpec":
        _check_labels(self.nodes)
        known = set(self.nodes)
        referenced = [v for f in self.factors for v in f.nodes] + [p.node for p in self.perturbations]
        referenced += [v for edge in self.edges or [] for v in edge]
        if isinstance(self.alphabet, dict):
            referenced += list(self.alphabet)
        unknown = sorted(set(referenced) - known)
        if unknown:
            raise ValueError(f"MRF references unknown nodes {unknown}")
        return self


class GaussianArcSpec(_Section):
    source: str
    target: str
    gain: float


class GaussianPerturbationSpec(_Section):
    node: str
    gain: float = 1.0
    noise_variance: float = Field(default=1.0, gt=0.0)


class GaussianMrfSpec(_Section):
    kind: Literal["gaussian"]
    nodes: List[str] = Field(min_length=1)
    arcs: List[GaussianArcSpec] = Field(default_factory=list)
    variances: Dict[str, float] = Field(default_factory=dict)
    perturbations: List[GaussianPerturbationSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def _labels_resolve(self) -> "GaussianMrfSpec":
        _check_labels(self.nodes)
        referenced = [a.source for a in self.arcs] + [a.target for a in self.arcs]
        referenced += list(self.variances) + [p.node for p in self.perturbations]
        unknown = sorted(set(referenced) - set(self.nodes))
        if unknown:
            raise ValueError(f"MRF references unknown nodes {unknown}")
        return self


MrfSpec = Annotated[Union[DiscreteMrfSpec, GaussianMrfSpec], Field(discriminator="kind")]


class ExperimentConfig(_Section):
    """One experiment document."""

    name: str = "experiment"
    description: Optional[str] = None
    seed: int = Field(ge=0)
    simulation: SimulationSpec = Field(default_factory=SimulationSpec)
    system: Optional[SystemSpec] = None
    corruption: Dict[str, CorruptionSpec] = Field(default_factory=dict)
    welch: WelchConfig = Field(default_factory=WelchConfig.from_defaults)
    support: SupportConfig = Field(default_factory=SupportConfig.from_defaults)
    analysis: AnalysisSpec = Field(default_factory=AnalysisSpec)
    mrf: Optional[MrfSpec] = None
    output_dir: Optional[str] = None

    @field_validator("welch", mode="before")
    @classmethod
    def _welch_defaults(cls, value):
        if isinstance(value, dict):
            return {**config.welch_defaults, **value}
        return value

    @field_validator("support", mode="before")
    @classmethod
    def _support_defaults(cls, value):
        if isinstance(value, dict):
            defaults = {k: v for k, v in config.support_defaults.items() if k in SupportConfig.model_fields}
            return {**defaults, **value}
        return value

    @model_validator(mode="after")
    def _sections_consistent(self) -> "ExperimentConfig":
        if self.system is None and self.mrf is None:
            raise ValueError("an experiment needs a 'system' or an 'mrf' section")
        if self.corruption:
            if self.system is None:
                raise ValueError("'corruption' requires a 'system' section")
            unknown = sorted(set(self.corruption) - set(self.system.nodes))
            if unknown:
                raise ValueError(f"corruption references unknown nodes {unknown}")
        return self

    @property
    def labels(self) -> List[str]:
        if self.system is not None:
            return list(self.system.nodes)
        return list(self.mrf.nodes)

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    def with_overrides(
        self,
        seed: Optional[int] = None,
        trials: Optional[int] = None,
        threads: Optional[int] = None,
        output_dir: Optional[str] = None,
    ) -> "ExperimentConfig":
        """Apply command-line overrides and re-validate."""
        document = self.echo()
        if seed is not None:
            document["seed"] = seed
        if trials is not None:
            document["simulation"]["trials"] = trials
        if threads is not None:
            document["simulation"]["threads"] = threads
        if output_dir is not None:
            document["output_dir"] = output_dir
        return parse_experiment_config(document)


def _check_labels(labels: List[str]) -> None:
    duplicates = sorted({label for label in labels if labels.count(label) > 1})
    if duplicates:
        raise ValueError(f"duplicate node labels {duplicates}")


def parse_experiment_config(document: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(document)
    except ValidationError as exc:
        raise ConfigValidationError(f"invalid experiment configuration:\n{exc}") from exc


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigValidationError(f"experiment file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ConfigValidationError(f"{path}: not valid YAML ({exc})") from exc
    if not isinstance(document, dict):
        raise ConfigValidationError(f"{path}: top level must be a mapping")
    cfg = parse_experiment_config(document)
    logger.info(f"Loaded experiment '{cfg.name}' from {path}")
    return cfg


# Builders


def build_system(cfg: ExperimentConfig) -> DimSystem:
    if cfg.system is None:
        raise ConfigValidationError(f"experiment '{cfg.name}' has no 'system' section")
    spec = cfg.system
    index = {label: k for k, label in enumerate(spec.nodes)}
    noise = [NoiseSpec() for _ in spec.nodes]
    for entry in spec.noise:
        noise[index[entry.node]] = NoiseSpec(entry.variance, entry.shaping.build() if entry.shaping else None)
    arcs = [(index[a.source], index[a.target], a.build()) for a in spec.arcs]
    return DimSystem.from_arcs(len(spec.nodes), arcs, noise)


def build_corruption(spec) -> CorruptionModel:
    if isinstance(spec, DelaySpec):
        return RandomDelay(spec.delays)
    if isinstance(spec, PacketDropSpec):
        return PacketDrop(spec.p)
    if isinstance(spec, MeasurementNoiseSpec):
        return MeasurementNoise(spec.variance, spec.shaping.build() if spec.shaping else None)
    if isinstance(spec, DisinformationSpec):
        return Disinformation(spec.variance, spec.shaping.build() if spec.shaping else None)
    if isinstance(spec, RawStateSpaceSpec):
        outcomes = tuple(
            Outcome(o.probability, np.asarray(o.a), np.asarray(o.b), np.asarray(o.c), np.asarray(o.d))
            for o in spec.outcomes
        )
        return RawStateSpace(RandomStateSpace(outcomes, spec.w, spec.s, spec.v))
    if isinstance(spec, CompositionSpec):
        model = build_corruption(spec.stages[0])
        for stage in spec.stages[1:]:
            model = compose_models(model, build_corruption(stage))
        return model
    raise ConfigValidationError(f"unsupported corruption section {spec!r}")


def build_assignment(cfg: ExperimentConfig) -> CorruptionAssignment:
    n = len(cfg.labels)
    return CorruptionAssignment(n, {cfg.index_of(label): build_corruption(spec) for label, spec in cfg.corruption.items()})


def build_discrete_mrf(spec: DiscreteMrfSpec) -> Tuple[DiscreteMrf, List[PerturbFactor]]:
    index = {label: k for k, label in enumerate(spec.nodes)}
    if isinstance(spec.alphabet, int):
        alphabet = [spec.alphabet] * len(spec.nodes)
    else:
        alphabet = [int(spec.alphabet.get(label, 2)) for label in spec.nodes]
    factors = tuple(Factor(tuple(index[v] for v in f.nodes), np.asarray(f.table, dtype=float)) for f in spec.factors)
    graph = None
    if spec.edges is not None:
        graph = UndirectedGraph(len(spec.nodes), frozenset(make_edge(index[a], index[b]) for a, b in spec.edges))
    mrf = DiscreteMrf(tuple(alphabet), factors, graph, tuple(spec.nodes))
    perts = []
    for p in spec.perturbations:
        i = index[p.node]
        table = noisy_copy(alphabet[i], p.flip) if p.flip is not None else np.asarray(p.table, dtype=float)
        perts.append(PerturbFactor(i, table))
    return mrf, perts


def build_gaussian_mrf(spec: GaussianMrfSpec) -> Tuple[GaussianNetworkModel, List[GaussianPerturbation]]:
    index = {label: k for k, label in enumerate(spec.nodes)}
    variances = [float(spec.variances.get(label, 1.0)) for label in spec.nodes]
    arcs = [(index[a.source], index[a.target], a.gain) for a in spec.arcs]
    gm = GaussianNetworkModel.from_arcs(len(spec.nodes), arcs, variances)
    perts = [GaussianPerturbation(index[p.node], p.gain, p.noise_variance) for p in spec.perturbations]
    return gm, perts


def summarize(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Human-readable view of the parsed document, used by ``validate-config``."""
    summary: Dict[str, Any] = {"name": cfg.name, "seed": cfg.seed, "nodes": cfg.labels}
    if cfg.system is not None:
        sys = build_system(cfg)
        assignment = build_assignment(cfg)
        summary["arcs"] = [f"{a.source} -> {a.target}" for a in cfg.system.arcs]
        summary["corruption"] = {cfg.labels[i]: m.describe() for i, m in assignment.items()}
        try:
            summary["stable"] = check_stability(sys)
        except NetworkIdentificationError as exc:
            summary["stable"] = False
            summary["stability_error"] = str(exc)
    if cfg.mrf is not None:
        summary["mrf"] = cfg.mrf.kind
        summary["mrf_perturbations"] = [p.node for p in cfg.mrf.perturbations]
    return summary


__all__ = [
    "FilterSpec",
    "ArcSpec",
    "NoiseEntry",
    "SystemSpec",
    "SimulationSpec",
    "AnalysisSpec",
    "CorruptionSpec",
    "DiscreteMrfSpec",
    "GaussianMrfSpec",
    "ExperimentConfig",
    "parse_experiment_config",
    "load_experiment_config",
    "build_system",
    "build_corruption",
    "build_assignment",
    "build_discrete_mrf",
    "build_gaussian_mrf",
    "summarize",
]
