"""
Experiment pipelines.

Three entry points share one report model:

- run_experiment: simulate, corrupt, estimate, invert and grade over many trials
- run_analytic: the same grading on the exact corrupted spectrum
- run_mrf: pairwise-Markov checks on a discrete or Gaussian field

Trials are independent given ``(seed, trial)`` and are reduced in trial
order, so the averaged spectrum does not depend on the worker count.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from corruption.models import CorruptionAssignment
from corruption.simulation import corrupt_panel
from corruption.spectra import assignment_thetas, corrupted_psd
from dynamics.dim_system import DimSystem, check_stability
from dynamics.psd import analytic_psd
from dynamics.simulation import simulate_dim
from dynamics.spectral_matrix import SpectralMatrix, frequency_grid
from flows.experiment_config import (
    DiscreteMrfSpec,
    ExperimentConfig,
    build_assignment,
    build_discrete_mrf,
    build_gaussian_mrf,
    build_system,
)
from graphs.graph_io import to_dot
from graphs.operations import moral_graph, perturbed_graph
from graphs.structures import NodeSet, UndirectedGraph, make_edge, sorted_edges
from mrf.discrete import verify_pairwise_markov
from mrf.gaussian import verify_gaussian
from prediction.analytic import analytic_recovery, analytic_scores
from prediction.theory import PredictionSummary, grade, graded_dot, predicted_dot
from spectral.inversion import invert_spectrum
from spectral.support import dc_scores, score_matrix, support_from_scores, write_scores_csv
from spectral.welch import WelchConfig, average_spectra, estimate_cross_psd
from utilities import (
    PROCESS_NOISE_STREAM,
    compute_config_hash,
    config,
    derive_seed_sequence,
    ensure_directory,
    generate_run_id,
    get_logger,
    run_log,
)
from utilities.exceptions import NetworkIdentificationError, UnstableSystemError

logger = get_logger('flows.experiment_flow')


class ExperimentReport(BaseModel):
    """Everything needed to audit or re-run one experiment."""

    run_id: str
    name: str
    mode: str = Field(description="run, analytic or mrf")
    version: str
    config_hash: str
    config: Dict[str, Any]
    labels: List[str] = Field(default_factory=list)
    trials: Optional[int] = None
    scores: Optional[List[List[float]]] = None
    dc_scores: Optional[List[List[float]]] = None
    recovered: List[List[str]] = Field(default_factory=list)
    prediction: Optional[PredictionSummary] = None
    spectrum_deviation: Optional[Dict[str, float]] = Field(
        default=None, description="Per-entry max |empirical - analytic| normalized by sqrt(S_ii S_jj)"
    )
    woodbury_deviation: Optional[float] = None
    mrf: Optional[Dict[str, Any]] = None
    status: str = "ok"
    output_dir: Optional[str] = None
    timing: Dict[str, float] = Field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 2

    def comparable(self) -> Dict[str, Any]:
        """Report without wall-clock fields."""
        return self.model_dump(mode="json", exclude={"timing"})


def _header(cfg: ExperimentConfig, mode: str) -> Dict[str, Any]:
    echo = cfg.echo()
    config_hash = compute_config_hash({"mode": mode, **echo})
    return {
        "run_id": generate_run_id(config_hash),
        "name": cfg.name,
        "mode": mode,
        "version": str(config.get('application.version', '0.0.0')),
        "config_hash": config_hash,
        "config": echo,
        "labels": cfg.labels,
    }


def _matrix(values: np.ndarray) -> List[List[float]]:
    return [[float(v) for v in row] for row in np.asarray(values)]


def _named_edges(graph: UndirectedGraph, labels: List[str]) -> List[List[str]]:
    return [[labels[i], labels[j]] for i, j in sorted_edges(graph.edges)]


def _require_stable(sys: DimSystem) -> None:
    if not check_stability(sys):
        raise UnstableSystemError("the configured network is unstable or ill-posed")


# Monte-Carlo trials


def run_trial(
    sys: DimSystem,
    assignment: CorruptionAssignment,
    welch: WelchConfig,
    samples: int,
    burn_in: int,
    seed: int,
    trial: int,
) -> SpectralMatrix:
    """One trial: simulate, corrupt and Welch-estimate with trial-specific seeds."""
    noise_seed = derive_seed_sequence(seed, PROCESS_NOISE_STREAM, trial)
    panel = simulate_dim(sys, samples, noise_seed, burn_in)
    corrupted = corrupt_panel(panel, assignment, seed, trial)
    return estimate_cross_psd(corrupted, welch)


def _trial_job(args: Tuple) -> SpectralMatrix:
    return run_trial(*args)


def run_trials(
    sys: DimSystem,
    assignment: CorruptionAssignment,
    cfg: ExperimentConfig,
) -> SpectralMatrix:
    """Trial-averaged corrupted spectrum."""
    sim = cfg.simulation
    jobs = [
        (sys, assignment, cfg.welch, sim.samples, sim.burn_in, cfg.seed, trial)
        for trial in range(sim.trials)
    ]
    if sim.threads > 1 and sim.trials > 1:
        logger.info(f"Running {sim.trials} trials on {sim.threads} worker processes")
        with ProcessPoolExecutor(max_workers=sim.threads) as pool:
            spectra = list(pool.map(_trial_job, jobs))
    else:
        logger.info(f"Running {sim.trials} trials sequentially")
        spectra = []
        for job in jobs:
            spectra.append(_trial_job(job))
            logger.debug(f"trial {job[-1]} done")
    return average_spectra(spectra)


def spectrum_deviation(
    estimate: SpectralMatrix, reference: SpectralMatrix, labels: List[str]
) -> Dict[str, float]:
    """``max_omega |S_ij - R_ij| / sqrt(R_ii R_jj)`` per upper-triangular entry."""
    diag = np.sqrt(np.abs(reference.diagonal()))
    scale = diag[:, :, None] * diag[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(scale > 0, np.abs(estimate.values - reference.values) / scale, np.inf)
    worst = relative.max(axis=0)
    n = estimate.n
    return {f"{labels[i]}-{labels[j]}": float(worst[i, j]) for i in range(n) for j in range(i, n)}


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> ExperimentReport:
    """Simulate, corrupt, estimate (trial-averaged), invert, threshold and grade."""
    header = _header(cfg, "run")
    with run_log(_log_dir(cfg, header, write)):
        return _run_experiment(cfg, header, write)


def _run_experiment(cfg: ExperimentConfig, header: Dict[str, Any], write: bool) -> ExperimentReport:
    started = time.perf_counter()
    logger.info(f"Experiment {header['run_id']} ({cfg.name}): {cfg.simulation.trials} trials of {cfg.simulation.samples} samples")
    sys = build_system(cfg)
    assignment = build_assignment(cfg)
    _require_stable(sys)

    averaged = run_trials(sys, assignment, cfg)
    simulated = time.perf_counter()

    inverse = invert_spectrum(averaged, cfg.support.regularization)
    scores = score_matrix(inverse, cfg.support)
    recovered = support_from_scores(scores, cfg.support)
    report = grade(sys.generative_graph(), assignment.perturbed_set(), recovered)

    deviation = None
    try:
        clean = analytic_psd(sys, averaged.freqs)
        reference = corrupted_psd(clean, assignment, assignment_thetas(sys, assignment, averaged.freqs))
        deviation = spectrum_deviation(averaged, reference, cfg.labels)
    except NetworkIdentificationError as exc:
        logger.warning(f"Analytic reference spectrum unavailable: {exc}")

    result = ExperimentReport(
        **header,
        trials=cfg.simulation.trials,
        scores=_matrix(scores),
        dc_scores=_matrix(dc_scores(inverse)),
        recovered=_named_edges(recovered, cfg.labels),
        prediction=report.to_summary(cfg.labels),
        spectrum_deviation=deviation,
        status="ok" if report.ok else "violations",
        timing={
            "simulation_seconds": simulated - started,
            "total_seconds": time.perf_counter() - started,
        },
    )
    if not report.ok:
        logger.warning(f"{len(report.violations)} recovered edges fall outside the perturbed graph")
    if write:
        result = write_outputs(result, cfg, scores, graded_dot(report, cfg.labels), predicted_dot(report, cfg.labels))
    return result


def run_analytic(cfg: ExperimentConfig, write: bool = True) -> ExperimentReport:
    """Grade the exact inverse of the corrupted spectrum; no sampling involved."""
    header = _header(cfg, "analytic")
    with run_log(_log_dir(cfg, header, write)):
        return _run_analytic(cfg, header, write)


def _run_analytic(cfg: ExperimentConfig, header: Dict[str, Any], write: bool) -> ExperimentReport:
    started = time.perf_counter()
    logger.info(f"Analytic run {header['run_id']} ({cfg.name}) on {cfg.analysis.grid_size} frequencies")
    sys = build_system(cfg)
    assignment = build_assignment(cfg)
    _require_stable(sys)

    outcome = analytic_recovery(
        sys, assignment, frequency_grid(cfg.analysis.grid_size), cfg.analysis.threshold
    )
    scores = analytic_scores(outcome.inverse)
    report = outcome.report
    result = ExperimentReport(
        **header,
        scores=_matrix(scores),
        dc_scores=_matrix(dc_scores(outcome.inverse)),
        recovered=_named_edges(outcome.recovered, cfg.labels),
        prediction=report.to_summary(cfg.labels),
        woodbury_deviation=outcome.woodbury_deviation,
        status="ok" if report.ok else "violations",
        timing={"total_seconds": time.perf_counter() - started},
    )
    if write:
        result = write_outputs(result, cfg, scores, graded_dot(report, cfg.labels), predicted_dot(report, cfg.labels))
    return result


def run_mrf(cfg: ExperimentConfig, write: bool = True) -> ExperimentReport:
    """Pairwise-Markov check of the configured field against its perturbed graph."""
    if cfg.mrf is None:
        raise NetworkIdentificationError(f"experiment '{cfg.name}' has no 'mrf' section")
    header = _header(cfg, "mrf")
    with run_log(_log_dir(cfg, header, write)):
        return _run_mrf(cfg, header, write)


def _run_mrf(cfg: ExperimentConfig, header: Dict[str, Any], write: bool) -> ExperimentReport:
    started = time.perf_counter()
    labels = cfg.labels
    logger.info(f"MRF run {header['run_id']} ({cfg.name}, {cfg.mrf.kind})")

    if isinstance(cfg.mrf, DiscreteMrfSpec):
        field, perts = build_discrete_mrf(cfg.mrf)
        agreement = verify_pairwise_markov(field, perts)
        z = NodeSet(p.node for p in perts)
        expected = perturbed_graph(field.graph, z)
        dependent = UndirectedGraph(
            field.n,
            frozenset(
                make_edge(labels.index(v.pair[0]), labels.index(v.pair[1]))
                for v in agreement.pairs
                if not v.independent
            ),
        )
        summary = agreement.summary()
        ok = agreement.ok
        if agreement.genericity_exceptions:
            logger.warning(f"genericity exceptions: {agreement.genericity_exceptions}")
    else:
        gm, perts = build_gaussian_mrf(cfg.mrf)
        verification = verify_gaussian(gm, perts, cfg.analysis.threshold)
        z = NodeSet(p.node for p in perts)
        expected = verification.perturbed
        dependent = verification.support
        summary = verification.to_dict(labels)
        summary["moral_of_generative"] = _named_edges(moral_graph(gm.generative_graph()), labels)
        ok = verification.ok

    result = ExperimentReport(
        **header,
        recovered=_named_edges(dependent, labels),
        mrf=summary,
        status="ok" if ok else "violations",
        timing={"total_seconds": time.perf_counter() - started},
    )
    if write:
        extra = expected.edges - dependent.edges
        result = write_outputs(
            result,
            cfg,
            None,
            to_dot(dependent, labels, name="recovered", highlight=z),
            to_dot(expected, labels, name="perturbed", extra_edges=extra, highlight=z),
        )
    return result


def resolve_output_dir(cfg: ExperimentConfig, run_id: str) -> Path:
    if cfg.output_dir:
        return Path(cfg.output_dir)
    return Path(config.runs_dir) / run_id


def _log_dir(cfg: ExperimentConfig, header: Dict[str, Any], write: bool) -> Optional[Path]:
    return resolve_output_dir(cfg, header["run_id"]) if write else None


def write_outputs(
    report: ExperimentReport,
    cfg: ExperimentConfig,
    scores: Optional[np.ndarray],
    recovered_dot: str,
    predicted: str,
) -> ExperimentReport:
    """Write ``report.json``, ``scores.csv``, ``recovered.dot`` and ``predicted.dot``."""
    out = ensure_directory(str(resolve_output_dir(cfg, report.run_id)))
    report = report.model_copy(update={"output_dir": str(out)})
    if scores is not None:
        write_scores_csv(scores, out / "scores.csv", cfg.labels)
    (out / "recovered.dot").write_text(recovered_dot, encoding="utf-8")
    (out / "predicted.dot").write_text(predicted, encoding="utf-8")
    (out / "report.json").write_text(report.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Wrote report to {out}")
    return report


def export_dot(cfg: ExperimentConfig, out_dir: Optional[Union[str, Path]] = None) -> Dict[str, Path]:
    """``generative.dot``, ``moral.dot`` and ``predicted.dot`` for the configured system, without simulating."""
    sys = build_system(cfg)
    assignment = build_assignment(cfg)
    header = _header(cfg, "export-dot")
    out = ensure_directory(str(out_dir or resolve_output_dir(cfg, header["run_id"])))
    graph = sys.generative_graph()
    report = grade(graph, assignment.perturbed_set(), moral_graph(graph))
    paths = {
        "generative": out / "generative.dot",
        "moral": out / "moral.dot",
        "predicted": out / "predicted.dot",
    }
    paths["generative"].write_text(to_dot(graph, cfg.labels, name="generative"), encoding="utf-8")
    paths["moral"].write_text(to_dot(report.true_moral, cfg.labels, name="moral"), encoding="utf-8")
    paths["predicted"].write_text(predicted_dot(report, cfg.labels), encoding="utf-8")
    logger.info(f"Exported DOT graphs to {out}")
    return paths


__all__ = [
    "ExperimentReport",
    "run_trial",
    "run_trials",
    "spectrum_deviation",
    "run_experiment",
    "run_analytic",
    "run_mrf",
    "resolve_output_dir",
    "write_outputs",
    "export_dot",
]
