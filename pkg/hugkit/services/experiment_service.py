"""
Experiment orchestration: synthetic unconstrained-features states, single
runs with on-disk outputs, and parameter sweeps.
"""
import hashlib
import itertools
import shutil
import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from hugkit import __version__
from hugkit.core.config import settings
from hugkit.core.logging_config import experiment_logger, get_logger
from hugkit.models.geometry import Labels, RawMatrix
from hugkit.models.proxy_set import ProxySet
from hugkit.models.state import LabeledState
from hugkit.models.trajectory import Trajectory
from hugkit.schemas.experiment import ExperimentConfig, RunManifest, SweepConfig
from hugkit.schemas.gnc import GncReport
from hugkit.schemas.loss import LossVariant
from hugkit.services.geometry_service import derive_seed, sample_gaussian_sphere
from hugkit.services.gnc_service import gnc_report
from hugkit.services.optim_service import run
from hugkit.services.persistence_service import save_state
from hugkit.services.proxy_service import effective_proxies, init_proxies

logger = get_logger(__name__)

TRAJECTORY_FILE = "trajectory.csv"
STATE_FILE = "final_state.json"
REPORT_FILE = "report.json"
MANIFEST_FILE = "manifest.json"


class ExperimentResult(NamedTuple):
    final_state: LabeledState
    trajectory: Trajectory
    report: GncReport
    manifest: RunManifest


def generate_inputs(cfg: ExperimentConfig, seed: int) -> Tuple[LabeledState, Optional[ProxySet]]:
    """
    Initial state and proxy set for an experiment.

    Features use derive_seed(seed, 0), proxies derive_seed(seed, 1). Raw
    (unnormalized) states scale both to norm loss.s_target and carry no
    proxy set.

    Raises:
        EmptyClassError: If the class schedule empties a class
    """
    labels = Labels.from_counts(cfg.class_counts())
    features = sample_gaussian_sphere(labels.n, cfg.dim, derive_seed(seed, 0))

    if cfg.loss.variant == LossVariant.UNNORMALIZED_HUG:
        proxies = sample_gaussian_sphere(cfg.num_classes, cfg.dim, derive_seed(seed, 1))
        scale = cfg.loss.s_target
        state = LabeledState(
            features=RawMatrix(entries=scale * features.points),
            labels=labels,
            proxies=RawMatrix(entries=scale * proxies.points),
        )
        return state, None

    proxy_set = init_proxies(cfg.proxy_strategy, cfg.num_classes, cfg.dim, derive_seed(seed, 1))
    state = LabeledState(features=features, labels=labels, proxies=effective_proxies(proxy_set))
    return state, proxy_set


def generate_state(cfg: ExperimentConfig, seed: int) -> LabeledState:
    """Sample the initial labeled state of an experiment."""
    state, _ = generate_inputs(cfg, seed)
    return state


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def experiment(cfg: ExperimentConfig, output_dir: Optional[str] = None) -> ExperimentResult:
    """
    Run one experiment and write its outputs.

    Writes trajectory.csv, final_state.json, report.json and manifest.json
    to output_dir (or cfg.output_dir, or a fresh directory under
    settings.OUTPUT_DIR). Files written before a failure are removed, and
    so is output_dir itself when this run created it.
    """
    run_id = uuid.uuid4().hex[:12]
    out = Path(output_dir or cfg.output_dir or Path(settings.OUTPUT_DIR) / run_id)
    started_at = datetime.now(timezone.utc)

    experiment_logger.log_event(
        "experiment.start",
        run_id=run_id,
        details={"C": cfg.num_classes, "d": cfg.dim, "variant": cfg.loss.variant.value,
                 "seed": cfg.seed, "output_dir": str(out)}
    )

    state, proxy_set = generate_inputs(cfg, cfg.seed)
    outcome = run(state, cfg.loss, cfg.optim, proxy_set, cfg.gnc_every, run_id)
    final = outcome.final_state
    report = gnc_report(final.features, final.labels, final.proxies)

    created = not out.exists()
    out.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    try:
        written.append(outcome.trajectory.to_csv(out / TRAJECTORY_FILE))
        written.append(save_state(final, out / STATE_FILE, outcome.proxy_set))
        report_path = out / REPORT_FILE
        report_path.write_text(report.model_dump_json(indent=2) + "\n")
        written.append(report_path)

        manifest = RunManifest(
            run_id=run_id,
            config=cfg,
            seed=cfg.seed,
            version=__version__,
            started_at=started_at,
            finished_at=datetime.now(timezone.utc),
            iterations=outcome.iterations,
            converged=outcome.converged,
            final_loss=outcome.final_loss,
            report=report,
            digests={path.name: _digest(path) for path in written},
        )
        manifest_path = out / MANIFEST_FILE
        manifest_path.write_text(manifest.model_dump_json(indent=2, by_alias=True) + "\n")
        written.append(manifest_path)
    except Exception:
        if created:
            shutil.rmtree(out, ignore_errors=True)
        else:
            for path in written:
                path.unlink(missing_ok=True)
        logger.error(f"Experiment {run_id} failed; removed partial outputs in {out}")
        raise

    experiment_logger.log_event(
        "experiment.finish",
        run_id=run_id,
        iteration=outcome.iterations,
        details={"final_loss": outcome.final_loss, "acme": report.acme,
                 "collapse_metric": report.collapse_metric}
    )
    return ExperimentResult(final, outcome.trajectory, report, manifest)


def _set_path(doc: Dict[str, Any], dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    target = doc
    for key in keys[:-1]:
        target = target.setdefault(key, {})
    target[keys[-1]] = value


def expand_grid(sweep_cfg: SweepConfig) -> List[ExperimentConfig]:
    """
    Cartesian product of the grid applied to the base config.

    Point i gets seed derive_seed(base.seed, i). Top-level field names and
    their aliases (C, d) are both accepted.
    """
    aliases = {
        name: field.alias
        for name, field in ExperimentConfig.model_fields.items()
        if field.alias
    }
    keys = list(sweep_cfg.grid)
    points = []
    for index, values in enumerate(itertools.product(*(sweep_cfg.grid[k] for k in keys))):
        doc = sweep_cfg.base.model_dump(mode="json", by_alias=True)
        for key, value in zip(keys, values):
            head, _, rest = key.partition(".")
            head = aliases.get(head, head)
            _set_path(doc, f"{head}.{rest}" if rest else head, value)
        doc["seed"] = derive_seed(sweep_cfg.base.seed, index)
        doc["output_dir"] = str(Path(sweep_cfg.output_dir) / f"point_{index:03d}")
        points.append(ExperimentConfig.model_validate(doc))
    return points


def sweep(sweep_cfg: SweepConfig) -> List[RunManifest]:
    """
    Run every grid point on a worker thread.

    Returns:
        Manifests in grid order
    """
    points = expand_grid(sweep_cfg)
    workers = sweep_cfg.workers or settings.SWEEP_WORKERS
    logger.info(f"Sweep of {len(points)} points on {workers} workers into {sweep_cfg.output_dir}")

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(experiment, points))
    return [result.manifest for result in results]
