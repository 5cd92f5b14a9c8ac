"""
Success-fraction sweeps over sample budgets, comparing the learner with Chow-Liu.

Every random draw descends from the config's master seed through
``numpy.random.SeedSequence``, so a sweep is reproducible regardless of how
many worker processes evaluate it.
"""

import csv
import dataclasses
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .baseline import chow_liu
from .equivalence import is_member
from .estimator import empirical_moments
from .exceptions import FormatError, InvalidParameterError, TreeIsingError
from .formats.edges import read_edges
from .formats.model import read_model
from .formats.samples import write_samples
from .learner import find_tree
from .noise import sample_bound
from .sampler import apply_noise, sample_clean
from .topology import chain_tree, random_model, random_noise, star_tree
from .types import (
    Algorithm,
    AssumptionParams,
    ExperimentConfig,
    IsingModel,
    NoiseSpec,
    TrialResult,
)
from .utils import measure_time

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).parent / "presets"

CSV_COLUMNS = [
    "algorithm",
    "topology",
    "n",
    "m",
    "trials",
    "successes",
    "success_fraction",
    "mean_wall_ms",
    "seed",
]


def _parse_budgets(value: str) -> Tuple[int, ...]:
    return tuple(int(part) for part in value.split(",") if part.strip())


CONFIG_KEYS: Dict[str, Callable[[str], object]] = {
    "topology": str,
    "n": int,
    "w_min": float,
    "w_max": float,
    "bias": float,
    "q_max": float,
    "budgets": _parse_budgets,
    "trials": int,
    "seed": int,
    "mu_max": float,
    "rho_min": float,
    "rho_max": float,
    "epsilon": float,
    "model_file": str,
    "calibration_samples": int,
    "negative_weight_fraction": float,
}

REQUIRED_KEYS = ("topology", "n", "w_min", "w_max", "q_max", "budgets")


def parse_config(text: str, base_dir: Optional[Path] = None) -> ExperimentConfig:
    """
    Parse a flat ``key = value`` config; ``#`` starts a comment.

    Raises:
        FormatError: malformed line, unknown or repeated key, bad value, or a
            required key is missing.
        InvalidParameterError: values parse but are out of range.
    """
    values: Dict[str, object] = {}
    for k, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise FormatError(f"line {k}: expected 'key = value', got {raw!r}")
        if key not in CONFIG_KEYS:
            raise FormatError(f"line {k}: unknown key {key!r}")
        if key in values:
            raise FormatError(f"line {k}: key {key!r} given twice")
        try:
            values[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise FormatError(f"line {k}: bad value for {key!r}: {value!r}") from None

    missing = [key for key in REQUIRED_KEYS if key not in values]
    if missing:
        raise FormatError(f"config is missing required keys: {', '.join(missing)}")

    model_file = values.get("model_file")
    if isinstance(model_file, str) and base_dir is not None and not Path(model_file).is_absolute():
        values["model_file"] = str(base_dir / model_file)
    return ExperimentConfig(**values)  # type: ignore[arg-type]


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)


def list_presets() -> List[str]:
    return sorted(p.stem for p in PRESET_DIR.glob("*.cfg"))


def load_preset(name: str) -> ExperimentConfig:
    path = PRESET_DIR / f"{name}.cfg"
    if not path.is_file():
        raise InvalidParameterError(
            f"unknown preset {name!r}; available: {', '.join(list_presets())}"
        )
    return load_config(path)


def apply_overrides(
    config: ExperimentConfig,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    budgets: Optional[Sequence[int]] = None,
) -> ExperimentConfig:
    changes: Dict[str, object] = {}
    if trials is not None:
        changes["trials"] = trials
    if seed is not None:
        changes["seed"] = seed
    if budgets is not None:
        changes["budgets"] = tuple(budgets)
    return dataclasses.replace(config, **changes) if changes else config


def epsilon_fallback(q_max: float, mu_max: float, epsilon: float) -> AssumptionParams:
    """Assumption bounds when only q_max and mu_max are known: rho in [epsilon, 1 - epsilon]."""
    if not (0.0 < epsilon < 0.5):
        raise InvalidParameterError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    return AssumptionParams(mu_max=mu_max, rho_min=epsilon, rho_max=1.0 - epsilon, q_max=q_max)


def epsilon_for_budget(
    q_max: float, mu_max: float, n: int, tau: float, m: int, iterations: int = 100
) -> Optional[float]:
    """
    Smallest epsilon whose sufficient sample count fits within m samples.

    The required count falls as epsilon grows, so bisection applies. Returns
    None when even epsilon close to 0.5 needs more than m samples.
    """
    def required(epsilon: float) -> int:
        return sample_bound(epsilon_fallback(q_max, mu_max, epsilon), n, tau).m_required

    hi = 0.5 - 1e-9
    if required(hi) > m:
        return None
    lo = 1e-9
    if required(lo) <= m:
        return lo
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if required(mid) <= m:
            hi = mid
        else:
            lo = mid
    return hi


def draw_model(config: ExperimentConfig, rng: np.random.Generator) -> Tuple[IsingModel, Optional[NoiseSpec]]:
    """A fresh model for one trial; the file topology always returns the file's model."""
    if config.topology == "file":
        model, noise = read_model(config.model_file)  # type: ignore[arg-type]
        if model.n != config.n:
            raise InvalidParameterError(
                f"config says n={config.n} but {config.model_file} has {model.n} nodes"
            )
        return model, noise
    tree = chain_tree(config.n) if config.topology == "chain" else star_tree(config.n)
    model = random_model(
        tree,
        config.w_min,
        config.w_max,
        rng,
        bias=config.bias,
        negative_fraction=config.negative_weight_fraction,
    )
    return model, None


def estimate_mu_max(config: ExperimentConfig, seed: np.random.SeedSequence) -> float:
    """Largest |mean| over nodes in a clean calibration sample of one model draw."""
    model_seed, sample_seed = seed.spawn(2)
    model, _ = draw_model(config, np.random.default_rng(model_seed))
    batch = sample_clean(model, config.calibration_samples, sample_seed)
    mu_max = float(np.abs(batch.values.mean(axis=0)).max())
    if mu_max >= 1.0:
        raise InvalidParameterError("calibration sample has a constant node; mu_max would be 1")
    logger.info(f"Estimated mu_max={mu_max:.6f} from {config.calibration_samples} clean samples")
    return mu_max


def derive_params(config: ExperimentConfig, seed: np.random.SeedSequence) -> AssumptionParams:
    """
    Assumption bounds for the learner.

    Missing rho bounds come from epsilon when set, else from tanh of the weight
    range, which is the exact correlation of an unbiased edge. A missing mu_max
    is estimated from a calibration sample.
    """
    mu_max = config.mu_max if config.mu_max is not None else estimate_mu_max(config, seed)
    if config.epsilon is not None:
        return epsilon_fallback(config.q_max, mu_max, config.epsilon)

    if config.topology == "file":
        model, _ = read_model(config.model_file)  # type: ignore[arg-type]
        magnitudes = [abs(w) for w in model.weights]
        w_low, w_high = min(magnitudes), max(magnitudes)
    else:
        w_low, w_high = config.w_min, config.w_max
    rho_min = config.rho_min if config.rho_min is not None else math.tanh(w_low)
    rho_max = config.rho_max if config.rho_max is not None else math.tanh(w_high)
    return AssumptionParams(mu_max=mu_max, rho_min=rho_min, rho_max=rho_max, q_max=config.q_max)


@dataclass(frozen=True)
class TrialTask:
    config: ExperimentConfig
    params: AssumptionParams
    m: int
    trial: int
    seed: np.random.SeedSequence
    export_dir: Optional[str] = None
    external_dir: Optional[str] = None


def _score(
    algorithm: Algorithm, task: TrialTask, truth: IsingModel, learn: Callable[[], object]
) -> TrialResult:
    start_time = measure_time()
    try:
        learned = learn()
        success = is_member(learned, truth.tree)  # type: ignore[arg-type]
        failure = None
    except (TreeIsingError, OSError) as e:
        logger.warning(f"{algorithm} failed on m={task.m} trial {task.trial}: {e}")
        success, failure = False, str(e)
    wall_ms = (measure_time() - start_time) * 1000.0
    return TrialResult(
        trial=task.trial, m=task.m, algorithm=algorithm, success=success, wall_ms=wall_ms, failure=failure
    )


def run_trial(task: TrialTask) -> List[TrialResult]:
    """Draw, sample, corrupt and learn once; one result per algorithm."""
    model_seed, noise_seed, clean_seed, flip_seed = task.seed.spawn(4)
    truth, bundled_noise = draw_model(task.config, np.random.default_rng(model_seed))
    noise = bundled_noise or random_noise(truth.n, task.config.q_max, np.random.default_rng(noise_seed))

    clean = sample_clean(truth, task.m, clean_seed)
    noisy = apply_noise(clean, noise, flip_seed)
    name = f"m{task.m}_t{task.trial}"
    if task.export_dir is not None:
        write_samples(Path(task.export_dir) / f"{name}.samples", noisy)

    results = [
        _score("ours", task, truth, lambda: find_tree(empirical_moments(noisy), task.params).to_tree()),
        _score("chowliu", task, truth, lambda: chow_liu(noisy)),
    ]
    if task.external_dir is not None:
        path = Path(task.external_dir) / f"{name}.edges"
        results.append(_score("external", task, truth, lambda: read_edges(path, truth.n)))
    return results


@dataclass(frozen=True)
class ExperimentRow:
    algorithm: Algorithm
    topology: str
    n: int
    m: int
    trials: int
    successes: int
    mean_wall_ms: float
    seed: int

    @property
    def success_fraction(self) -> float:
        return self.successes / self.trials


def run_experiment(
    config: ExperimentConfig,
    workers: int = 1,
    export_dir: Optional[Union[str, Path]] = None,
    external_dir: Optional[Union[str, Path]] = None,
) -> List[ExperimentRow]:
    """
    Run every (budget, trial) of a sweep and aggregate success per (budget, algorithm).

    Learner failures count as unsuccessful trials and never stop the sweep.
    Rows come out in budget order, then algorithm order, whatever ``workers`` is.
    """
    if workers < 1:
        raise InvalidParameterError(f"workers must be at least 1, got {workers}")

    calibration_seed, trials_seed = np.random.SeedSequence(config.seed).spawn(2)
    params = derive_params(config, calibration_seed)
    logger.info(
        f"Sweep {config.topology} n={config.n} budgets={list(config.budgets)} "
        f"trials={config.trials} params={params}"
    )

    tasks = []
    for m, budget_seed in zip(config.budgets, trials_seed.spawn(len(config.budgets))):
        for trial, seed in enumerate(budget_seed.spawn(config.trials)):
            tasks.append(
                TrialTask(
                    config=config,
                    params=params,
                    m=m,
                    trial=trial,
                    seed=seed,
                    export_dir=str(export_dir) if export_dir is not None else None,
                    external_dir=str(external_dir) if external_dir is not None else None,
                )
            )

    start_time = measure_time()
    if workers == 1:
        outcomes = [run_trial(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(run_trial, tasks))
    logger.info(f"Ran {len(tasks)} trials in {measure_time() - start_time:.1f}s")

    algorithms: List[Algorithm] = ["ours", "chowliu"]
    if external_dir is not None:
        algorithms.append("external")

    rows = []
    for m in config.budgets:
        for algorithm in algorithms:
            results = [
                r for outcome in outcomes for r in outcome if r.m == m and r.algorithm == algorithm
            ]
            rows.append(
                ExperimentRow(
                    algorithm=algorithm,
                    topology=config.topology,
                    n=config.n,
                    m=m,
                    trials=len(results),
                    successes=sum(r.success for r in results),
                    mean_wall_ms=float(np.mean([r.wall_ms for r in results])),
                    seed=config.seed,
                )
            )
            logger.info(
                f"{algorithm:8s} m={m:<8d} success={rows[-1].successes}/{rows[-1].trials}"
            )
    return rows


def format_csv(rows: Sequence[ExperimentRow], timing: bool = False) -> str:
    """
    Rows as CSV under the fixed header.

    Wall times vary between runs, so ``mean_wall_ms`` is left empty unless
    ``timing`` is set; the output is then byte-identical for a fixed seed.
    """
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                "algorithm": row.algorithm,
                "topology": row.topology,
                "n": row.n,
                "m": row.m,
                "trials": row.trials,
                "successes": row.successes,
                "success_fraction": f"{row.success_fraction:.4f}",
                "mean_wall_ms": f"{row.mean_wall_ms:.3f}" if timing else "",
                "seed": row.seed,
            }
        )
    return buffer.getvalue()
