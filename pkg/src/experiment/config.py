"""Typed experiment configuration loaded from the JSON config files."""
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional

from src.dictionary.factorization import FactorizationOptions
from src.dictionary.scaling import DEFAULT_SNAP_THRESHOLD
from src.errors import ConfigError
from src.solvers.kernel import SolverOptions
from src.student.train import LEAF_SOLVERS, SCALES, SolverConfig
from src.teacher.curricula import VARIANTS, CurriculumDims
from utils.config_loader import load_config, resolve_config_path
from utils.logger import get_logger

logger = get_logger("experiment_config", log_level=logging.DEBUG)

REQUIRED_FIELDS = ("dims", "depth", "t", "tbar", "q_samples", "seeds", "grader_tol", "scale", "variant")


@dataclass
class ExperimentConfig:
    dims: CurriculumDims
    depth: int
    t: int
    tbar: int
    q_samples: int
    seeds: List[int]
    grader_tol: float
    scale: str
    variant: str
    label: str = ""
    leaf_solver: str = "given"
    brute_max_support: int = 4
    match_tol: float = 1e-6
    theory_constant_c: float = 1.0
    snap_threshold: float = DEFAULT_SNAP_THRESHOLD
    solver: SolverOptions = field(default_factory=SolverOptions)
    factorization: FactorizationOptions = field(default_factory=FactorizationOptions)

    def validate(self) -> None:
        """
        Raises:
            ConfigError: If an invariant of the configuration is violated.
        """
        if self.tbar <= 0 or self.t < self.tbar:
            raise ConfigError(f"Need t >= tbar > 0, got t={self.t}, tbar={self.tbar}.")
        if self.t != 2 * self.tbar:
            raise ConfigError(f"Binary curricula need t = 2 tbar, got t={self.t}, tbar={self.tbar}.")
        if not self.seeds:
            raise ConfigError("At least one seed is required.")
        if any(seed < 0 for seed in self.seeds):
            raise ConfigError(f"Seeds must be non-negative, got {self.seeds}.")
        if self.scale not in SCALES:
            raise ConfigError(f"scale must be one of {SCALES}, got '{self.scale}'.")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got '{self.variant}'.")
        if self.leaf_solver not in LEAF_SOLVERS:
            raise ConfigError(f"leaf_solver must be one of {LEAF_SOLVERS}, got '{self.leaf_solver}'.")
        if self.q_samples < 1 or self.depth < 0:
            raise ConfigError(f"Need q_samples >= 1 and depth >= 0, got {self.q_samples}, {self.depth}.")
        if self.grader_tol <= 0:
            raise ConfigError(f"grader_tol must be positive, got {self.grader_tol}.")

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            leaf_solver=self.leaf_solver,
            brute_max_support=self.brute_max_support,
            grader_tol=self.grader_tol,
            scale=self.scale,
            snap_threshold=self.snap_threshold,
            solver=self.solver,
            factorization=self.factorization,
        )

    def with_seeds(self, seeds: List[int]) -> "ExperimentConfig":
        return replace(self, seeds=list(seeds))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["factorization"]["snap_threshold"] = data.pop("snap_threshold")
        data["factorization"].pop("seed", None)
        return data


def experiment_config_from_dict(raw: Dict[str, Any]) -> ExperimentConfig:
    """
    Builds a validated config from the JSON layout of ``utils/config.json``.

    Raises:
        ConfigError: For missing fields, unknown option names or violated invariants.
    """
    missing = [name for name in REQUIRED_FIELDS if name not in raw]
    if missing:
        raise ConfigError(f"Configuration is missing fields: {missing}")
    try:
        dims = CurriculumDims.from_dict(raw["dims"], depth=int(raw["depth"]))
        factorization_raw = dict(raw.get("factorization", {}))
        snap_threshold = float(factorization_raw.pop("snap_threshold", DEFAULT_SNAP_THRESHOLD))
        config = ExperimentConfig(
            dims=dims,
            depth=int(raw["depth"]),
            t=int(raw["t"]),
            tbar=int(raw["tbar"]),
            q_samples=int(raw["q_samples"]),
            seeds=[int(seed) for seed in raw["seeds"]],
            grader_tol=float(raw["grader_tol"]),
            scale=str(raw["scale"]),
            variant=str(raw["variant"]),
            label=str(raw.get("label", "")),
            leaf_solver=str(raw.get("leaf_solver", "given")),
            brute_max_support=int(raw.get("brute_max_support", 4)),
            match_tol=float(raw.get("match_tol", 1e-6)),
            theory_constant_c=float(raw.get("theory_constant_c", 1.0)),
            snap_threshold=snap_threshold,
            solver=SolverOptions(**raw.get("solver", {})),
            factorization=FactorizationOptions(**factorization_raw),
        )
    except (TypeError, ValueError, KeyError) as e:
        logger.error(f"Invalid configuration: {e}")
        raise ConfigError(f"Invalid configuration: {e}") from e
    config.validate()
    return config


def load_experiment_config(path: Optional[str] = None, seed: Optional[int] = None) -> ExperimentConfig:
    """
    Loads and validates an experiment config; ``seed`` replaces the seed list when given.

    Raises:
        ConfigError: If the file is missing, is not valid JSON, or fails validation.
    """
    config_path = resolve_config_path(path)
    try:
        raw = load_config(config_path)
    except FileNotFoundError as e:
        logger.error(f"Config file not found: {config_path}")
        raise ConfigError(f"Config file not found: {config_path}") from e
    except ValueError as e:
        logger.error(f"Config file {config_path} is not valid JSON: {e}")
        raise ConfigError(f"Config file {config_path} is not valid JSON: {e}") from e
    config = experiment_config_from_dict(raw)
    if seed is not None:
        config = config.with_seeds([seed])
    logger.info(f"Loaded experiment config '{config.label}' from {config_path} ({len(config.seeds)} seeds).")
    return config
