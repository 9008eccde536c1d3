"""
Run configuration: defaults, YAML/JSON loading and validation.
"""

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)

METHOD_CHOICES = ("harmonic", "perron", "both")
FORMAT_CHOICES = ("json", "csv", "text")


@dataclass
class RunConfig:
    """
    Everything a run needs besides the subcommand.

    ``ks`` of None means "iterate to the fixed point".
    """

    edges: Optional[str] = None
    gammas: List[float] = field(default_factory=lambda: [0.0])
    ks: Optional[List[int]] = None
    method: str = "both"
    undirected_hint: bool = False
    largest_component_only: bool = False
    zero_based: bool = False
    output_format: str = "text"
    out: Optional[str] = None
    strengthening_factor: float = 0.5
    perron_tol: float = 1e-12
    perron_max_iter: int = 100000
    show_layer_sets: bool = False
    vertex_labels: Optional[str] = None
    layer_labels: Optional[str] = None

    def validate(self) -> "RunConfig":
        """Collect every violated constraint and raise them together"""
        errors = []
        if not self.gammas:
            errors.append("at least one gamma is required")
        for gamma in self.gammas:
            if not isinstance(gamma, (int, float)) or isinstance(gamma, bool):
                errors.append(f"gamma {gamma!r} is not a number")
            elif not gamma >= 0 or gamma == float("inf"):
                errors.append(f"gamma must be finite and >= 0, got {gamma}")
        if self.ks is not None:
            if not self.ks:
                errors.append("k list is empty")
            for k in self.ks:
                if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                    errors.append(f"k must be a positive integer, got {k!r}")
        if self.method not in METHOD_CHOICES:
            errors.append(f"method must be one of {', '.join(METHOD_CHOICES)}, got {self.method!r}")
        if self.output_format not in FORMAT_CHOICES:
            errors.append(
                f"format must be one of {', '.join(FORMAT_CHOICES)}, got {self.output_format!r}")
        if not isinstance(self.strengthening_factor, (int, float)) \
                or not 0.0 < self.strengthening_factor < 1.0:
            errors.append(f"strengthening factor must lie in (0, 1), got {self.strengthening_factor!r}")
        if not isinstance(self.perron_tol, (int, float)) or not self.perron_tol > 0:
            errors.append(f"perron tolerance must be positive, got {self.perron_tol!r}")
        if not isinstance(self.perron_max_iter, int) or self.perron_max_iter < 1:
            errors.append(f"perron max_iter must be a positive integer, got {self.perron_max_iter!r}")

        if errors:
            raise ConfigError(errors)
        return self

    def with_overrides(self, **overrides) -> "RunConfig":
        """Copy with every non-None override applied"""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError(["configuration must be a mapping"])
        data = dict(data)
        # a single value is accepted for the list fields
        if "gamma" in data:
            data["gammas"] = data.pop("gamma")
        if "k" in data:
            data["ks"] = data.pop("k")
        if "gammas" in data and not isinstance(data["gammas"], list):
            data["gammas"] = [data["gammas"]]
        if data.get("ks") == "max":
            data["ks"] = None
        elif "ks" in data and data["ks"] is not None and not isinstance(data["ks"], list):
            data["ks"] = [data["ks"]]

        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown configuration key '{key}'" for key in unknown])
        return cls(**data).validate()


def load_run_config(config_path) -> RunConfig:
    """Read a RunConfig from a .yaml/.yml or .json file"""
    path = Path(config_path)
    if not path.exists():
        raise ConfigError([f"configuration file not found: {path}"])
    try:
        with open(path, "r", encoding="utf-8") as handle:
            if path.suffix.lower() == ".json":
                data = json.load(handle)
            else:
                data = yaml.safe_load(handle)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError([f"cannot parse {path}: {exc}"])

    logger.debug("loaded run configuration from %s", path)
    return RunConfig.from_mapping(data or {})
