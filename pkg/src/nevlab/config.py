"""Experiment configuration: a YAML document validated into frozen pydantic models.

Unknown keys are rejected so that a misspelled option fails loudly instead of
being ignored.  Validation errors carry the dotted path of the offending field.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError, model_validator

from .errors import ConfigurationError

AUDIT_NAMES = (
    "radial_green_consistency", "atsuji_bound_audit",
    "exit_time", "coarea_audit", "dynkin_audit", "exit_distribution_audit", "characteristic_mc",
    "fmt_residual", "singular_form_bound",
    "borel_audit", "calculus_lemma_audit", "ldl_audit", "derivative_growth_audit",
    "metric_match_audit", "smt_curve_audit",
)
STOCHASTIC_AUDITS = frozenset({"exit_time", "coarea_audit", "dynkin_audit",
                               "exit_distribution_audit", "characteristic_mc"})

Target = float | str


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ProfileConfig(_Strict):
    kind: Literal["constant", "tabulated"]
    value: float | None = None
    file: str | None = None
    radii: list[float] | None = None
    kappa: list[float] | None = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "constant":
            if self.value is None:
                raise ValueError("a constant profile needs 'value'")
            if self.value > 0:
                raise ValueError("curvature must be non-positive")
        elif self.file is None and (self.radii is None or self.kappa is None):
            raise ValueError("a tabulated profile needs 'file' or both 'radii' and 'kappa'")
        return self


class SurfaceConfig(_Strict):
    name: Literal["euclidean_plane", "poincare_disc", "radial"] = "euclidean_plane"
    profile: ProfileConfig | None = None
    r_max: PositiveFloat | None = None

    @model_validator(mode="after")
    def _check(self):
        if self.name == "radial" and self.profile is None:
            raise ValueError("a radial surface needs a curvature profile")
        if self.name != "radial" and self.profile is not None:
            raise ValueError(f"{self.name} takes no curvature profile")
        return self


class MapConfig(_Strict):
    name: str = "exp"
    params: dict[str, float | str] = Field(default_factory=dict)


class GridConfig(_Strict):
    min: PositiveFloat = 2.0
    max: PositiveFloat = 30.0
    count: int = Field(40, ge=2)
    spacing: Literal["linear", "log"] = "log"
    values: list[float] | None = None

    @model_validator(mode="after")
    def _check(self):
        if self.values is not None:
            v = np.asarray(self.values, dtype=float)
            if v.size < 2 or np.any(np.diff(v) <= 0) or v[0] <= 0:
                raise ValueError("grid values must be positive and strictly increasing")
        elif not self.min < self.max:
            raise ValueError(f"grid must be strictly increasing (min {self.min} >= max {self.max})")
        return self

    def radii(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


class SimSection(_Strict):
    seed: int | None = Field(None, ge=0, lt=2**64)
    paths: PositiveInt = 100_000
    step_factor: PositiveFloat = 1e-4  # step_dt = step_factor * r^2
    max_steps: PositiveInt = 100_000_000


class Tolerances(_Strict):
    sigma: PositiveFloat = 3.0
    green: PositiveFloat = 1e-6
    fmt_window: PositiveFloat = 0.5
    fmt_slope: PositiveFloat = 0.05
    metric_match: PositiveFloat = 1e-4
    chi_alpha: PositiveFloat = 1e-3
    smt_slack: PositiveFloat = 0.1


class AuditConfig(_Strict):
    name: Literal[AUDIT_NAMES]
    label: str | None = None
    radii: list[PositiveFloat] | None = None
    targets: list[Target] | None = None
    k: list[PositiveInt] | None = None
    phi: list[Literal["one", "r2"]] | None = None
    u: list[Literal["re_z", "abs2", "constant"]] | None = None
    function: Literal["one", "r2", "zero", "exp", "identity", "constant", "characteristic"] | None = None
    n_bins: int = Field(16, ge=2)
    delta: PositiveFloat = 1.0
    eta: PositiveFloat = 1.0
    r_tilde: list[float] | None = None
    calibration_map: str = "z2m1"
    envelope: float = Field(1.0, ge=0)
    budget: float | None = Field(None, ge=0)
    extend: bool | None = None

    @property
    def key(self) -> str:
        return self.label or self.name


class ExperimentConfig(_Strict):
    surface: SurfaceConfig = Field(default_factory=SurfaceConfig)
    map: MapConfig = Field(default_factory=MapConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    sim: SimSection = Field(default_factory=SimSection)
    audits: list[AuditConfig] = Field(min_length=1)
    output: str = "results"
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @model_validator(mode="after")
    def _check(self):
        keys = [a.key for a in self.audits]
        dup = sorted({k for k in keys if keys.count(k) > 1})
        if dup:
            raise ValueError(f"audits: labels must be unique; repeated: {dup} (set 'label')")
        if self.sim.seed is None and any(a.name in STOCHASTIC_AUDITS for a in self.audits):
            raise ValueError("sim.seed: required when a stochastic audit is selected")
        return self

    # -- serialization --------------------------------------------------
    def canonical(self) -> dict:
        return self.model_dump(mode="json", exclude_none=True)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.canonical(), sort_keys=True)

    def digest(self) -> str:
        """Hash of everything that affects results (the output directory does not)."""
        data = {k: v for k, v in self.canonical().items() if k != "output"}
        text = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def with_overrides(self, seed: int | None = None, output: str | None = None) -> ExperimentConfig:
        data = self.canonical()
        if seed is not None:
            data.setdefault("sim", {})["seed"] = seed
        if output is not None:
            data["output"] = output
        return parse_config(data)


def _field_path(loc) -> str:
    return ".".join(str(p) for p in loc if not (isinstance(p, str) and p.startswith("function-")))


def parse_config(data) -> ExperimentConfig:
    """Validate a mapping; errors become :class:`ConfigurationError` naming the field."""
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a mapping", "<root>")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        field = _field_path(err["loc"])
        msg = err["msg"].removeprefix("Value error, ")
        if not field:
            head, sep, rest = msg.partition(": ")
            field, msg = (head, rest) if sep and " " not in head else ("<root>", msg)
        more = f" (and {exc.error_count() - 1} more)" if exc.error_count() > 1 else ""
        raise ConfigurationError(msg + more, field) from None


def load_config(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"not valid YAML: {exc}", "<document>") from None
    return parse_config(data if data is not None else {})


def load_config_file(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc.strerror}", "--config") from None
    return load_config(text)

