"""Scenario configuration: a JSON document validated with pydantic.

Example::

    {
      "space": "H3",
      "p": 1.5,
      "q": [2.0],
      "multiplier": {"expr": "heat(t)", "params": {"t": 1.0}},
      "kernel": {"epsilon": 1e-4},
      "seed": 7
    }

``space`` is a preset name or ``{"m_alpha": .., "m_2alpha": ..}``. Validation
failures are reported with a dotted path to the offending field.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .multiplier import MultiplierExpr, MultiplierSyntaxError, UnknownIdentifierError, parse_multiplier
from .opnorms import CertificateConfig
from .space import PRESETS, SpaceParams, dual_exponent
from .spherical.expansion import MAX_TERMS
from .spherical.radial import CROSSOVER

__all__ = ["ScenarioConfig", "ConfigError", "load_config", "format_validation_error"]


class ConfigError(ValueError):
    """Schema or semantic error in a scenario configuration; ``loc`` names the field."""

    def __init__(self, loc: str, msg: str):
        super().__init__(f"{loc}: {msg}")
        self.loc = loc
        self.msg = msg


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Multiplicities(_Strict):
    m_alpha: int = Field(ge=1)
    m_2alpha: int = Field(default=0, ge=0)


class MultiplierSpec(_Strict):
    expr: str
    params: dict[str, float] = Field(default_factory=dict)


class SphericalSection(_Strict):
    crossover: float = Field(default=CROSSOVER, gt=0)
    max_terms: int = Field(default=MAX_TERMS, ge=1, le=400)
    lambdas: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0, 5.0])
    t: list[float] = Field(default_factory=lambda: [0.1, 0.5, 1.0, 2.0, 5.0])


class KernelSection(_Strict):
    epsilon: float = Field(default=1e-4, gt=0)
    t_max: float = Field(default=16.0, gt=2)
    n_points: int = Field(default=4096, ge=64)


class CertificateSection(_Strict):
    levels: int = Field(default=3, ge=2, le=5)
    drift: float = Field(default=0.10, gt=0, lt=1)
    mh_order: int = Field(default=8, ge=0, le=16)
    nbar_per_unit: int = Field(default=4, ge=1)
    line_step: float = Field(default=1.0 / 16, gt=0)
    mc_tests: int = Field(default=200, ge=1)


class GeometrySection(_Strict):
    samples: int = Field(default=100_000, ge=1)
    t_min: float = -8.0
    t_max: float = 8.0
    norm_max: float = Field(default=10.0, gt=0)


class ScenarioConfig(_Strict):
    space: Union[str, Multiplicities] = "H3"
    p: float = 1.5
    q: list[float] = Field(default_factory=lambda: [2.0])
    variant: Literal["main", "main_i"] = "main"
    multiplier: MultiplierSpec = MultiplierSpec(expr="heat(1)")
    seed: int = Field(default=0, ge=0)
    out: str = "out"
    tol: float | None = Field(default=None, gt=0)
    spherical: SphericalSection = SphericalSection()
    kernel: KernelSection = KernelSection()
    certificate: CertificateSection = CertificateSection()
    geometry: GeometrySection = GeometrySection()

    @field_validator("space")
    @classmethod
    def _known_preset(cls, v):
        if isinstance(v, str) and v.upper() not in PRESETS:
            raise ValueError(f"unknown preset {v!r}; known presets are {sorted(PRESETS)}")
        return v

    @field_validator("p")
    @classmethod
    def _exponent(cls, v):
        if not math.isfinite(v) or v <= 1:
            raise ValueError("p must be a finite number > 1")
        return v

    @model_validator(mode="after")
    def _q_in_range(self):
        if self.variant == "main_i":
            return self
        lo, hi = sorted((self.p, dual_exponent(self.p)))
        for i, q in enumerate(self.q):
            if not (lo - 1e-12 <= q <= hi + 1e-12):
                raise ConfigError(f"q[{i}]", f"q = {q} lies outside [p, p'] = [{lo:g}, {hi:g}]")
        return self

    def space_params(self) -> SpaceParams:
        if isinstance(self.space, str):
            return PRESETS[self.space.upper()]
        return SpaceParams(self.space.m_alpha, self.space.m_2alpha)

    def parsed_multiplier(self) -> MultiplierExpr:
        try:
            return parse_multiplier(self.multiplier.expr, self.multiplier.params)
        except (MultiplierSyntaxError, UnknownIdentifierError) as exc:
            raise ConfigError("multiplier.expr", str(exc)) from exc

    def certificate_config(self) -> CertificateConfig:
        c = self.certificate
        return CertificateConfig(
            epsilon=self.kernel.epsilon,
            kernel_t_max=self.kernel.t_max,
            kernel_points=self.kernel.n_points,
            levels=c.levels,
            drift=c.drift,
            mh_order=c.mh_order,
            nbar_per_unit=c.nbar_per_unit,
            line_step=c.line_step,
            mc_tests=c.mc_tests,
        )


def format_validation_error(exc: ValidationError) -> list[ConfigError]:
    out = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<root>"
        ctx_err = err.get("ctx", {}).get("error")
        if isinstance(ctx_err, ConfigError):
            out.append(ctx_err)
        else:
            out.append(ConfigError(loc, err["msg"]))
    return out


def load_config(source: Union[str, Path, dict, None] = None, **overrides) -> ScenarioConfig:
    """Validate a config file, a mapping or nothing (defaults), then apply overrides.

    Raises :class:`ConfigError` for the first problem found.
    """
    if source is None:
        data = {}
    elif isinstance(source, dict):
        data = dict(source)
    else:
        try:
            data = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise format_validation_error(exc)[0] from exc
    except ConfigError:
        raise
    cfg.parsed_multiplier()
    return cfg
