"""Utility functions for loading the engine configuration and adding constructors."""
import os
from dataclasses import fields, replace
from typing import Any

import yaml

from gesture_engine.errors import ConfigValidationError
from gesture_engine.interfaces.interface_condition_bundle import AudioFeatureLayout
from gesture_engine.interfaces.interface_engine_parameter import (
    DatasetConfig,
    DenoiserConfig,
    DiffusionConfig,
    EngineConfig,
    HandshakeConfig,
    MotionConfig,
    TrainingConfig,
)
from gesture_engine.utilities.json_encoder import digest

SECTIONS: dict[str, type] = {
    "motion": MotionConfig,
    "audio": AudioFeatureLayout,
    "diffusion": DiffusionConfig,
    "denoiser": DenoiserConfig,
    "training": TrainingConfig,
    "handshake": HandshakeConfig,
    "dataset": DatasetConfig,
}


class EngineLoader(yaml.SafeLoader):
    """Safe YAML loader with constructors for the configuration sections."""


def _section_constructor(cls: type):
    """Create a constructor building ``cls`` from a tagged mapping node."""

    def _construct(loader: yaml.SafeLoader, node: yaml.nodes.MappingNode) -> Any:
        # Ignore type checking here since mypy requires keywords to be strings
        mapping = loader.construct_mapping(node, deep=True)
        try:
            return cls(**mapping)  # type: ignore
        except TypeError as exc:
            raise ConfigValidationError(f"Invalid {cls.__name__} entry: {exc}") from exc

    return _construct


for _cls in SECTIONS.values():
    EngineLoader.add_constructor(f"!{_cls.__name__}", _section_constructor(_cls))


def _parse_override(text: str) -> tuple[str, str, Any]:
    key, sep, raw = text.partition("=")
    section, dot, name = key.strip().partition(".")
    if not sep or not dot or not name:
        raise ConfigValidationError(f"Override {text!r} must have the form section.field=value")
    return section, name, yaml.safe_load(raw)


def apply_overrides(config: EngineConfig, overrides: list[str] | None) -> EngineConfig:
    """Apply ``section.field=value`` overrides, values are parsed as YAML scalars or lists.

    Raises
    ------
    ConfigValidationError
        Unknown section or field, or the new value violates a precondition
    """
    for override in overrides or []:
        section, name, value = _parse_override(override)
        if section not in SECTIONS:
            raise ConfigValidationError(f"Unknown configuration section {section!r}")
        current = getattr(config, section)
        if name not in {f.name for f in fields(current) if f.init}:
            raise ConfigValidationError(f"Unknown field {name!r} in configuration section {section!r}")
        config = replace(config, **{section: replace(current, **{name: value})})
    return config


def load_config(path_to_config: str | os.PathLike, overrides: list[str] | None = None) -> EngineConfig:
    """Construct the engine configuration from a yaml configuration file.

    Uses a custom yaml loader which contains a constructor for every configuration section.
    Missing sections take their default values.

    Parameters
    ----------
    path_to_config
        Path to configuration yaml file
    overrides, optional
        List of ``section.field=value`` overrides applied after loading, by default None

    Returns
    -------
        Validated engine configuration

    Raises
    ------
    FileNotFoundError
        File missing or not a yaml file
    ConfigValidationError
        Unknown keys or invalid values
    """
    file_path = os.path.normpath(path_to_config)
    if not file_path.endswith((".yaml", ".yml")):
        raise FileNotFoundError("Invalid configuration file, yaml file required.")
    with open(file_path, "rb") as file:
        content = yaml.load(file, Loader=EngineLoader)  # noqa: S506
    content = content or {}
    if not isinstance(content, dict):
        raise ConfigValidationError("Configuration file must contain a mapping of sections")
    unknown = set(content) - set(SECTIONS)
    if unknown:
        raise ConfigValidationError(f"Unknown configuration sections: {sorted(unknown)}")
    for name, section in content.items():
        if not isinstance(section, SECTIONS[name]):
            raise ConfigValidationError(f"Section {name!r} requires the !{SECTIONS[name].__name__} tag")
    return apply_overrides(EngineConfig(**content), overrides)


def config_digest(config: EngineConfig) -> str:
    """SHA-256 digest of the effective configuration."""
    return digest(config.dict())


def config_from_dict(data: dict[str, dict[str, Any]]) -> EngineConfig:
    """Rebuild an engine configuration from the output of ``EngineConfig.dict()``."""
    return EngineConfig(**{name: SECTIONS[name](**values) for name, values in data.items()})
