"""Registered example systems, addressable by name."""

from __future__ import annotations

import json
from importlib import resources

from .anharmonic import AnharmonicOscillator
from .free import FreeParticle
from .relativistic import RelativisticParticle
from .s3 import S3SigmaModel

REGISTRY = {
    "free": FreeParticle,
    "relativistic": RelativisticParticle,
    "anharmonic": AnharmonicOscillator,
    "s3": S3SigmaModel,
}


def get_model(name: str, **params):
    try:
        cls = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; known: {sorted(REGISTRY)}") from None
    return cls(**params)


def load_fixture(name: str) -> dict:
    """Expected algebra tables shipped with the package (``fixtures/<name>.json``)."""
    text = resources.files(__package__).joinpath("fixtures", f"{name}.json").read_text()
    data = json.loads(text)
    if data.get("version") != 1:
        raise ValueError(f"fixture {name!r} has unsupported version {data.get('version')!r}")
    return data


__all__ = ["AnharmonicOscillator", "FreeParticle", "RelativisticParticle", "S3SigmaModel", "REGISTRY",
           "get_model", "load_fixture"]
