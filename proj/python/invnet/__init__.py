"""LU-structured invertible networks: exact inverses by triangular solves."""

import json

from ._core import (
    ConfigError,
    CorruptArtifactError,
    DimensionError,
    InvnetError,
    Net,
    NumericError,
    SingularityError,
    TriangularParams,
    evaluate,
)
from . import _core


def default_config(kind):
    """Default run config for "sine", "polynomial", "exponential" or "embedding"."""
    return json.loads(_core.default_config(kind))


def generate(config):
    """Generate train/eval arrays for a run config dict."""
    out = _core.generate(json.dumps(config))
    out["meta"] = json.loads(out["meta"])
    return out


def train(config, data):
    """Fit a net on data from generate(); returns (net, history)."""
    return _core.train(json.dumps(config), data["train"]["inputs"], data["train"]["targets"],
                       data["eval"]["inputs"], data["eval"]["targets"])


__all__ = [
    "ConfigError", "CorruptArtifactError", "DimensionError", "InvnetError", "Net", "NumericError",
    "SingularityError", "TriangularParams", "default_config", "evaluate", "generate", "train",
]
