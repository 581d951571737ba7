"""Python access to the genlab experiment library."""

import json

from . import _genlab
from ._genlab import UnsupportedModel, ValidationError, ball_counts, experiment_kinds, sha256_hex

__all__ = [
    "UnsupportedModel",
    "ValidationError",
    "ball_counts",
    "classify",
    "effective_config",
    "experiment_kinds",
    "run",
    "sha256_hex",
    "threshold_count",
]


def threshold_count(k, n, T):
    """Exact free-group count of elements of B(n) with cyclic length at most T, with both inequality verdicts."""
    return json.loads(_genlab.threshold_count(k, n, T))


def classify(model, word, generators=()):
    return json.loads(_genlab.classify(model, word, list(generators)))


def effective_config(config, seed=None):
    return json.loads(_genlab.effective_config(json.dumps(config), seed))


def run(config, workers=1, out_dir="", seed=None):
    """Validates and runs a config dict; returns (exit_code, manifest)."""
    eff = _genlab.effective_config(json.dumps(config), seed)
    code, manifest = _genlab.run(eff, workers, str(out_dir))
    return code, json.loads(manifest)
