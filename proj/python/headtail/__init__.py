# Copyright 2026 The headtail Authors
# SPDX-License-Identifier: Apache-2.0
"""Head/tail rebalancing for self-improvement data, backed by the C++ core."""

import json

from ._headtail import (
    ConfigError,
    HeadtailError,
    SamplerError,
    SchemaError,
    calibrate_difficulty,
    csv_header,
    guided_success_probability,
    normalize_answer,
    rebalance_offline,
    reward,
    split_steps,
)
from . import _headtail

__all__ = [
    "ConfigError",
    "HeadtailError",
    "SamplerError",
    "SchemaError",
    "calibrate_difficulty",
    "csv_header",
    "guided_success_probability",
    "normalize_answer",
    "rebalance",
    "rebalance_offline",
    "reward",
    "run",
    "split_steps",
]


def run(config=None, seed=0):
    """Run one seed of the configured mode and return the report as a dict.

    ``config`` is a dict in the JSON config format; missing keys keep their
    defaults.
    """
    return json.loads(_headtail.run_json(json.dumps(config or {}), seed))


def rebalance(records, strategy="vanilla", K=8, L=4, min_cot_tokens=0, seed=0, exact=False):
    """Reshape offline log records (dicts) and return the kept records."""
    text = "".join(json.dumps(r) + "\n" for r in records)
    out = _headtail.rebalance_jsonl(text, strategy, K, L, min_cot_tokens, seed, exact)
    return [json.loads(line) for line in out.splitlines() if line]
