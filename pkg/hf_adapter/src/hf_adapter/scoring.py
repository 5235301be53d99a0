"""Validation scoring via the main toolkit's CLI.

The adapter never computes micro-F1 itself; both components score through
the same command.
"""

from __future__ import annotations

import json
import subprocess
import sys

from . import AdapterError

DEFAULT_SCORER = [sys.executable, "-m", "propdetect"]


def score_micro_f1(gold_path, pred_path, labels_path, scorer_command=None) -> float:
    command = list(scorer_command or DEFAULT_SCORER) + [
        "score", "--gold", str(gold_path), "--pred", str(pred_path),
        "--labels", str(labels_path),
    ]
    result = subprocess.run(command, capture_output=True, text=True)
    if result.returncode != 0:
        raise AdapterError(
            f"toolkit scorer failed (exit {result.returncode}): {result.stderr.strip()}"
        )
    try:
        return float(json.loads(result.stdout)["micro_f1"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise AdapterError(f"cannot parse scorer output: {e}") from e
