"""Fine-tune transformer checkpoints on toolkit-format multi-label data and
emit toolkit-format prediction files.

The adapter talks to the main toolkit only through its file formats and CLI:
validation micro-F1 during fine-tuning comes from shelling out to the
toolkit's ``score`` command, so there is exactly one scoring implementation.
"""

__version__ = "0.1.0"


class AdapterError(Exception):
    """User-facing adapter failure (bad config, bad data, missing checkpoint)."""
