"""Multi-label tweet classification toolkit.

Pipeline stages: text normalization, label statistics, imbalance-aware
oversampling, hashed n-gram baseline training, hard-vote ensembling and
micro-F1 scoring. Everything is exposed three ways: as a library, as a
FastAPI service (``propdetect.service``), and as a CLI that talks to the
service (``propdetect.cli``).
"""

__version__ = "0.1.0"

MODEL_FORMAT_VERSION = 1
