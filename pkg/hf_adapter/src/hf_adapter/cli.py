"""hf-adapter command line: finetune and predict, both driven by a config file."""

from __future__ import annotations

import argparse
import sys

from . import AdapterError, __version__


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hf-adapter",
        description="Fine-tune transformer checkpoints on toolkit-format data and "
                    "emit toolkit-format prediction files.",
    )
    parser.add_argument("--version", action="version", version=f"hf-adapter {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="fine-tune a checkpoint; keep the best epoch")
    p.add_argument("--config", required=True)

    p = sub.add_parser("predict", help="write predictions for a dataset")
    p.add_argument("--config", required=True)

    args = parser.parse_args(argv)
    try:
        from .config import load_config

        config = load_config(args.config)
        # Imported late: torch/transformers are heavy.
        from . import runner

        if args.command == "finetune":
            out = runner.finetune(config)
            print(f"saved best checkpoint to {out}")
        else:
            out = runner.predict_file(config)
            print(f"wrote predictions to {out}")
        return 0
    except AdapterError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
