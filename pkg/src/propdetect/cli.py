"""Command-line interface.

Every subcommand is a thin client over the pipeline service: it reads local
files, sends their content to the service (in-process unless ``--server`` or
``PROPDETECT_SERVER`` points at a running instance) and writes the returned
artifacts. Set ``PROPDETECT_SEED`` to change the default training seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import MODEL_FORMAT_VERSION, __version__, corpus, predictions
from .client import ServiceClient
from .errors import ToolkitError
from .ioutils import atomic_write_text, json_line, json_pretty
from .pipeline import load_run_config, run_pipeline


def _env_seed() -> int:
    raw = os.environ.get("PROPDETECT_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ToolkitError(f"PROPDETECT_SEED must be an integer, got {raw!r}") from None


def _dataset_records(path, vocab=None, require_labels=False) -> list[dict]:
    examples = corpus.load_dataset(path, vocab=vocab, require_labels=require_labels)
    return [corpus.example_to_dict(e) for e in examples]


def _prediction_records(path) -> list[dict]:
    return [predictions.prediction_to_dict(p) for p in predictions.load_predictions(path)]


def _load_labels(path) -> list[str]:
    return list(corpus.load_vocabulary(path).labels)


def _write_jsonl(path, records: list[dict]) -> None:
    atomic_write_text(path, "".join(json_line(r) + "\n" for r in records))


def _print_json(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=False))


def cmd_preprocess(args, client: ServiceClient) -> int:
    records = _dataset_records(args.infile)
    result = client.preprocess(records, drop_hashtag_body=args.drop_hashtag_body)
    _write_jsonl(args.outfile, result["records"])
    _print_json(result["report"])
    return 0


def cmd_stats(args, client: ServiceClient) -> int:
    labels = _load_labels(args.labels) if args.labels else None
    records = _dataset_records(args.infile)
    if not records:
        raise ToolkitError(f"{args.infile}: dataset is empty")
    _print_json(client.stats(records, labels=labels))
    return 0


def cmd_oversample(args, client: ServiceClient) -> int:
    records = _dataset_records(args.infile, require_labels=True)
    result = client.oversample(records, clip=args.clip)
    _write_jsonl(args.outfile, result["records"])
    if args.plan_out:
        atomic_write_text(args.plan_out, json_pretty(result["plan"]))
    _print_json({
        "examples_in": len(records),
        "examples_out": len(result["records"]),
        "average_count": result["plan"]["average_count"],
        "clip": result["plan"]["clip"],
    })
    return 0


def cmd_train(args, client: ServiceClient) -> int:
    labels = _load_labels(args.labels)
    vocab = corpus.LabelVocabulary(labels)
    train_records = _dataset_records(args.train, vocab=vocab, require_labels=True)
    valid_records = _dataset_records(args.valid, vocab=vocab, require_labels=True)
    config = {
        "dim": args.dim, "n_min": args.ngram_min, "n_max": args.ngram_max,
        "learning_rate": args.lr, "epochs": args.epochs, "l2": args.l2,
        "batch_size": args.batch_size, "seed": args.seed, "threshold": args.threshold,
    }
    result = client.train(train_records, valid_records, labels, config)
    atomic_write_text(args.model_out,
                      json.dumps(result["model"], ensure_ascii=False, indent=1) + "\n")
    best = result["best_epoch"]
    best_f1 = next((h["valid_micro_f1"] for h in result["history"] if h["epoch"] == best), None)
    _print_json({"best_epoch": best, "best_valid_micro_f1": best_f1,
                 "epochs_run": len(result["history"])})
    return 0


def cmd_predict(args, client: ServiceClient) -> int:
    payload = _read_model_payload(args.model)
    labels = _load_labels(args.labels) if args.labels else None
    records = _dataset_records(args.infile)
    result = client.predict(payload, records, labels=labels)
    _write_jsonl(args.outfile, result["predictions"])
    _print_json({"predictions": len(result["predictions"])})
    return 0


def _read_model_payload(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ToolkitError(f"cannot read model {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ToolkitError(f"{path}: invalid JSON: {e.msg}") from e


def cmd_vote(args, client: ServiceClient) -> int:
    prediction_sets = [_prediction_records(p) for p in args.preds]
    labels = _load_labels(args.labels) if args.labels else None
    result = client.vote(prediction_sets, threshold_votes=args.threshold_votes,
                         fallback=args.fallback, labels=labels)
    _write_jsonl(args.outfile, result["predictions"])
    _print_json({"k": result["k"], "threshold_votes": result["threshold_votes"],
                 "empty_predictions": result["empty_predictions"]})
    return 0


def cmd_score(args, client: ServiceClient) -> int:
    labels = _load_labels(args.labels) if args.labels else None
    vocab = corpus.LabelVocabulary(labels) if labels else None
    gold = _dataset_records(args.gold, vocab=vocab, require_labels=True)
    pred = _prediction_records(args.pred)
    report = client.score(gold, pred, labels=labels, percent=args.percent,
                          per_label=args.per_label)
    _print_json(report)
    return 0


def cmd_run(args, client: ServiceClient) -> int:
    config = load_run_config(args.config, out_dir_override=args.out_dir,
                             seed_override=args.seed)
    manifest = run_pipeline(config, client)
    _print_json({"out_dir": config.out_dir, "stages": manifest["stages"],
                 "config_sha256": manifest["config_sha256"]})
    return 0


def cmd_serve(args, client: ServiceClient) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="propdetect",
        description="Multi-label tweet classification pipeline (preprocess, oversample, "
                    "train, predict, vote, score).",
    )
    parser.add_argument("--version", action="version",
                        version=f"propdetect {__version__} (model format v{MODEL_FORMAT_VERSION})")
    parser.add_argument("--server", default=os.environ.get("PROPDETECT_SERVER"),
                        help="URL of a running propdetect service; default is in-process")
    # Accepted both before and after the subcommand.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--server", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="normalize tweet text in a dataset",
                       parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--drop-hashtag-body", action="store_true",
                   help="remove whole hashtag tokens instead of keeping their text")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("stats", help="label counts and labels-per-example histogram", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--labels", help="optional labels file to validate against")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("oversample", help="duplicate examples carrying rare labels", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--clip", type=int, default=10)
    p.add_argument("--plan-out", dest="plan_out")
    p.set_defaults(func=cmd_oversample)

    p = sub.add_parser("train", help="train the hashed n-gram baseline", parents=[common])
    p.add_argument("--train", required=True)
    p.add_argument("--valid", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--model-out", dest="model_out", required=True)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--dim", type=int, default=2 ** 18)
    p.add_argument("--ngram-min", type=int, default=2)
    p.add_argument("--ngram-max", type=int, default=5)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score a dataset with a trained model", parents=[common])
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--labels", help="optional labels file; must match the model's vocabulary")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("vote", help="hard-vote combination of prediction files", parents=[common])
    p.add_argument("--preds", nargs="+", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--threshold-votes", dest="threshold_votes", type=int, default=None)
    p.add_argument("--fallback", choices=["none", "top-plurality"], default="none")
    p.add_argument("--labels")
    p.set_defaults(func=cmd_vote)

    p = sub.add_parser("score", help="micro/macro F1 of predictions against gold labels", parents=[common])
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--labels")
    p.add_argument("--percent", action="store_true", help="report 100-scale scores (3 decimals)")
    p.add_argument("--per-label", dest="per_label", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("run", help="run the full pipeline from a config file", parents=[common])
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--seed", type=int, default=None,
                   help="override the config's seeds (seed, seed+1, ...)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="start the HTTP service", parents=[common])
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8571)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", None) is None and args.command == "train":
            args.seed = _env_seed()
        with ServiceClient(args.server) as client:
            return args.func(args, client)
    except ToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
