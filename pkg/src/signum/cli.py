"""Command-line entry points: synth, train, evaluate, recognize, serve."""

from __future__ import annotations

import argparse
import json
import os
import sys

from signum.errors import SignumError


def _corpus_config(args):
    from signum.synthdata import GeneratorConfig

    return GeneratorConfig(
        seed=args.seed,
        jitter_sigma=args.jitter,
        alphabet_count=args.alphabet_count,
        word_count=args.word_count,
        sentence_count=args.sentence_count,
        instances_per_sign=args.instances_per_sign,
    )


def _add_corpus_options(p) -> None:
    p.add_argument("--jitter", type=float, default=0.005)
    p.add_argument("--alphabet-count", type=int, default=26)
    p.add_argument("--word-count", type=int, default=14)
    p.add_argument("--sentence-count", type=int, default=10)
    p.add_argument("--instances-per-sign", type=int, default=10)


def _cmd_synth(args) -> int:
    from signum.handmodel import load_database, save_database
    from signum.stream import write_frames_jsonl
    from signum.synthdata import (
        StreamTiming,
        generate_corpus,
        script_stream,
        write_instances_jsonl,
    )

    if args.what == "stream":
        if not args.db or not args.sign or not args.out:
            print("synth stream needs --db, --sign and --out", file=sys.stderr)
            return 2
        db = load_database(args.db)
        sign = db.get(args.sign)
        if sign is None:
            print(f"no sign {args.sign!r} in {args.db}", file=sys.stderr)
            return 1
        frames, plateaus = script_stream(sign, StreamTiming())
        write_frames_jsonl(frames, args.out)
        print(f"wrote {len(frames)} frames ({len(plateaus)} keyposes) to {args.out}")
        return 0

    db, instances = generate_corpus(_corpus_config(args))
    if args.out_db:
        save_database(db, args.out_db)
        print(f"wrote {len(db)} signs to {args.out_db}")
    if args.out_instances:
        write_instances_jsonl(instances, args.out_instances)
        print(f"wrote {len(instances)} instances to {args.out_instances}")
    return 0


def _cmd_train(args) -> int:
    from signum.dtree import TreeParams, fit, save_tree
    from signum.features import build_feature_matrix
    from signum.handmodel import load_database
    from signum.synthdata import SignInstance, read_instances_jsonl

    if args.instances:
        instances = read_instances_jsonl(args.instances)
    else:
        db = load_database(args.db)
        instances = [SignInstance(s.id, 0, s) for s in db.signs]
    x, y = build_feature_matrix(instances)
    params = TreeParams(
        max_depth=None if args.max_depth == 0 else args.max_depth,
        min_samples_split=args.min_samples_split,
        min_samples_leaf=args.min_samples_leaf,
    )
    tree = fit(x, y, params)
    save_tree(tree, args.out)
    print(f"trained on {len(y)} samples x {x.shape[1]} features "
          f"({len(tree.classes)} classes) -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    from signum.evaluate import format_results_table, run_headline_experiments
    from signum.synthdata import generate_corpus

    db, instances = generate_corpus(_corpus_config(args))
    alphabet, all_signs = run_headline_experiments(
        db, instances, seed=args.seed, k=args.folds)
    print(format_results_table(alphabet, all_signs), end="")
    if args.out:
        payload = {"alphabet": alphabet.to_dict(), "all_signs": all_signs.to_dict()}
        with open(args.out, "w") as fh:
            fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"report written to {args.out}")
    return 0


def _cmd_recognize(args) -> int:
    from signum.dtree import load_tree
    from signum.handmodel import load_database
    from signum.stream import PracticeMode, read_frames_jsonl, replay_stream

    db = load_database(args.db)
    tree = load_tree(args.model)
    frames = read_frames_jsonl(args.stream)
    mode = PracticeMode(args.mode) if args.mode else None
    if mode is not None and not args.target:
        print("--mode needs --target", file=sys.stderr)
        return 2
    messages = replay_stream(frames, tree, db, mode=mode, target=args.target)
    shown = 0
    for message in messages:
        if message["type"] == "confidence" and not args.emit_confidence:
            continue
        print(json.dumps(message, sort_keys=True))
        shown += 1
    if shown == 0:
        print(json.dumps({"type": "none", "detail": "no recognition"}))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from signum.dtree import load_tree
    from signum.handmodel import load_database
    from signum.service import create_app

    db = load_database(args.db)
    tree = load_tree(args.model)
    app = create_app(db, tree, user_db_path=args.user_db)
    port = args.port if args.port else int(os.environ.get("SIGNUM_PORT", "8000"))
    uvicorn.run(app, host=args.host, port=port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signum",
        description="Hand-skeleton sign recognition: corpus, training, "
                    "evaluation, streaming recognition, practice service.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic corpus or a frame stream")
    p.add_argument("what", nargs="?", default="corpus", choices=["corpus", "stream"])
    p.add_argument("--seed", type=int, default=7)
    _add_corpus_options(p)
    p.add_argument("--out-db")
    p.add_argument("--out-instances")
    p.add_argument("--db", help="database to read (stream mode)")
    p.add_argument("--sign", help="sign id to stream (stream mode)")
    p.add_argument("--out", help="frames output path (stream mode)")
    p.set_defaults(run=_cmd_synth)

    p = sub.add_parser("train", help="fit a decision tree and write it as JSON")
    p.add_argument("--db", help="sign database (templates) to train on")
    p.add_argument("--instances", help="instances JSONL to train on instead")
    p.add_argument("--out", required=True)
    p.add_argument("--max-depth", type=int, default=0,
                   help="0 means unlimited depth")
    p.add_argument("--min-samples-split", type=int, default=2)
    p.add_argument("--min-samples-leaf", type=int, default=1)
    p.set_defaults(run=_cmd_train)

    p = sub.add_parser("evaluate", help="run the alphabet and all-signs experiments")
    p.add_argument("--seed", type=int, default=7,
                   help="drives the corpus, the split and the folds")
    _add_corpus_options(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(run=_cmd_evaluate)

    p = sub.add_parser("recognize", help="replay a frame stream through a model")
    p.add_argument("--model", required=True)
    p.add_argument("--db", required=True)
    p.add_argument("--stream", required=True)
    p.add_argument("--mode", choices=["learn", "test"])
    p.add_argument("--target")
    p.add_argument("--emit-confidence", action="store_true",
                   help="also print the per-frame confidence messages")
    p.set_defaults(run=_cmd_recognize)

    p = sub.add_parser("serve", help="host the practice HTTP/WS service")
    p.add_argument("--db", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, default=0,
                   help="default: $SIGNUM_PORT or 8000")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--user-db", default="user_signs.json")
    p.set_defaults(run=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "train" and not (args.db or args.instances):
        print("train needs --db or --instances", file=sys.stderr)
        return 2
    try:
        return args.run(args)
    except SignumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
