"""Command line entry points.

    scsim demo-data      write a synthetic dataset to a directory
    scsim simulate       run turns on a dataset and dump the records
    scsim evaluate       score one-step decisions against history
    scsim select-models  compare feature extenders fold by fold
    scsim serve          start the HTTP API
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .datagen import make_demo_dataset
from .evaluation import run_experiment
from .horizon import model_selection_report
from .ingest import load_dataset, write_dataset
from .model import Timeline, next_label
from .session.service import SessionConfig, build_policies
from .protocol.engine import TurnConfig, run_turn
from .protocol.llm import RecordingTransport, ReplayTransport


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--companies", required=True, help="companies CSV or JSON file")
    p.add_argument("--edges", required=True, help="edges CSV or JSON file")
    p.add_argument("--knowledge", default=None, help="optional global knowledge text file")


def _policy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--policy", choices=["rule", "llm"], default="rule")
    p.add_argument("--llm-url", default=None, help="chat-completions base URL")
    p.add_argument("--llm-model", default=None)
    p.add_argument("--llm-key", default=None)
    p.add_argument("--transcript", default=None, help="replay LLM responses from this directory")
    p.add_argument("--record", default=None, help="record LLM responses into this directory")


def _build_policies(args, dataset):
    llm = {}
    if args.llm_url:
        llm["url"] = args.llm_url
    if args.llm_model:
        llm["model"] = args.llm_model
    if args.llm_key:
        llm["key"] = args.llm_key
    if args.transcript:
        llm["transcript"] = args.transcript
    config = SessionConfig(agent_policy_kind=args.policy, llm=llm or None)
    transport = None
    if args.policy == "llm" and args.transcript:
        transport = ReplayTransport(args.transcript)
    policies = build_policies(config, dataset, transport)
    if args.policy == "llm" and args.record:
        policy = next(iter(policies.values()))
        policy.transport = RecordingTransport(policy.transport, args.record)
    return policies


def cmd_demo_data(args) -> int:
    dataset = make_demo_dataset(args.firms, args.timestamps, args.seed)
    paths = write_dataset(dataset, args.out)
    for name, path in sorted(paths.items()):
        print(f"wrote {name}: {path}")
    return 0


def cmd_simulate(args) -> int:
    dataset = load_dataset(args.companies, args.edges, args.knowledge)
    timeline = Timeline.from_dataset(dataset)
    policies = _build_policies(args, dataset)
    config = TurnConfig(
        reference_length=args.reference_length,
        performance_metric=args.metric,
        max_workers=args.workers,
    )
    out = open(args.out, "w", encoding="utf-8") if args.out else None
    try:
        for turn in range(args.turns):
            seed = args.seed + timeline.last_t + 1
            edges, records = run_turn(timeline, policies, config, seed=seed)
            label = next_label(timeline.labels)
            added = sum(len(r.added_edges) for r in records)
            removed = sum(len(r.removed_edges) for r in records)
            failed = sum(1 for r in records if r.failed_stages)
            print(
                f"{label}: {len(edges)} edges ({added} added, {removed} removed,"
                f" {failed} agents with failed stages)"
            )
            if out:
                for record in records:
                    doc = {"t": timeline.last_t + 1, "label": label, **record.to_dict()}
                    out.write(json.dumps(doc, sort_keys=True) + "\n")
            features = timeline.features_at(timeline.last_t)
            timeline = timeline.extended(edges, features, label)
    finally:
        if out:
            out.close()
    return 0


def cmd_evaluate(args) -> int:
    dataset = load_dataset(args.companies, args.edges, args.knowledge)
    focals = args.focal or sorted(dataset.companies)[: args.n_focal]

    def factory(seed: int):
        ns = argparse.Namespace(**vars(args))
        return next(iter(_build_policies(ns, dataset).values()))

    report = run_experiment(
        dataset,
        factory,
        focals,
        history_len=args.history_len,
        runs=args.runs,
        seed_base=args.seed,
        cr_scope=args.cr_scope,
    )
    sys.stdout.write(report.to_csv())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
        print(f"wrote {args.json}")
    return 0


def cmd_select_models(args) -> int:
    dataset = load_dataset(args.companies, args.edges, args.knowledge)
    report = model_selection_report(
        Timeline.from_dataset(dataset), kinds=args.kinds, folds=args.folds, w=args.window
    )
    doc = report.to_doc()
    print(f"{'kind':<18}{'n':>6}{'median err':>12}{'p75 err':>10}{'median s':>10}")
    for kind in doc["kinds"]:
        box = doc["box"].get(kind)
        if not box:
            print(f"{kind:<18}{0:>6}")
            continue
        err, rt = box["error"], box["runtime"]
        print(
            f"{kind:<18}{doc['n_samples'][kind]:>6}{err['median']:>12.4f}"
            f"{err['q3']:>10.4f}{rt['median']:>10.4f}"
        )
    if doc["skipped"]:
        print(f"skipped {len(doc['skipped'])} short series cells")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.json}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .session.api import create_app

    app = create_app(static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scsim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo-data", help="write a synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--firms", type=int, default=35)
    p.add_argument("--timestamps", type=int, default=8)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_demo_data)

    p = sub.add_parser("simulate", help="run simulation turns")
    _add_dataset_args(p)
    _policy_args(p)
    p.add_argument("--turns", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reference-length", type=int, default=4)
    p.add_argument("--metric", default="pagerank")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None, help="write turn records as JSON lines")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="one-step decision scoring")
    _add_dataset_args(p)
    _policy_args(p)
    p.add_argument("--focal", action="append", default=None, help="repeatable focal firm id")
    p.add_argument("--n-focal", type=int, default=4, help="first N firms when --focal absent")
    p.add_argument("--history-len", type=int, default=4)
    p.add_argument("--runs", type=int, default=80)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cr-scope", choices=["slot", "firm"], default="slot")
    p.add_argument("--json", default=None, help="also write the full report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("select-models", help="compare feature extenders")
    _add_dataset_args(p)
    p.add_argument("--kinds", nargs="+", default=["linear", "lasso"])
    p.add_argument("--folds", type=int, default=4)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_select_models)

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", default=None, help="directory with the built web UI")
    p.add_argument("--log-level", default="info")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
