"""Command-line entry point for the whole pipeline.

Subcommands: ingest, split, merge, stats, eval-metrics, eval-judge, sample,
serve, report. Defaults come from an optional TOML config (--config) and can
be overridden per flag. Every subcommand writes byte-identical outputs for
identical inputs; wall-clock timestamps only ever land in the *.meta.json
sidecars. Exit codes: 0 ok, 1 usage, 2 data error, 3 remote error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import agreement, merge, metrics
from .corpus import (
    SPLIT_NAMES,
    CorpusError,
    load_corpus,
    make_splits,
    record_to_obj,
    write_corpus,
)
from .judge import (
    HttpEmbeddingProvider,
    JudgeEndpointConfig,
    JudgeError,
    JudgeVerdict,
    judge_batch,
)
from .merge import MergeConfig, generate_dataset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_REMOTE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class PipelineConfig:
    """Run defaults; field defaults mirror the dataset-construction settings."""

    input: str | None = None
    out: str | None = None
    merge: MergeConfig = MergeConfig()
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    split_seed: int = 0
    sample_n: int = 200
    sample_seed: int = 0
    judge: JudgeEndpointConfig | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        with Path(path).open("rb") as fh:
            raw = tomllib.load(fh)
        merge_cfg = MergeConfig(**raw.get("merge", {}))
        split = raw.get("split", {})
        sample = raw.get("sample", {})
        judge_cfg = None
        if "judge" in raw:
            judge_cfg = JudgeEndpointConfig(**raw["judge"])
        ratios = tuple(split.get("ratios", (0.8, 0.1, 0.1)))
        return cls(
            input=raw.get("input"),
            out=raw.get("out"),
            merge=merge_cfg,
            split_ratios=ratios,
            split_seed=split.get("seed", 0),
            sample_n=sample.get("n", 200),
            sample_seed=sample.get("seed", 0),
            judge=judge_cfg,
        )


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig()
    if args.config:
        try:
            cfg = PipelineConfig.from_file(args.config)
        except FileNotFoundError as exc:
            raise UsageError(f"config file not found: {args.config}") from exc
        except (tomllib.TOMLDecodeError, TypeError, ValueError) as exc:
            raise UsageError(f"bad config {args.config}: {exc}") from exc
    merge_overrides = {}
    if getattr(args, "max_q_words", None) is not None:
        merge_overrides["max_question_words"] = args.max_q_words
    if getattr(args, "max_a_words", None) is not None:
        merge_overrides["max_bridge_answer_words"] = args.max_a_words
    if merge_overrides:
        cfg = replace(cfg, merge=replace(cfg.merge, **merge_overrides))
    if getattr(args, "endpoint", None):
        base = cfg.judge or JudgeEndpointConfig(base_url="", model="judge")
        cfg = replace(cfg, judge=replace(base, base_url=args.endpoint))
    if getattr(args, "model", None):
        if cfg.judge is None:
            raise UsageError("--model needs an endpoint (--endpoint or [judge] config)")
        cfg = replace(cfg, judge=replace(cfg.judge, model=args.model))
    return cfg


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")


def _write_sidecar(out_dir: Path, name: str, extra: dict) -> None:
    _write_json(
        out_dir / f"{name}.meta.json",
        {"generated_at": datetime.now(timezone.utc).isoformat(), **extra},
    )


def _require_input(args: argparse.Namespace, cfg: PipelineConfig) -> Path:
    path = args.input or cfg.input
    if not path:
        raise UsageError("--input is required (flag or config)")
    return Path(path)


def _out_dir(args: argparse.Namespace, cfg: PipelineConfig) -> Path:
    out = getattr(args, "out", None) or cfg.out
    if not out:
        raise UsageError("--out is required (flag or config)")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_ingest(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    corpus = load_corpus(_require_input(args, cfg))
    shows = sorted({rec.show_id for rec in corpus.records})
    summary = {
        "records": len(corpus),
        "episodes": len(corpus.episode_index),
        "shows": shows,
    }
    if args.out:
        write_corpus(corpus, args.out)
        summary["written_to"] = str(args.out)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_split(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    corpus = load_corpus(_require_input(args, cfg))
    ratios = _parse_ratios(args.ratios) if args.ratios else cfg.split_ratios
    seed = args.seed if args.seed is not None else cfg.split_seed
    assignment = make_splits(corpus, ratios, seed)
    out_dir = _out_dir(args, cfg)
    for split in SPLIT_NAMES:
        keys = set(assignment.keys_in(split))
        rows = [rec for rec in corpus.records if rec.episode_key in keys]
        with (out_dir / f"{split}.jsonl").open("w", encoding="utf-8") as fh:
            for rec in rows:
                fh.write(json.dumps(record_to_obj(rec), ensure_ascii=False) + "\n")
    _write_json(
        out_dir / "split_assignment.json",
        {
            "seed": seed,
            "ratios": list(ratios),
            "assignment": {
                str(key): split for key, split in sorted(assignment.assignment.items())
            },
        },
    )
    counts = {s: len(assignment.keys_in(s)) for s in SPLIT_NAMES}
    print(json.dumps({"episodes": counts}, indent=2, sort_keys=True))
    return EXIT_OK


def _parse_ratios(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --ratios {text!r}") from exc
    if len(parts) != 3:
        raise UsageError("--ratios needs three comma-separated fractions")
    if any(p < 0 for p in parts) or abs(sum(parts) - 1.0) > 1e-9:
        raise UsageError("--ratios must be nonnegative and sum to 1")
    return parts


def cmd_merge(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    corpus = load_corpus(_require_input(args, cfg))
    merged = generate_dataset(corpus, cfg.merge)
    out_dir = _out_dir(args, cfg)
    merge.write_merged(merged, out_dir / "dataset.jsonl")
    stats = merge.dataset_stats(merged)
    _write_json(out_dir / "stats.json", stats)
    _write_sidecar(
        out_dir,
        "dataset",
        {
            "input": str(_require_input(args, cfg)),
            "max_question_words": cfg.merge.max_question_words,
            "max_bridge_answer_words": cfg.merge.max_bridge_answer_words,
        },
    )
    print(json.dumps(stats, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_stats(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    items = merge.read_merged(_require_input(args, cfg))
    stats = merge.dataset_stats(items)
    if args.out:
        _write_json(Path(args.out), stats)
    print(json.dumps(stats, indent=2, sort_keys=True))
    return EXIT_OK


def _read_lines(path: Path) -> list[str]:
    return [ln.rstrip("\n") for ln in path.read_text("utf-8").splitlines()]


def cmd_eval_metrics(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    hyp_lines = _read_lines(Path(args.hyp))
    ref_lines = _read_lines(Path(args.ref))
    if len(hyp_lines) != len(ref_lines):
        print(
            f"error: line counts differ: {len(hyp_lines)} hypotheses vs "
            f"{len(ref_lines)} references",
            file=sys.stderr,
        )
        return EXIT_DATA
    provider = HttpEmbeddingProvider(cfg.judge) if cfg.judge else None
    report = metrics.evaluate_corpus(list(zip(hyp_lines, ref_lines)), provider)
    out_dir = _out_dir(args, cfg)
    (out_dir / "metrics.json").write_text(report.to_json(), "utf-8")
    table = metrics.render_metric_table(report)
    (out_dir / "metrics.txt").write_text(table, "utf-8")
    print(table, end="")
    return EXIT_OK


def _judge_context(mq: merge.MergedQuestion) -> str:
    key = mq.episode_key
    return (
        f"Show {key.show_id}, season {key.season}, episode {key.episode}, "
        f"segments {mq.segment_pair[0]} and {mq.segment_pair[1]}. "
        f"Final answer: {mq.final_answer} Bridge answer: {mq.bridge_answer}"
    )


def cmd_eval_judge(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    if cfg.judge is None or not cfg.judge.base_url:
        raise UsageError("eval-judge needs --endpoint or a [judge] config section")
    items = merge.read_merged(_require_input(args, cfg))
    results = judge_batch([(mq.text, _judge_context(mq)) for mq in items], cfg.judge)
    out_dir = _out_dir(args, cfg)

    records = []
    failures = 0
    for mq, res in zip(items, results):
        if isinstance(res, JudgeVerdict):
            records.append(
                agreement.AnnotationRecord(
                    annotator_id=cfg.judge.model,
                    question_id=mq.question_id,
                    rubric=res.rubric(),
                )
            )
        else:
            failures += 1
            print(f"judge failed on {mq.question_id}: {res}", file=sys.stderr)
    agreement.write_annotations(records, out_dir / "verdicts.jsonl")
    _write_sidecar(out_dir, "verdicts", {"model": cfg.judge.model, "failures": failures})

    if records:
        means = agreement.aggregate_scores(records)
        table = _judge_table(cfg.judge.model, means)
        (out_dir / "judge_table.txt").write_text(table, "utf-8")
        print(table, end="")
    return EXIT_REMOTE if failures else EXIT_OK


def _judge_table(model: str, means: dict[str, float]) -> str:
    headers = [
        "Method",
        "Fluency",
        "Relevance",
        "Multi-Hop Reasoning",
        "Engagingness",
        "Factual Correctness",
        "Inclusiveness",
    ]
    values = [model] + [f"{means[dim]:.2f}" for dim in agreement.DIMENSIONS]
    widths = [max(len(h), len(v)) for h, v in zip(headers, values)]
    line1 = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    line2 = "  ".join(v.ljust(w) for v, w in zip(values, widths))
    return line1 + "\n" + line2 + "\n"


def cmd_sample(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    items = merge.read_merged(_require_input(args, cfg))
    n = args.n if args.n is not None else cfg.sample_n
    seed = args.seed if args.seed is not None else cfg.sample_seed
    try:
        sampled = agreement.sample_questions(items, n, seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.out:
        merge.write_merged(sampled, args.out)
    print(json.dumps({"sampled": len(sampled), "seed": seed}, sort_keys=True))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.data))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_report(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    records = agreement.read_annotations(Path(args.store))
    if args.input:
        items = merge.read_merged(Path(args.input))
        n = args.n if args.n is not None else cfg.sample_n
        seed = args.seed if args.seed is not None else cfg.sample_seed
        wanted = {mq.question_id for mq in agreement.sample_questions(items, n, seed)}
        records = [rec for rec in records if rec.question_id in wanted]
    if not records:
        print("error: no annotation records selected", file=sys.stderr)
        return EXIT_DATA
    report = agreement.agreement_report(records)
    if args.out:
        out_dir = _out_dir(args, cfg)
        (out_dir / "report.json").write_text(report.to_json(), "utf-8")
        (out_dir / "report.txt").write_text(
            agreement.render_agreement_table(report), "utf-8"
        )
    print(agreement.render_agreement_table(report), end="")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="twohop", description=__doc__)
    parser.add_argument("--config", help="TOML config file")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        return p

    p = add("ingest", cmd_ingest, help="validate a zero-hop corpus")
    p.add_argument("--input")
    p.add_argument("--out", help="write a normalized copy here")

    p = add("split", cmd_split, help="episode-disjoint train/validation/test split")
    p.add_argument("--input")
    p.add_argument("--out")
    p.add_argument("--ratios", help="e.g. 0.8,0.1,0.1")
    p.add_argument("--seed", type=int)

    p = add("merge", cmd_merge, help="build the two-hop dataset")
    p.add_argument("--input")
    p.add_argument("--out")
    p.add_argument("--max-q-words", type=int, dest="max_q_words")
    p.add_argument("--max-a-words", type=int, dest="max_a_words")

    p = add("stats", cmd_stats, help="summarize a merged dataset")
    p.add_argument("--input")
    p.add_argument("--out")

    p = add("eval-metrics", cmd_eval_metrics, help="score hypothesis vs reference files")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--out")
    p.add_argument("--endpoint", help="embedding endpoint base URL")
    p.add_argument("--model")

    p = add("eval-judge", cmd_eval_judge, help="score a merged dataset with an LLM judge")
    p.add_argument("--input")
    p.add_argument("--out")
    p.add_argument("--endpoint", help="judge endpoint base URL")
    p.add_argument("--model")

    p = add("sample", cmd_sample, help="seeded sample of a merged dataset")
    p.add_argument("--input")
    p.add_argument("--out")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)

    p = add("serve", cmd_serve, help="run the annotation review service")
    p.add_argument("--data", required=True, help="service data directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8890)

    p = add("report", cmd_report, help="agreement report from an annotation store")
    p.add_argument("--store", required=True)
    p.add_argument("--input", help="restrict to the sample drawn from this dataset")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        CorpusError,
        FileNotFoundError,
        json.JSONDecodeError,
        KeyError,
        ValueError,
    ) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except JudgeError as exc:
        print(f"remote error: {exc}", file=sys.stderr)
        return EXIT_REMOTE


if __name__ == "__main__":
    sys.exit(main())
