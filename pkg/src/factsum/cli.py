"""Command-line entry points for the corpus pipeline.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 remote-scorer failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from typing import Optional

import numpy as np

from .connector import ConnectorConfig
from .contrastor import EntityBank, NegativeMode, harvest_entity_bank
from .corpus import CorpusError
from .corrector import CorrectionStrategy
from .gsg import SelectionConfig
from .loss import nt_xent_loss, nt_xent_loss_and_grads
from .pipeline import (
    CHAIN_STAGES,
    TERMINAL_STAGES,
    DataError,
    RunReport,
    StageFailure,
    UsageError,
    build_connect_stage,
    build_correct_stage,
    build_negatives_stage,
    build_pretrain_stage,
    corpus_stats,
    iter_pipe_records,
    run_stages,
    validate_stream,
)
from .rouge import RougeVariant
from .scorer import (
    HeuristicEntityContainment,
    RemoteBinding,
    RemoteConsistencyScorer,
    ScorerError,
    VerdictCache,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SCORER = 3

_VARIANTS = {"r1": RougeVariant.R1, "r2": RougeVariant.R2, "rl": RougeVariant.RL}
_STRATEGIES = {
    "replace": CorrectionStrategy.REPLACE,
    "remove": CorrectionStrategy.REMOVE,
    "combined": CorrectionStrategy.COMBINED,
}
_MODES = {"intrinsic": NegativeMode.INTRINSIC, "extrinsic": NegativeMode.EXTRINSIC}


class _Parser(argparse.ArgumentParser):
    # Route argparse failures through our exit-code scheme (1, not 2).
    def error(self, message):
        raise UsageError(message)


@contextlib.contextmanager
def _open_in(path: str):
    if path == "-":
        yield sys.stdin
    else:
        with open(path, "r", encoding="utf-8") as f:
            yield f


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            yield f


def _add_stream_flags(sp, parallel: bool = True):
    sp.add_argument("--input", default="-", help="input corpus path, - for stdin")
    sp.add_argument("--output", default="-", help="output path, - for stdout")
    sp.add_argument(
        "--lenient", action="store_true", help="allow unknown keys in records"
    )
    if parallel:
        sp.add_argument(
            "--workers",
            type=int,
            default=None,
            help="worker threads (default: FACTSUM_WORKERS or 1)",
        )
        sp.add_argument(
            "--on-error",
            choices=["skip", "abort"],
            default="abort",
            dest="on_error",
            help="policy for records that fail a stage",
        )


def _workers(args) -> int:
    if getattr(args, "workers", None) is not None:
        value = args.workers
    else:
        raw = os.environ.get("FACTSUM_WORKERS", "1")
        try:
            value = int(raw)
        except ValueError:
            raise UsageError(f"FACTSUM_WORKERS is not an integer: {raw!r}")
    if value < 1:
        raise UsageError("workers must be at least 1")
    return value


def _execute(args, stages, side_hook=None, finish=None) -> int:
    workers = _workers(args)
    on_error = getattr(args, "on_error", "abort")
    with _open_in(args.input) as fin, _open_out(args.output) as fout:
        records = iter_pipe_records(fin, strict=not args.lenient)
        report = run_stages(
            records,
            stages,
            fout,
            workers=workers,
            on_error=on_error,
            side_hook=side_hook,
        )
    if finish is not None:
        finish(report)
    print(json.dumps(report.to_obj(), ensure_ascii=False), file=sys.stderr)
    return EXIT_OK


def _build_scorer(args) -> VerdictCache:
    if args.scorer == "remote":
        if not args.endpoint:
            raise UsageError("--endpoint is required with --scorer remote")
        binding = RemoteBinding(args.endpoint, args.timeout, args.max_concurrent)
        return VerdictCache(RemoteConsistencyScorer(binding))
    return VerdictCache(HeuristicEntityContainment())


def _harvest_bank(path: str, strict: bool) -> EntityBank:
    with _open_in(path) as f:
        docs = []
        for item in iter_pipe_records(f, strict=strict):
            if isinstance(item, Exception):
                raise item
            docs.append(item.document_side())
    return harvest_entity_bank(docs)


def _resolve_bank(mode: NegativeMode, bank_path: Optional[str], input_path: str, strict: bool):
    if mode is not NegativeMode.EXTRINSIC:
        return None
    if bank_path:
        return _harvest_bank(bank_path, strict)
    if input_path != "-":
        return _harvest_bank(input_path, strict)
    raise UsageError(
        "extrinsic mode over stdin needs --bank (stdin cannot be read twice)"
    )


def cmd_validate(args) -> int:
    with _open_in(args.input) as fin, _open_out(args.output) as fout:
        seen, invalid = validate_stream(fin, strict=not args.lenient, out=fout)
    print(f"{seen} record(s), {invalid} invalid", file=sys.stderr)
    return EXIT_DATA if invalid else EXIT_OK


def cmd_stats(args) -> int:
    with _open_in(args.input) as fin:
        records = iter_pipe_records(fin, strict=not args.lenient)
        summary = corpus_stats(records)
    with _open_out(args.output) as fout:
        fout.write(json.dumps(summary, ensure_ascii=False, indent=2) + "\n")
    return EXIT_OK


def cmd_pretrain_data(args) -> int:
    try:
        config = SelectionConfig(
            variant=_VARIANTS[args.variant],
            candidate_pool=args.candidate_pool,
            mask_token=args.mask_token,
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    cache = _build_scorer(args)

    def finish(report: RunReport):
        report.stage("pretrain-data").detail["cache_hits"] = cache.hits

    return _execute(
        args, [("pretrain-data", build_pretrain_stage(config, cache))], finish=finish
    )


def cmd_correct(args) -> int:
    strategy = _STRATEGIES[args.strategy]
    rows: list[tuple] = []
    side_hook = None
    if args.report:
        def side_hook(side):
            rows.extend(side.get("report_rows", ()))

    code = _execute(
        args,
        [("correct", build_correct_stage(strategy, want_report=bool(args.report)))],
        side_hook=side_hook,
    )
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as f:
            f.write("doc_id\tmention\tstatus\treplacement\n")
            for row in rows:
                f.write("\t".join(row) + "\n")
    return code


def cmd_negatives(args) -> int:
    mode = _MODES[args.mode]
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    bank = _resolve_bank(mode, args.bank, args.input, strict=not args.lenient)
    return _execute(
        args, [("negatives", build_negatives_stage(mode, args.k, args.seed, bank))]
    )


def cmd_connect(args) -> int:
    try:
        config = ConnectorConfig(mask_token=args.mask_token, position=args.position)
    except ValueError as exc:
        raise UsageError(str(exc))
    return _execute(args, [("connect", build_connect_stage(config))])


def _as_vector(value, what: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise DataError(f"{what} is not numeric")
    if arr.ndim == 2 and arr.size:
        arr = arr.mean(axis=0)
    if arr.ndim != 1 or arr.size == 0:
        raise DataError(f"{what} must be a non-empty vector or matrix")
    return arr


def _loss_vector(obj: dict, key: str) -> np.ndarray:
    if key not in obj:
        raise DataError(f"vectors file is missing {key!r}")
    return _as_vector(obj[key], repr(key))


def cmd_loss_check(args) -> int:
    try:
        with open(args.vectors, "r", encoding="utf-8") as f:
            obj = json.load(f)
    except json.JSONDecodeError as exc:
        raise DataError(f"vectors file is not valid JSON: {exc.msg}")
    if not isinstance(obj, dict):
        raise DataError("vectors file must hold a JSON object")
    tau = obj.get("tau", 0.05)
    if not isinstance(tau, (int, float)) or isinstance(tau, bool) or tau <= 0:
        raise DataError("tau must be a positive number")
    doc = _loss_vector(obj, "doc")
    pos = _loss_vector(obj, "positive")
    negs_raw = obj.get("negatives", [])
    if not isinstance(negs_raw, list) or not negs_raw:
        raise DataError("'negatives' must be a non-empty list of vectors")
    negs = [_as_vector(n, f"negatives[{i}]") for i, n in enumerate(negs_raw)]

    try:
        loss, grad_doc, grad_pos, grad_negs = nt_xent_loss_and_grads(
            doc, pos, negs, tau=float(tau)
        )
    except ValueError as exc:
        raise DataError(str(exc))

    error = _gradient_error(doc, pos, negs, float(tau), grad_doc, grad_pos, grad_negs)
    with _open_out(args.output) as fout:
        fout.write(
            json.dumps({"loss": loss, "gradient_error": error}, ensure_ascii=False)
            + "\n"
        )
    return EXIT_OK


def _gradient_error(doc, pos, negs, tau, grad_doc, grad_pos, grad_negs) -> float:
    """Relative error between analytic and central-difference gradients."""
    d = doc.size
    flat = np.concatenate([doc, pos] + [n for n in negs])

    def f(p):
        d_vec = p[:d]
        p_vec = p[d : 2 * d]
        n_vecs = [p[(2 + i) * d : (3 + i) * d] for i in range(len(negs))]
        return nt_xent_loss(d_vec, p_vec, n_vecs, tau)

    h = 1e-5
    numeric = np.zeros_like(flat)
    for i in range(flat.size):
        hi, lo = flat.copy(), flat.copy()
        hi[i] += h
        lo[i] -= h
        numeric[i] = (f(hi) - f(lo)) / (2 * h)
    analytic = np.concatenate([grad_doc, grad_pos] + [g for g in grad_negs])
    scale = max(1.0, float(np.linalg.norm(numeric)))
    return float(np.linalg.norm(analytic - numeric) / scale)


_RUN_KEYS = {
    "stages",
    "workers",
    "strict",
    "on_error",
    "scorer",
    "pretrain_data",
    "correct",
    "negatives",
    "connect",
}


def _section(config: dict, name: str, allowed: set[str]) -> dict:
    section = config.get(name, {})
    if not isinstance(section, dict):
        raise UsageError(f"config section {name!r} must be an object")
    unknown = set(section) - allowed
    if unknown:
        raise UsageError(f"unknown key in config section {name!r}: {sorted(unknown)[0]}")
    return section


def _load_run_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc.msg}")
    if not isinstance(config, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(config) - _RUN_KEYS
    if unknown:
        raise UsageError(f"unknown config key: {sorted(unknown)[0]}")
    stages = config.get("stages")
    if not isinstance(stages, list) or not stages:
        raise UsageError("config needs a non-empty 'stages' list")
    known = set(CHAIN_STAGES) | set(TERMINAL_STAGES)
    for i, name in enumerate(stages):
        if name not in known:
            raise UsageError(f"unknown stage {name!r}")
        if stages.index(name) != i:
            raise UsageError(f"stage {name!r} listed twice")
        if name in TERMINAL_STAGES and i != len(stages) - 1:
            raise UsageError(f"stage {name!r} emits a final format and must come last")
    return config


def cmd_run(args) -> int:
    config = _load_run_config(args.config)
    stages_wanted = config["stages"]

    workers = args.workers if args.workers is not None else config.get("workers")
    strict = not args.lenient and config.get("strict", True)
    on_error = args.on_error or config.get("on_error", "abort")
    if on_error not in ("skip", "abort"):
        raise UsageError(f"unknown on-error policy {on_error!r}")

    scorer_cfg = _section(config, "scorer", {"binding", "endpoint", "timeout", "max_concurrent"})
    pretrain_cfg = _section(
        config, "pretrain_data", {"variant", "candidate_pool", "mask_token"}
    )
    correct_cfg = _section(config, "correct", {"strategy"})
    negatives_cfg = _section(config, "negatives", {"mode", "k", "seed", "bank"})
    connect_cfg = _section(config, "connect", {"position", "mask_token"})

    # Stage configs sharing the mask token must agree on it.
    masks = {}
    if "pretrain-data" in stages_wanted:
        masks["pretrain-data"] = pretrain_cfg.get("mask_token", "<mask>")
    if "connect" in stages_wanted:
        masks["connect"] = connect_cfg.get("mask_token", "<mask>")
    if len(set(masks.values())) > 1:
        raise UsageError(f"mask tokens disagree across stages: {masks}")

    cache: Optional[VerdictCache] = None
    stages = []
    for name in stages_wanted:
        if name == "pretrain-data":
            variant = pretrain_cfg.get("variant", "r1")
            if str(variant).lower() not in _VARIANTS:
                raise UsageError(f"unknown rouge variant {variant!r}")
            try:
                selection = SelectionConfig(
                    variant=_VARIANTS[str(variant).lower()],
                    candidate_pool=pretrain_cfg.get("candidate_pool", 5),
                    mask_token=pretrain_cfg.get("mask_token", "<mask>"),
                )
            except (TypeError, ValueError) as exc:
                raise UsageError(f"pretrain_data config: {exc}")
            binding = scorer_cfg.get("binding", "heuristic")
            if binding == "remote":
                endpoint = scorer_cfg.get("endpoint")
                if not endpoint:
                    raise UsageError("remote scorer needs an endpoint")
                try:
                    remote = RemoteBinding(
                        endpoint,
                        scorer_cfg.get("timeout", 10.0),
                        scorer_cfg.get("max_concurrent", 4),
                    )
                except (TypeError, ValueError) as exc:
                    raise UsageError(f"scorer config: {exc}")
                cache = VerdictCache(RemoteConsistencyScorer(remote))
            elif binding == "heuristic":
                cache = VerdictCache(HeuristicEntityContainment())
            else:
                raise UsageError(f"unknown scorer binding {binding!r}")
            stages.append((name, build_pretrain_stage(selection, cache)))
        elif name == "correct":
            strategy = correct_cfg.get("strategy", "combined")
            if strategy not in _STRATEGIES:
                raise UsageError(f"unknown correction strategy {strategy!r}")
            stages.append(
                (name, build_correct_stage(_STRATEGIES[strategy], want_report=False))
            )
        elif name == "negatives":
            mode_name = negatives_cfg.get("mode")
            if mode_name not in _MODES:
                raise UsageError("negatives config needs mode intrinsic|extrinsic")
            seed = args.seed if args.seed is not None else negatives_cfg.get("seed")
            if not isinstance(seed, int) or isinstance(seed, bool):
                raise UsageError("negatives stage needs an integer seed")
            k = negatives_cfg.get("k", 5)
            if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                raise UsageError("negatives k must be a positive integer")
            bank = _resolve_bank(
                _MODES[mode_name], negatives_cfg.get("bank"), args.input, strict
            )
            stages.append(
                (name, build_negatives_stage(_MODES[mode_name], k, seed, bank))
            )
        elif name == "connect":
            try:
                connector = ConnectorConfig(
                    mask_token=connect_cfg.get("mask_token", "<mask>"),
                    position=connect_cfg.get("position", 1),
                )
            except (TypeError, ValueError) as exc:
                raise UsageError(f"connect config: {exc}")
            stages.append((name, build_connect_stage(connector)))

    if workers is None:
        workers_n = _workers(args)
    else:
        if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
            raise UsageError("workers must be a positive integer")
        workers_n = workers

    def finish(report: RunReport):
        if cache is not None:
            report.stage("pretrain-data").detail["cache_hits"] = cache.hits

    with _open_in(args.input) as fin, _open_out(args.output) as fout:
        records = iter_pipe_records(fin, strict=strict)
        report = run_stages(
            records, stages, fout, workers=workers_n, on_error=on_error
        )
    finish(report)
    print(json.dumps(report.to_obj(), ensure_ascii=False), file=sys.stderr)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(
        prog="factsum",
        description="Corpus transformations for factuality-aware summarization data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="check records against the schema")
    _add_stream_flags(sp, parallel=False)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("stats", help="corpus-level counts")
    _add_stream_flags(sp, parallel=False)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("pretrain-data", help="build masked pseudo-summary examples")
    _add_stream_flags(sp)
    sp.add_argument("--variant", choices=sorted(_VARIANTS), default="r1")
    sp.add_argument("--candidate-pool", type=int, default=5, dest="candidate_pool")
    sp.add_argument("--mask-token", default="<mask>", dest="mask_token")
    sp.add_argument("--scorer", choices=["heuristic", "remote"], default="heuristic")
    sp.add_argument("--endpoint", default=None, help="remote scorer base URL")
    sp.add_argument("--timeout", type=float, default=10.0)
    sp.add_argument("--max-concurrent", type=int, default=4, dest="max_concurrent")
    sp.set_defaults(func=cmd_pretrain_data)

    sp = sub.add_parser("correct", help="repair unsupported summary entities")
    _add_stream_flags(sp)
    sp.add_argument("--strategy", choices=sorted(_STRATEGIES), required=True)
    sp.add_argument("--report", default=None, help="write a detection TSV here")
    sp.set_defaults(func=cmd_correct)

    sp = sub.add_parser("negatives", help="generate entity-perturbed summaries")
    _add_stream_flags(sp)
    sp.add_argument("--mode", choices=sorted(_MODES), required=True)
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--bank", default=None, help="corpus file to harvest surfaces from")
    sp.set_defaults(func=cmd_negatives)

    sp = sub.add_parser("connect", help="splice the mask token into documents")
    _add_stream_flags(sp)
    sp.add_argument("--position", type=int, default=1)
    sp.add_argument("--mask-token", default="<mask>", dest="mask_token")
    sp.set_defaults(func=cmd_connect)

    sp = sub.add_parser("loss-check", help="evaluate the contrastive loss kernel")
    sp.add_argument("--vectors", required=True, help="JSON file of embedding vectors")
    sp.add_argument("--output", default="-")
    sp.set_defaults(func=cmd_loss_check)

    sp = sub.add_parser("run", help="run configured stages as one pipeline")
    _add_stream_flags(sp)
    sp.add_argument("--config", required=True, help="pipeline config JSON")
    sp.add_argument("--seed", type=int, default=None, help="override the negatives seed")
    sp.set_defaults(func=cmd_run)
    # run: flags override the config file, so on-error has no eager default
    sp.set_defaults(on_error=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"factsum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageFailure as exc:
        print(f"factsum: error: {exc}", file=sys.stderr)
        return EXIT_SCORER if isinstance(exc.cause, ScorerError) else EXIT_DATA
    except ScorerError as exc:
        print(f"factsum: error: scorer: {exc}", file=sys.stderr)
        return EXIT_SCORER
    except (CorpusError, DataError) as exc:
        print(f"factsum: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"factsum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
