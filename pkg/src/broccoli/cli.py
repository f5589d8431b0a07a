"""Command line entry point: annotate, train-lm, analyze, serve.

`annotate` runs the same pipeline as the HTTP service and prints the exact
canonical JSON bytes the service would return, so outputs are comparable
byte for byte. Exit codes: 0 success, 1 runtime error, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import dataclasses
import signal
import sys
import time
from pathlib import Path

from .compat import (
    WalkConfig,
    analyze_books,
    analyze_clickstream,
    format_csv,
    load_clickstream_graph,
    load_page_lengths,
)
from .config import ServiceConfig, load_config
from .memory import LearnerState
from .ngram import NGramModel
from .pipeline import annotate
from .store import LearnerStore
from .textproc import TokenKind, tokenize
from .translation import ProviderUnavailable

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad flag values, unreadable config, or missing support files."""


def _service_config(args: argparse.Namespace) -> ServiceConfig:
    try:
        cfg = load_config(getattr(args, "config", None))
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    overrides = {}
    if getattr(args, "density", None) is not None:
        overrides["density"] = args.density
    if getattr(args, "dict", None) is not None:
        overrides["dictionary"] = Path(args.dict)
    if getattr(args, "lm", None) is not None:
        overrides["lm_model"] = Path(args.lm)
    if getattr(args, "host", None) is not None:
        overrides["host"] = args.host
    if getattr(args, "port", None) is not None:
        overrides["port"] = args.port
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _read_input(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise RuntimeError(f"cannot read input: {exc}") from exc


def _cmd_annotate(args: argparse.Namespace) -> int:
    cfg = _service_config(args)
    try:
        cfg.validate()
        scorer = cfg.build_scorer()
        provider = cfg.build_provider()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    if args.learner_state is not None:
        store = LearnerStore(Path(args.learner_state), params=cfg.tutor_params())
        state = store.get_state(args.learner)
    else:
        state = LearnerState(args.learner, params=cfg.tutor_params())

    text = _read_input(args.file)
    if not text.strip():
        raise RuntimeError("no text to annotate")
    now = time.time() if args.now is None else args.now
    doc = annotate(
        text,
        state,
        scorer,
        provider,
        cfg.selection_config(),
        now=now,
        min_lemma_len=cfg.min_lemma_len,
    )
    # exact canonical bytes, no trailing newline: comparable with HTTP bodies
    sys.stdout.buffer.write(doc.to_json().encode("utf-8"))
    sys.stdout.buffer.flush()
    return EXIT_OK


def _cmd_train_lm(args: argparse.Namespace) -> int:
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    if args.k < 0:
        raise UsageError("--k must be >= 0")
    tokens = []
    for path in args.corpus:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise RuntimeError(f"cannot read corpus: {exc}") from exc
        tokens.extend(tokenize(text))
    if not any(tok.kind is TokenKind.WORD for tok in tokens):
        raise RuntimeError("corpus contains no word tokens")
    model = NGramModel.train(tokens, order=args.order, smoothing_k=args.k)
    model.save(args.out)
    return EXIT_OK


def _parse_alphas(raw: list[str]) -> list[float]:
    alphas = []
    for chunk in raw:
        for piece in chunk.split(","):
            piece = piece.strip()
            if not piece:
                continue
            try:
                alpha = float(piece)
            except ValueError:
                raise UsageError(f"--alpha value {piece!r} is not a number") from None
            if not 0.0 < alpha <= 1.0:
                raise UsageError(f"--alpha must be in (0, 1], got {alpha}")
            alphas.append(alpha)
    if not alphas:
        raise UsageError("at least one --alpha is required")
    return alphas


def _cmd_analyze_books(args: argparse.Namespace) -> int:
    alphas = _parse_alphas(args.alpha)
    rows, errors = analyze_books(
        args.files,
        alphas,
        speed=args.speed,
        hours=args.hours,
        percentile=args.percentile,
    )
    sys.stdout.write(format_csv(rows))
    for err in errors:
        print(f"error: {err}", file=sys.stderr)
    return EXIT_RUNTIME if errors else EXIT_OK


def _cmd_analyze_clickstream(args: argparse.Namespace) -> int:
    alphas = _parse_alphas(args.alpha)
    try:
        walk_cfg = WalkConfig(
            session_tokens=args.session_tokens,
            total_tokens=args.total_tokens,
            seed=args.seed,
            restart_stall_limit=args.stall_limit,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lengths = load_page_lengths(args.lengths)
    graph = load_clickstream_graph(args.graph, lengths)
    rows = analyze_clickstream(
        graph,
        Path(args.graph).name,
        alphas,
        walk_cfg,
        speed=args.speed,
        hours=args.hours,
        percentile=args.percentile,
    )
    sys.stdout.write(format_csv(rows))
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    cfg = _service_config(args)
    try:
        # fail before binding on any config problem
        cfg.validate()
        cfg.build_scorer()
        cfg.build_provider()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    import uvicorn

    from .service import create_app

    app = create_app(cfg)
    # uvicorn re-raises a captured SIGTERM after graceful shutdown, which
    # would kill the process with the default disposition; absorb the replay
    # so a signaled shutdown still exits 0 once state is flushed
    signal.signal(signal.SIGTERM, lambda signum, frame: None)
    try:
        uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    except (OSError, SystemExit) as exc:
        print(f"error: could not serve on {cfg.host}:{cfg.port}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _add_reading_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", action="append", required=True,
                        help="coverage fraction in (0, 1]; repeat or comma-separate for a sweep")
    parser.add_argument("--speed", type=float, default=200.0,
                        help="reading speed, words per minute")
    parser.add_argument("--hours", type=float, default=3.0,
                        help="reading hours per day")
    parser.add_argument("--percentile", type=float, default=90.0,
                        help="nearest-rank percentile for revisitation times")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="broccoli",
        description="Inline-translation reading annotator and corpus analyzer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="annotate text with inline translations")
    p.add_argument("file", nargs="?",
                   help="input text file; omit or use '-' for stdin")
    p.add_argument("--density", type=float,
                   help="fraction of word tokens to translate")
    p.add_argument("--dict", help="source-to-target dictionary TSV")
    p.add_argument("--lm", help="trained language model file")
    p.add_argument("--learner-state",
                   help="learner state directory (the store root)")
    p.add_argument("--learner", default="local",
                   help="learner id inside the state directory")
    p.add_argument("--now", type=float,
                   help="clock override in epoch seconds, for reproducible output")
    p.add_argument("--config", help="service config file")
    p.set_defaults(handler=_cmd_annotate)

    p = sub.add_parser("train-lm", help="train and save a guessability language model")
    p.add_argument("corpus", nargs="+", help="plain-text corpus files")
    p.add_argument("--order", type=int, default=3, help="n-gram order")
    p.add_argument("--k", type=float, default=1.0, help="add-k smoothing constant")
    p.add_argument("--out", required=True, help="output model path")
    p.set_defaults(handler=_cmd_train_lm)

    analyze = sub.add_parser("analyze", help="corpus compatibility analysis (CSV)")
    asub = analyze.add_subparsers(dest="analysis", required=True)

    p = asub.add_parser("books", help="revisitation statistics for book files")
    _add_reading_model_flags(p)
    p.add_argument("files", nargs="*", help="plain-text book files")
    p.set_defaults(handler=_cmd_analyze_books)

    p = asub.add_parser("clickstream",
                        help="revisitation statistics for simulated browsing")
    _add_reading_model_flags(p)
    p.add_argument("--session-tokens", type=int, required=True,
                   help="tokens per simulated reading session")
    p.add_argument("--total-tokens", type=int, default=2_000_000,
                   help="total corpus tokens to simulate")
    p.add_argument("--seed", type=int, default=0, help="walk RNG seed")
    p.add_argument("--graph", required=True,
                   help="clickstream TSV: prev<TAB>curr<TAB>count")
    p.add_argument("--lengths", required=True,
                   help="page length TSV: page<TAB>token_count")
    p.add_argument("--stall-limit", type=int, default=100,
                   help="zero-progress restarts before a session is abandoned")
    p.set_defaults(handler=_cmd_analyze_clickstream)

    p = sub.add_parser("serve", help="run the HTTP annotation service")
    p.add_argument("--config", help="service config file")
    p.add_argument("--host", help="bind address override")
    p.add_argument("--port", type=int, help="port override")
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProviderUnavailable as exc:
        print(f"error: translations unavailable: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        return 130
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
