"""Command-line shell for the filtering engine.

Profiles live in directories (one per profile) under ``ENTRENCH_HOME``
unless ``--profile`` names an explicit path.  Subcommands mirror the
agent lifecycle: ``init``, ``learn``, ``filter``, ``show``, ``explain``,
``validate``, ``export``, ``import`` and ``serve``.

Exit codes: 1 usage, 2 parse/validation/conflict, 3 I/O.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .agent import (
    AgentProfile,
    Document,
    ProfileError,
    RELEVANT,
    UNJUDGED,
    dumps_profile,
    enqueue,
    explain as explain_query,
    filter_document,
    learn,
    load_profile,
    load_queue,
    loads_profile,
    make_profile,
    parse_corpus,
    save_profile,
    save_queue,
)
from .classifier import ClassifierConfig, ClassifierError
from .logic import ParseError, render
from .ranking import (
    RankingError,
    dump_belief_lines,
    format_rank,
    parse_belief_lines,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3

DEFAULT_PROFILE = "default"


class CliError(Exception):
    """Operational failure with a chosen exit code."""

    def __init__(self, message: str, code: int = EXIT_DATA):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; the contract here is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def profile_root() -> Path:
    return Path(os.environ.get("ENTRENCH_HOME", "~/.entrench")).expanduser()


def resolve_profile(name: str | None) -> Path:
    """Bare names live under ENTRENCH_HOME; anything path-like is literal."""
    name = name or DEFAULT_PROFILE
    if os.sep in name or name.startswith((".", "~")):
        return Path(name).expanduser()
    return profile_root() / name


def _load(directory: Path) -> AgentProfile:
    try:
        return load_profile(directory)
    except FileNotFoundError:
        raise CliError(f"no profile at {directory} (run `entrench init`?)", EXIT_IO)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(str(exc), EXIT_IO)


def _emit(args, payload: dict, human: str) -> None:
    print(json.dumps(payload, sort_keys=True) if args.json else human)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_init(args) -> int:
    directory = resolve_profile(args.profile)
    if (directory / "profile.tsv").exists() and not args.force:
        raise CliError(f"profile already exists at {directory} (use --force)")
    config = ClassifierConfig(
        epsilon=args.epsilon,
        neutrality=args.neutrality,
        prior_relevance=args.prel,
    )
    knowledge = []
    if args.knowledge:
        entries, protected = parse_belief_lines(
            _read_text(args.knowledge).splitlines()
        )
        knowledge = [(f, rank, f in set(protected)) for f, rank in entries]
    profile = make_profile(
        knowledge, config=config, mode=args.mode, constants=args.constant or ()
    )
    violations = [
        v for v in profile.ranking.validate(args.mode) if v.severity == "violation"
    ]
    if violations:
        raise CliError(
            "domain knowledge breaks the entrenchment conditions: "
            + "; ".join(v.message for v in violations)
        )
    save_profile(profile, directory)
    _emit(
        args,
        {"profile": str(directory), "beliefs": len(profile.ranking)},
        f"initialized {directory} with {len(profile.ranking)} beliefs",
    )
    return EXIT_OK


def cmd_learn(args) -> int:
    directory = resolve_profile(args.profile)
    profile = _load(directory)
    documents = parse_corpus(_read_text(args.corpus))
    lines: list[str] = []
    for doc in documents:
        if doc.label == UNJUDGED:
            continue
        profile, reports = learn(profile, doc, doc.label == RELEVANT)
        if args.json:
            lines.append(json.dumps({
                "doc": doc.doc_id,
                "label": doc.label,
                "reports": [r.to_dict() for r in reports],
            }, sort_keys=True))
        else:
            summary = "; ".join(
                f"{r.target} -> {format_rank(r.rank)}" for r in reports
            )
            lines.append(f"{doc.doc_id}\t{doc.label}\t{summary or 'no change'}")
    save_profile(profile, directory)
    queue = [d for d in load_queue(directory)
             if d.doc_id not in {doc.doc_id for doc in documents}]
    save_queue(queue, directory)
    if lines:
        print("\n".join(lines))
    return EXIT_OK


def cmd_filter(args) -> int:
    directory = resolve_profile(args.profile)
    profile = _load(directory)
    documents = [
        d for d in parse_corpus(_read_text(args.corpus)) if d.label == UNJUDGED
    ]
    lines = []
    for doc in documents:
        verdict = filter_document(profile, doc)
        if args.json:
            lines.append(json.dumps(
                {"doc": doc.doc_id, **verdict.to_dict()}, sort_keys=True
            ))
        else:
            word = "relevant" if verdict.relevant else "irrelevant"
            lines.append(f"{doc.doc_id}\t{word}\t{format_rank(verdict.degree)}")
    save_queue(enqueue(load_queue(directory), documents), directory)
    if lines:
        print("\n".join(lines))
    return EXIT_OK


def _snapshot(profile: AgentProfile) -> dict:
    ranking = profile.ranking
    cut = set(ranking.consistent_cut())
    return {
        "beliefs": [
            {
                "formula": render(f),
                "rank": format_rank(rank),
                "protected": ranking.is_protected(f),
                "in_cut": f in cut,
            }
            for f, rank in ranking.items()
        ],
        "incons": format_rank(ranking.inconsistency_degree()),
        "cut_size": len(cut),
        "mode": profile.mode,
    }


def cmd_show(args) -> int:
    profile = _load(resolve_profile(args.profile))
    if args.json:
        print(json.dumps(_snapshot(profile), sort_keys=True))
        return EXIT_OK
    for line in dump_belief_lines(profile.ranking):
        print(line)
    print(f"# incons\t{format_rank(profile.ranking.inconsistency_degree())}")
    print(f"# cut\t{len(profile.ranking.consistent_cut())}")
    return EXIT_OK


def cmd_explain(args) -> int:
    directory = resolve_profile(args.profile)
    profile = _load(directory)
    queued = {d.doc_id: d for d in load_queue(directory)}
    if args.doc in queued:
        query = queued[args.doc]
        label = args.doc
    elif any(c in args.doc for c in ", "):
        # Comma- or space-separated keywords make an ad-hoc query.
        try:
            query = Document("adhoc", tuple(args.doc.replace(",", " ").split()))
        except ProfileError:
            raise CliError(f"no usable keywords in {args.doc!r}")
        label = "query"
    else:
        raise CliError(f"unknown document id {args.doc!r}")
    verdict = explain_query(profile, query)
    if args.json:
        print(json.dumps({"doc": label, **verdict.to_dict()}, sort_keys=True))
        return EXIT_OK
    word = "relevant" if verdict.relevant else "irrelevant"
    print(
        f"{label}: {word} (degree {format_rank(verdict.degree)}, "
        f"incons {format_rank(verdict.incons)}, cut {verdict.cut_size})"
    )
    for premise in verdict.premises:
        print(f"  {render(premise)}")
    return EXIT_OK


def cmd_validate(args) -> int:
    profile = _load(resolve_profile(args.profile))
    mode = args.mode or profile.mode
    violations = profile.ranking.validate(mode)
    if args.json:
        print(json.dumps({
            "mode": mode,
            "violations": [
                {
                    "condition": v.condition,
                    "severity": v.severity,
                    "message": v.message,
                    "witnesses": list(v.witnesses),
                }
                for v in violations
            ],
        }, sort_keys=True))
    else:
        for v in violations:
            print(f"{v.condition}\t{v.severity}\t{v.message}")
        if not violations:
            print(f"ok ({mode} mode)")
    if any(v.severity == "violation" for v in violations):
        return EXIT_DATA
    return EXIT_OK


def cmd_export(args) -> int:
    profile = _load(resolve_profile(args.profile))
    text = dumps_profile(profile)
    if args.output and args.output != "-":
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise CliError(str(exc), EXIT_IO)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_import(args) -> int:
    profile = loads_profile(_read_text(args.input))
    save_profile(profile, resolve_profile(args.profile))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    host, _, port = args.listen.rpartition(":")
    if not host or not port.isdigit():
        raise CliError(f"--listen expects host:port, got {args.listen!r}")
    app = create_app(profile_root(), token=args.token, debug=args.debug)
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--profile", help="profile name (under ENTRENCH_HOME) or path")
    common.add_argument("--json", action="store_true",
                        help="machine-readable output and error records")

    parser = _Parser(prog="entrench", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", parents=[common], help="create a fresh profile")
    p.add_argument("--knowledge", metavar="FILE",
                   help="belief-base file of seed domain knowledge")
    p.add_argument("--constant", action="append", metavar="NAME",
                   help="constant for grounding schemas (repeatable)")
    p.add_argument("--mode", choices=("paper", "strict"), default="paper")
    p.add_argument("--epsilon", type=float, default=0.9)
    p.add_argument("--lambda", dest="neutrality", type=float, default=0.5)
    p.add_argument("--prel", type=float, default=0.5)
    p.add_argument("--force", action="store_true",
                   help="overwrite an existing profile")
    p.set_defaults(run=cmd_init)

    p = sub.add_parser("learn", parents=[common],
                       help="replay a labeled corpus of judgments")
    p.add_argument("corpus", help="corpus file (id<TAB>label<TAB>keywords), - for stdin")
    p.set_defaults(run=cmd_learn)

    p = sub.add_parser("filter", parents=[common],
                       help="judge the unlabeled documents of a corpus")
    p.add_argument("corpus", help="corpus file, - for stdin")
    p.set_defaults(run=cmd_filter)

    p = sub.add_parser("show", parents=[common], help="print the belief base")
    p.set_defaults(run=cmd_show)

    p = sub.add_parser("explain", parents=[common],
                       help="explain the verdict for a queued document")
    p.add_argument("doc", help="document id from the queue, or ad-hoc keywords")
    p.set_defaults(run=cmd_explain)

    p = sub.add_parser("validate", parents=[common],
                       help="check the entrenchment conditions")
    p.add_argument("--mode", choices=("paper", "strict"),
                   help="override the profile's mode")
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("export", parents=[common],
                       help="write the profile file to stdout or a path")
    p.add_argument("output", nargs="?", help="target path (default stdout)")
    p.set_defaults(run=cmd_export)

    p = sub.add_parser("import", parents=[common],
                       help="replace the profile from an exported file")
    p.add_argument("input", help="source path, - for stdin")
    p.set_defaults(run=cmd_import)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP API")
    p.add_argument("--listen", default="127.0.0.1:8000", metavar="HOST:PORT")
    p.add_argument("--token", help="require this bearer token on every request")
    p.add_argument("--debug", action="store_true",
                   help="verify report diffs against snapshots server-side")
    p.set_defaults(run=cmd_serve)
    return parser


def _fail(args, message: str, code: int) -> int:
    if args is not None and getattr(args, "json", False):
        print(json.dumps({"error": {"code": code, "message": message}},
                         sort_keys=True))
    else:
        print(f"entrench: error: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except CliError as exc:
        return _fail(args, str(exc), exc.code)
    except (ParseError, ProfileError, RankingError, ClassifierError) as exc:
        return _fail(args, str(exc), EXIT_DATA)
    except OSError as exc:
        return _fail(args, str(exc), EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())
